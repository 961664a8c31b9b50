#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polycert/expr.hpp"
#include "polycert/field.hpp"
#include "polycert/polynomial.hpp"
#include "polycert/weighted.hpp"

namespace polycert {

// Dynamics x' = f(x) with an equilibrium at the origin; vanishing there is
// checked by evaluation at construction.
class VectorField {
  public:
    explicit VectorField(std::vector<Expression> components)
        : components_(std::move(components)) {
        if (components_.empty()) throw std::invalid_argument("VectorField: no components");
        dimension_ = static_cast<int>(components_.size());
        std::vector<double> origin(static_cast<size_t>(dimension_), 0.0);
        for (const Expression& c : components_) {
            if (c.dimension() != dimension_) {
                throw std::invalid_argument(
                    "VectorField: component dimension must match component count");
            }
            if (evaluate(c, origin) != 0.0) {
                throw std::invalid_argument("VectorField: field does not vanish at the origin");
            }
        }
    }

    int dimension() const { return dimension_; }
    const std::vector<Expression>& components() const { return components_; }

  private:
    int dimension_;
    std::vector<Expression> components_;
};

// Exact polynomial form of every component, when each one converts.
inline std::optional<std::vector<Polynomial>> exact_components(const VectorField& f) {
    std::vector<Polynomial> out;
    out.reserve(f.components().size());
    for (const Expression& c : f.components()) {
        auto p = try_polynomial(c);
        if (!p) return std::nullopt;
        out.push_back(std::move(*p));
    }
    return out;
}

// Quadratic sandwich and decay rates certified for v on the region:
// beta0 * x'x <= v(x) <= gamma0 * x'x and grad(v) . f <= -delta0 * x'x.
struct LyapunovHypotheses {
    double beta0;
    double gamma0;
    double delta0;
    Box region;

    LyapunovHypotheses(double b0, double g0, double d0, Box reg)
        : beta0(b0), gamma0(g0), delta0(d0), region(std::move(reg)) {
        if (!(beta0 > 0.0) || !(gamma0 >= beta0)) {
            throw std::invalid_argument("LyapunovHypotheses: need 0 < beta0 <= gamma0");
        }
        if (!(delta0 > 0.0)) throw std::invalid_argument("LyapunovHypotheses: need delta0 > 0");
    }
};

// One sampled inequality: pass iff the worst margin stays nonnegative.
// Margins are quotients against x'x, so they are scale-free.
struct InequalityResult {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::vector<double> witness;
};

struct CertificateReport {
    bool pass = false;
    int grid_density = 0;
    std::vector<InequalityResult> inequalities;
};

struct HypothesisViolation : std::runtime_error {
    CertificateReport report;
    explicit HypothesisViolation(CertificateReport rep)
        : std::runtime_error("certificate hypotheses fail on the sampling grid"),
          report(std::move(rep)) {}
};

namespace detail {

// Minimum of `margin_fn` over the grid, skipping the eta-ball.
template <typename Fn>
InequalityResult sampled_inequality(const std::string& name,
                                    const std::vector<std::vector<double>>& axes, double eta,
                                    Fn&& margin_fn) {
    InequalityResult res;
    res.name = name;
    double worst = 0.0;
    std::vector<double> at;
    bool first = true;
    double eta2 = eta * eta;
    for_each_grid_point(axes, [&](const std::vector<double>& x) {
        if (dot_self(x) <= eta2) return;
        double m = margin_fn(x);
        if (first || m < worst) {
            worst = m;
            at = x;
            first = false;
        }
    });
    res.margin = worst;
    res.witness = at;
    res.pass = !first && worst >= 0.0;
    return res;
}

}  // namespace detail

// Checks the three hypothesis inequalities for v by sampling quotients
// against x'x on the inclusive uniform grid (corners included).
inline CertificateReport check_hypotheses(const Expression& v, const VectorField& f,
                                          const LyapunovHypotheses& hyp, int grid_density = 64,
                                          double eta = kOriginExclusionRadius) {
    if (v.dimension() != hyp.region.dimension || f.dimension() != hyp.region.dimension) {
        throw std::invalid_argument("check_hypotheses: dimension mismatch");
    }
    auto axes = tensor_grid(hyp.region, grid_density, /*offset=*/false);

    std::vector<Expression> grad;
    for (int i = 1; i <= v.dimension(); ++i) grad.push_back(differentiate(v, i));

    auto quotient_v = [&](const std::vector<double>& x) { return evaluate(v, x) / dot_self(x); };
    auto quotient_decay = [&](const std::vector<double>& x) {
        double dv = 0.0;
        for (size_t i = 0; i < grad.size(); ++i) {
            dv += evaluate(grad[i], x) * evaluate(f.components()[i], x);
        }
        return -dv / dot_self(x);
    };

    CertificateReport rep;
    rep.grid_density = grid_density;
    rep.inequalities.push_back(detail::sampled_inequality(
        "lower_bound", axes, eta,
        [&](const std::vector<double>& x) { return quotient_v(x) - hyp.beta0; }));
    rep.inequalities.push_back(detail::sampled_inequality(
        "upper_bound", axes, eta,
        [&](const std::vector<double>& x) { return hyp.gamma0 - quotient_v(x); }));
    rep.inequalities.push_back(detail::sampled_inequality(
        "decay", axes, eta,
        [&](const std::vector<double>& x) { return quotient_decay(x) - hyp.delta0; }));
    rep.pass = true;
    for (const auto& iq : rep.inequalities) rep.pass = rep.pass && iq.pass;
    return rep;
}

// Sampled sup of max_i |f_i| over the inclusive grid; an analytic bound, when
// supplied, takes precedence (the sampled value can only undershoot).
inline double sup_norm_field(const VectorField& f, const Box& box, int grid_density = 64,
                             std::optional<double> analytic_bound = std::nullopt) {
    if (analytic_bound) {
        if (!(*analytic_bound >= 0.0)) {
            throw std::invalid_argument("sup_norm_field: bound must be nonnegative");
        }
        return *analytic_bound;
    }
    if (f.dimension() != box.dimension) {
        throw std::invalid_argument("sup_norm_field: dimension mismatch");
    }
    auto axes = tensor_grid(box, grid_density, /*offset=*/false);
    GridMax gm = max_abs_on_grid(axes, [&](const std::vector<double>& x) {
        double m = 0.0;
        for (const Expression& c : f.components()) m = std::max(m, std::abs(evaluate(c, x)));
        return m;
    });
    return gm.value;
}

// Rates requested for the polynomial replacement; each must leave slack
// against the certified rates of v.
struct TransferTargets {
    double beta;
    double gamma;
    double delta;
};

struct TransferReport {
    CertificateReport hypothesis_report;
    CertificateReport target_report;
    WeightedSobolevReport weighted;
    double sup_norm = 0.0;
    double margin = 0.0;        // d: the weighted budget that covers all three gaps
    double weighted_eps = 0.0;  // d / r^2, the tolerance passed to the weighted driver
};

struct TransferResult {
    Polynomial p;
    TransferReport report;
};

// Sampled check that the polynomial candidate satisfies the target rates.
inline CertificateReport check_polynomial_targets(const Polynomial& p, const VectorField& f,
                                                  const TransferTargets& targets, const Box& region,
                                                  int grid_density = 64,
                                                  double eta = kOriginExclusionRadius) {
    auto axes = tensor_grid(region, grid_density, /*offset=*/false);
    CompiledPolynomial fast(p);
    std::vector<CompiledPolynomial> grad;
    for (int i = 1; i <= p.dimension(); ++i) grad.emplace_back(p.diff(i));

    auto quotient_p = [&](const std::vector<double>& x) { return fast.eval(x) / dot_self(x); };
    auto quotient_decay = [&](const std::vector<double>& x) {
        double dv = 0.0;
        for (size_t i = 0; i < grad.size(); ++i) {
            dv += grad[i].eval(x) * evaluate(f.components()[i], x);
        }
        return -dv / dot_self(x);
    };

    CertificateReport rep;
    rep.grid_density = grid_density;
    rep.inequalities.push_back(detail::sampled_inequality(
        "lower_bound", axes, eta,
        [&](const std::vector<double>& x) { return quotient_p(x) - targets.beta; }));
    rep.inequalities.push_back(detail::sampled_inequality(
        "upper_bound", axes, eta,
        [&](const std::vector<double>& x) { return targets.gamma - quotient_p(x); }));
    rep.inequalities.push_back(detail::sampled_inequality(
        "decay", axes, eta,
        [&](const std::vector<double>& x) { return quotient_decay(x) - targets.delta; }));
    rep.pass = true;
    for (const auto& iq : rep.inequalities) rep.pass = rep.pass && iq.pass;
    return rep;
}

// Certificate transfer: given v certified at rates (beta0, gamma0, delta0),
// produce a polynomial certified at strictly weaker target rates. The slack
// budget d = 0.9 * min{beta0 - beta, gamma - gamma0, (delta0 - delta)/(n b)}
// bounds how much weighted error the targets tolerate; the weighted Sobolev
// driver then runs on the unit box at tolerance d / r^2 after pulling the
// region back by x -> r x. A failing target report is returned, not thrown.
inline TransferResult transfer_certificate(const Expression& v, const VectorField& f,
                                           const LyapunovHypotheses& hyp,
                                           const TransferTargets& targets,
                                           const WeightedOptions& wopts = {},
                                           int grid_density = 64,
                                           std::optional<double> sup_norm_bound = std::nullopt) {
    if (!(targets.beta > 0.0) || !(targets.beta < hyp.beta0)) {
        throw std::invalid_argument("transfer_certificate: need 0 < beta < beta0");
    }
    if (!(targets.gamma > hyp.gamma0)) {
        throw std::invalid_argument("transfer_certificate: need gamma > gamma0");
    }
    if (!(targets.delta > 0.0) || !(targets.delta < hyp.delta0)) {
        throw std::invalid_argument("transfer_certificate: need 0 < delta < delta0");
    }

    TransferReport report;
    report.hypothesis_report = check_hypotheses(v, f, hyp, grid_density, wopts.eta);
    if (!report.hypothesis_report.pass) throw HypothesisViolation(report.hypothesis_report);

    int n = hyp.region.dimension;
    double b = sup_norm_field(f, hyp.region, grid_density, sup_norm_bound);
    report.sup_norm = b;

    double decay_gap = b > 0.0 ? (hyp.delta0 - targets.delta) / (n * b)
                               : std::numeric_limits<double>::infinity();
    double d = 0.9 * std::min({hyp.beta0 - targets.beta, targets.gamma - hyp.gamma0, decay_gap});
    report.margin = d;

    double r = rational_to_double(hyp.region.radius);
    double eps = d / (r * r);
    report.weighted_eps = eps;

    Expression v_hat = scale_input(v, hyp.region.radius);
    Polynomial p_hat =
        approximate_weighted_sobolev(v_hat, eps, Box(n, Rational(1)), wopts, &report.weighted);
    Polynomial p = p_hat.scale_domain(hyp.region.radius);

    report.target_report =
        check_polynomial_targets(p, f, targets, hyp.region, grid_density, wopts.eta);
    return {std::move(p), std::move(report)};
}

// Exact sum-of-squares certificate for a polynomial Lyapunov candidate on
// the ball { x : x'x <= level }: witnesses for the two Positivstellensatz
// identities, stored as square lists.
struct SOSCertificate {
    Polynomial v;
    Rational epsilon;
    Rational level;
    std::vector<Polynomial> shape_ball;    // s1: multiplies (level - x'x) in the shape identity
    std::vector<Polynomial> shape_free;    // s2: free SOS part of the shape identity
    std::vector<Polynomial> decay_ball;    // t1: multiplies (level - x'x) in the decay identity
    std::vector<Polynomial> decay_free;    // t2: free SOS part of the decay identity

    SOSCertificate(Polynomial v_in, Rational eps, Rational level_in,
                   std::vector<Polynomial> s1, std::vector<Polynomial> s2,
                   std::vector<Polynomial> t1, std::vector<Polynomial> t2)
        : v(std::move(v_in)),
          epsilon(std::move(eps)),
          level(std::move(level_in)),
          shape_ball(std::move(s1)),
          shape_free(std::move(s2)),
          decay_ball(std::move(t1)),
          decay_free(std::move(t2)) {
        if (epsilon <= 0) throw std::invalid_argument("SOSCertificate: epsilon must be positive");
        if (level <= 0) throw std::invalid_argument("SOSCertificate: level must be positive");
        auto check_list = [&](const std::vector<Polynomial>& list) {
            for (const Polynomial& g : list) {
                if (g.dimension() != v.dimension()) {
                    throw std::invalid_argument("SOSCertificate: square-list dimension mismatch");
                }
            }
        };
        check_list(shape_ball);
        check_list(shape_free);
        check_list(decay_ball);
        check_list(decay_free);
    }
};

struct SOSCheckResult {
    bool valid = false;
    Polynomial residual_shape;
    Polynomial residual_decay;
};

// Verifies the two identities in exact arithmetic; both residuals must be
// the zero polynomial, coefficient for coefficient:
//   v - s1 * (level - x'x) - s2 - eps * x'x = 0
//   -grad(v) . f - t1 * (level - x'x) - t2 - eps * x'x = 0
// where each s/t is the sum of squares of its list.
inline SOSCheckResult check_sos_certificate(const SOSCertificate& cert,
                                            const std::vector<Polynomial>& f) {
    int n = cert.v.dimension();
    if (static_cast<int>(f.size()) != n) {
        throw std::invalid_argument("check_sos_certificate: field dimension mismatch");
    }
    for (const Polynomial& fi : f) {
        if (fi.dimension() != n) {
            throw std::invalid_argument("check_sos_certificate: field dimension mismatch");
        }
    }

    Polynomial ss = Polynomial::xtx(n);
    Polynomial ball = Polynomial::constant(n, cert.level) - ss;
    auto sum_sq = [n](const std::vector<Polynomial>& list) {
        Polynomial s(n);
        for (const Polynomial& g : list) s = s + g * g;
        return s;
    };

    Polynomial decay(n);
    for (int i = 1; i <= n; ++i) decay = decay + cert.v.diff(i) * f[static_cast<size_t>(i - 1)];

    SOSCheckResult res{false, Polynomial(n), Polynomial(n)};
    res.residual_shape =
        cert.v - sum_sq(cert.shape_ball) * ball - sum_sq(cert.shape_free) - cert.epsilon * ss;
    res.residual_decay =
        -decay - sum_sq(cert.decay_ball) * ball - sum_sq(cert.decay_free) - cert.epsilon * ss;
    res.valid = res.residual_shape.is_zero() && res.residual_decay.is_zero();
    return res;
}

}  // namespace polycert
