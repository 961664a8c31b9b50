#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "polycert/bernstein.hpp"
#include "polycert/expr.hpp"
#include "polycert/field.hpp"
#include "polycert/reconstruction.hpp"
#include "polycert/sobolev.hpp"

namespace polycert {

// Weighted-driver knobs. The kill order starts at 2 (matching the quadratic
// jet split v = m + h * x'x) and escalates when the residual's regularity at
// the origin blocks the requested tolerance: killing terms up to order T
// leaves a residual quotient in C^{T-2,1}, so each step buys one derivative.
struct WeightedOptions {
    ApproxOptions approx;
    double eta = kOriginExclusionRadius;
    int taylor_order_start = 2;
    int taylor_order_cap = 6;
};

// Truncated Taylor polynomial at the origin up to total order `order`.
// Derivative values are taken symbolically, evaluated at 0, and converted
// exactly, so the kill is exact at the origin by construction.
inline Polynomial taylor_poly(const Expression& v, int order) {
    if (order < 0) throw std::invalid_argument("taylor_poly: order must be nonnegative");
    int n = v.dimension();
    Polynomial m(n);
    std::vector<uint32_t> gamma(static_cast<size_t>(n), 0);
    std::vector<double> origin(static_cast<size_t>(n), 0.0);

    auto emit = [&](const auto& self, int i, int remaining) -> void {
        if (i > n) {
            MultiIndex g(gamma);
            double value = evaluate(differentiate(v, g), origin);
            if (value != 0.0) {
                Rational fact(1);
                for (uint32_t e : gamma) {
                    for (uint32_t k = 2; k <= e; ++k) fact *= static_cast<long>(k);
                }
                m.add_term(g, rational_from_double(value) / fact);
            }
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            gamma[static_cast<size_t>(i - 1)] = static_cast<uint32_t>(e);
            self(self, i + 1, remaining - e);
        }
        gamma[static_cast<size_t>(i - 1)] = 0;
    };
    emit(emit, 1, order);
    return m;
}

// Second-order jet at the origin; the default split v = m + h * x'x uses it.
inline Polynomial taylor2(const Expression& v) { return taylor_poly(v, 2); }

// Residual quotient h = (v - kill) / x'x, set to 0 inside the eta-ball where
// the quotient is defined only by continuity.
inline ScalarField weighted_residual_field(const Expression& v, const Polynomial& kill,
                                           double eta = kOriginExclusionRadius) {
    if (v.dimension() != kill.dimension()) {
        throw std::invalid_argument("weighted_residual_field: dimension mismatch");
    }
    CompiledPolynomial fast(kill);
    double eta2 = eta * eta;
    return {v.dimension(),
            [v, fast, eta2](const std::vector<double>& x) {
                double ss = dot_self(x);
                if (ss <= eta2) return 0.0;
                return (evaluate(v, x) - fast.eval(x)) / ss;
            },
            nullptr};
}

// Max of |u - v| / x'x over the grid, skipping the eta-ball.
inline GridMax sampled_weighted_error(const CompiledPolynomial& p, const Expression& v,
                                      const Box& box, int density, double eta, bool offset) {
    auto axes = tensor_grid(box, density, offset);
    double eta2 = eta * eta;
    return max_abs_on_grid(axes, [&](const std::vector<double>& x) {
        double ss = dot_self(x);
        if (ss <= eta2) return 0.0;
        return (evaluate(v, x) - p.eval(x)) / ss;
    });
}

// Weighted-norm driver: split v = m_T + h * x'x, approximate the residual
// quotient h by q, and return p = m_T + q * x'x; then (p - v)/x'x = q - h,
// so the driver's sampled gate is exactly the weighted error. The kill order
// escalates when the tolerance is unreachable at the degree cap.
inline Polynomial approximate_weighted(const Expression& v, double eps, const Box& box,
                                       const WeightedOptions& wopts = {},
                                       ApproxInfo* info = nullptr) {
    if (!(eps > 0.0)) throw std::invalid_argument("approximate_weighted: eps must be positive");
    if (v.dimension() != box.dimension) {
        throw std::invalid_argument("approximate_weighted: dimension mismatch");
    }
    if (wopts.taylor_order_start < 2 || wopts.taylor_order_cap < wopts.taylor_order_start) {
        throw std::invalid_argument("approximate_weighted: invalid taylor order range");
    }

    Polynomial ss = Polynomial::xtx(box.dimension);
    double best = -1.0;
    for (int order = wopts.taylor_order_start; order <= wopts.taylor_order_cap; ++order) {
        Polynomial kill = taylor_poly(v, order);
        ScalarField h = weighted_residual_field(v, kill, wopts.eta);
        ApproxInfo local;
        Polynomial q(box.dimension);
        try {
            q = approx_to_tolerance(h, eps, box, wopts.approx, &local);
        } catch (const ToleranceUnachievable& e) {
            if (best < 0.0 || e.best_error < best) best = e.best_error;
            continue;
        }
        Polynomial p = kill + q * ss;
        GridMax posthoc = sampled_weighted_error(CompiledPolynomial(p), v, box,
                                                 wopts.approx.grid_density, wopts.eta,
                                                 /*offset=*/true);
        if (posthoc.value > eps) {
            if (best < 0.0 || posthoc.value < best) best = posthoc.value;
            continue;
        }
        if (info) {
            // Field-wise copy: the caller may have tagged info->alpha already.
            info->degree = local.degree;
            info->iterates = local.iterates;
            info->sampled_error = local.sampled_error;
            info->effective_error = local.effective_error;
            info->taylor_order = order;
        }
        return p;
    }
    throw ToleranceUnachievable(best, resolved_degree_cap(wopts.approx, box.dimension));
}

struct WeightedSobolevReport {
    double epsilon = 0.0;
    double posthoc_error = 0.0;
    MultiIndex worst_alpha;
    std::vector<ApproxInfo> per_alpha;
    int grid_density = 0;
    double eta = kOriginExclusionRadius;
};

// Sampled weighted Sobolev distance: max over binary derivative indices of
// the sampled sup of |D^alpha p - D^alpha v| / x'x outside the eta-ball.
inline double sampled_weighted_sobolev_distance(const Polynomial& p, const Expression& v,
                                                const Box& box, int density, double eta,
                                                bool offset, MultiIndex* worst_alpha = nullptr,
                                                std::vector<double>* worst_point = nullptr) {
    if (p.dimension() != box.dimension || v.dimension() != box.dimension) {
        throw std::invalid_argument("sampled_weighted_sobolev_distance: dimension mismatch");
    }
    auto axes = tensor_grid(box, density, offset);
    double eta2 = eta * eta;
    double worst = -1.0;
    for (const MultiIndex& alpha : binary_multi_indices(box.dimension)) {
        CompiledPolynomial dp(p.diff(alpha));
        Expression dv = differentiate(v, alpha);
        GridMax gm = max_abs_on_grid(axes, [&](const std::vector<double>& x) {
            double sq = dot_self(x);
            if (sq <= eta2) return 0.0;
            return (dp.eval(x) - evaluate(dv, x)) / sq;
        });
        if (gm.value > worst) {
            worst = gm.value;
            if (worst_alpha) *worst_alpha = alpha;
            if (worst_point) *worst_point = gm.point;
        }
    }
    return worst;
}

// Weighted Sobolev driver: every mixed first partial of v is approximated in
// the weighted norm to eps / 2^n (each with its own kill order), assembled
// through the reconstruction operator, and re-checked on an offset grid.
inline Polynomial approximate_weighted_sobolev(const Expression& v, double eps, const Box& box,
                                               const WeightedOptions& wopts = {},
                                               WeightedSobolevReport* report = nullptr) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("approximate_weighted_sobolev: eps must be positive");
    }
    if (v.dimension() != box.dimension) {
        throw std::invalid_argument("approximate_weighted_sobolev: dimension mismatch");
    }

    int n = box.dimension;
    double per_alpha_tol = eps / static_cast<double>(size_t{1} << n);

    std::map<MultiIndex, Polynomial> entries;
    std::vector<ApproxInfo> infos;
    for (const MultiIndex& alpha : binary_multi_indices(n)) {
        ApproxInfo info;
        info.alpha = alpha;
        Polynomial pa =
            approximate_weighted(differentiate(v, alpha), per_alpha_tol, box, wopts, &info);
        entries.emplace(alpha, std::move(pa));
        infos.push_back(std::move(info));
    }
    Polynomial p = reconstruct_from_partials(DerivativeTuple<Polynomial>(n, std::move(entries)));

    MultiIndex worst_alpha = MultiIndex::zero(n);
    std::vector<double> worst_point;
    double err = sampled_weighted_sobolev_distance(p, v, box, wopts.approx.grid_density,
                                                   wopts.eta, /*offset=*/true, &worst_alpha,
                                                   &worst_point);
    if (report) {
        report->epsilon = eps;
        report->posthoc_error = err;
        report->worst_alpha = worst_alpha;
        report->per_alpha = std::move(infos);
        report->grid_density = wopts.approx.grid_density;
        report->eta = wopts.eta;
    }
    if (err > eps) throw PosthocFailure(worst_alpha, err, worst_point);
    return p;
}

}  // namespace polycert
