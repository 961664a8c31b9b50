// Acceptance gate: one line per criterion, nonzero exit if any fail.
// Every tolerance, seed, and time budget is pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "polycert/bernstein.hpp"
#include "polycert/expr.hpp"
#include "polycert/field.hpp"
#include "polycert/json_io.hpp"
#include "polycert/lyapunov.hpp"
#include "polycert/reconstruction.hpp"
#include "polycert/sobolev.hpp"
#include "polycert/weighted.hpp"
#include "test_support.hpp"

using namespace polycert;
using test_support::Rng;

namespace {

int g_failures = 0;

template <typename Fn>
void criterion(int number, const char* label, double budget_seconds, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
        ok = fn(note);
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && secs > budget_seconds) {
        ok = false;
        note = "exceeded time budget of " + std::to_string(budget_seconds) + " s";
    }
    std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", number, label, secs,
                note.empty() ? "" : " - ", note.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double grid_sup(const std::vector<std::vector<double>>& axes, const CompiledPolynomial& p) {
    return max_abs_on_grid(axes, [&](const std::vector<double>& x) { return p.eval(x); }).value;
}

// 1. Reconstruction from exact mixed partials is the identity, coefficient
//    for coefficient, across dimensions 1..3.
bool criterion_reconstruction(std::string& note) {
    Rng rng(101);
    int checked = 0;
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 67 && checked < 200; ++trial, ++checked) {
            Polynomial v = test_support::random_polynomial(rng, n, 4);
            if (!(reconstruct_from_partials(mixed_partials(v)) == v)) {
                note = "mismatch at n=" + std::to_string(n) + " trial " + std::to_string(trial);
                return false;
            }
        }
    }
    return true;
}

// 2. The reconstruction operator is 2^n-Lipschitz from tuple sup norm to the
//    derivative sup norm: factor 4 at n = 2, sampled on a 64x64 grid.
bool criterion_lipschitz(std::string& note) {
    Rng rng(102);
    const int n = 2;
    Box box{n, Rational(1)};
    auto axes = tensor_grid(box, 64, false);
    auto alphas = binary_multi_indices(n);

    for (int trial = 0; trial < 100; ++trial) {
        std::map<MultiIndex, Polynomial> pe, qe;
        for (const MultiIndex& a : alphas) {
            pe.emplace(a, test_support::random_polynomial(rng, n, 3));
            qe.emplace(a, test_support::random_polynomial(rng, n, 3));
        }
        DerivativeTuple<Polynomial> p(n, pe), q(n, qe);

        double gap = 0.0;
        for (const MultiIndex& a : alphas) {
            gap = std::max(gap, grid_sup(axes, CompiledPolynomial(p.at(a) - q.at(a))));
        }
        Polynomial delta = reconstruct_from_partials(p) - reconstruct_from_partials(q);
        for (const MultiIndex& beta : alphas) {
            double out = grid_sup(axes, CompiledPolynomial(delta.diff(beta)));
            if (out > 4.0 * gap + 1e-12) {
                note = "gain " + std::to_string(out / gap) + " at trial " + std::to_string(trial);
                return false;
            }
        }
    }
    return true;
}

// 3. Derivative-norm approximation of exp(x1) sin(x2) to 1e-3 on the unit
//    box, verified on the offset grid, degrees within the cap.
bool criterion_sobolev(std::string& note) {
    Expression v = parse_expression("exp(x1)*sin(x2)", 2);
    SobolevReport report;
    approximate_sobolev(v, 1e-3, Box{2, Rational(1)}, {}, &report);
    if (report.posthoc_error > 1e-3) {
        note = "offset error " + std::to_string(report.posthoc_error);
        return false;
    }
    for (const auto& info : report.per_alpha) {
        if (info.degree > 64) {
            note = "degree " + std::to_string(info.degree) + " above cap";
            return false;
        }
    }
    note = "offset error " + std::to_string(report.posthoc_error);
    return true;
}

// 4. Weighted derivative-norm approximation of the same target to 1e-2,
//    verified on the offset grid outside the origin ball.
bool criterion_weighted(std::string& note) {
    Expression v = parse_expression("exp(x1)*sin(x2)", 2);
    WeightedSobolevReport report;
    approximate_weighted_sobolev(v, 1e-2, Box{2, Rational(1)}, {}, &report);
    if (report.posthoc_error > 1e-2) {
        note = "offset weighted error " + std::to_string(report.posthoc_error);
        return false;
    }
    note = "offset weighted error " + std::to_string(report.posthoc_error);
    return true;
}

// 5. The order-2 kill matches value, gradient, and Hessian at the origin
//    exactly (bitwise zero residuals), for 20 random smooth targets.
bool criterion_jet(std::string& note) {
    Rng rng(105);
    std::vector<double> origin(2, 0.0);
    std::vector<MultiIndex> jets = {MultiIndex({0, 0}), MultiIndex({1, 0}), MultiIndex({0, 1}),
                                    MultiIndex({2, 0}), MultiIndex({1, 1}), MultiIndex({0, 2})};
    for (int trial = 0; trial < 20; ++trial) {
        Expression v = test_support::random_smooth_expression(rng, 2, 3);
        Polynomial kill = taylor2(v);
        for (const MultiIndex& g : jets) {
            double v_part = evaluate(differentiate(v, g), origin);
            double m_part = CompiledPolynomial(kill.diff(g)).eval(origin);
            if (v_part - m_part != 0.0) {
                note = "nonzero jet residual at " + g.to_string();
                return false;
            }
        }
    }
    return true;
}

// 6. Certificate transfer for v = ln(1 + x'x), f = -x on the unit box:
//    certified rates (0.54, 1.0, 0.66) move to targets (0.45, 1.1, 0.5).
//    The certified rates are first confirmed by a dense 1-D reduction.
bool criterion_transfer(std::string& note) {
    for (int k = 1; k <= 4000; ++k) {
        double s = 2.0 * k / 4000;
        if (std::log1p(s) / s < 0.54 || 2.0 / (1.0 + s) < 0.66) {
            note = "certified rates fail the 1-D sweep at s=" + std::to_string(s);
            return false;
        }
    }

    Expression v = parse_expression("ln(1 + x1^2 + x2^2)", 2);
    VectorField f({parse_expression("-x1", 2), parse_expression("-x2", 2)});
    LyapunovHypotheses hyp(0.54, 1.0, 0.66, Box{2, Rational(1)});
    TransferResult res = transfer_certificate(v, f, hyp, {0.45, 1.1, 0.5});

    if (!res.report.hypothesis_report.pass) {
        note = "hypotheses fail on the grid";
        return false;
    }
    if (std::abs(res.report.margin - 0.072) > 1e-12) {
        note = "slack budget " + std::to_string(res.report.margin) + ", expected 0.072";
        return false;
    }
    if (!res.report.target_report.pass) {
        note = "target rates fail on the grid";
        return false;
    }
    note = "weighted error " + std::to_string(res.report.weighted.posthoc_error) + " within " +
           std::to_string(res.report.weighted_eps);
    return true;
}

// 7. Approximating the mixed partials and assembling commutes with direct
//    approximation up to a bounded quality ratio at fixed degree 16.
bool criterion_commutation(std::string& note) {
    Box box{2, Rational(1)};
    auto axes = tensor_grid(box, 64, true);
    for (const char* text :
         {"exp(x1)*sin(x2)", "1/(1 + x1^2 + x2^2)", "cos(x1*x2)"}) {
        Expression v = parse_expression(text, 2);

        CompiledPolynomial direct(bernstein_approx(make_field(v), 16, box));
        double direct_err = max_abs_on_grid(axes, [&](const std::vector<double>& x) {
                                return evaluate(v, x) - direct.eval(x);
                            }).value;

        std::map<MultiIndex, Polynomial> entries;
        for (const MultiIndex& alpha : binary_multi_indices(2)) {
            entries.emplace(alpha,
                            bernstein_approx(make_field(differentiate(v, alpha)), 16, box));
        }
        CompiledPolynomial assembled(
            reconstruct_from_partials(DerivativeTuple<Polynomial>(2, std::move(entries))));
        double assembled_err = max_abs_on_grid(axes, [&](const std::vector<double>& x) {
                                   return evaluate(v, x) - assembled.eval(x);
                               }).value;

        double ratio = assembled_err / direct_err;
        if (!(ratio >= 0.1 && ratio <= 10.0)) {
            note = std::string(text) + ": ratio " + std::to_string(ratio);
            return false;
        }
    }
    return true;
}

// 8. The exact certificate for v = x^2 verifies, and every single-coefficient
//    1e-3 perturbation is rejected.
bool criterion_sos(std::string& note) {
    Polynomial v = Polynomial::monomial(MultiIndex({2}), Rational(1));
    std::vector<Polynomial> s2 = {Polynomial::monomial(MultiIndex({1}), Rational(1, 2))};
    std::vector<Polynomial> t2 = {Polynomial::monomial(MultiIndex({1}), Rational(1)),
                                  Polynomial::monomial(MultiIndex({1}), Rational(1, 2))};
    std::vector<Polynomial> f = {Polynomial::monomial(MultiIndex({1}), Rational(-1))};
    SOSCertificate cert(v, Rational(3, 4), Rational(1), {}, s2, {}, t2);

    if (!check_sos_certificate(cert, f).valid) {
        note = "exact certificate rejected";
        return false;
    }

    Rational bump(1, 1000);
    {
        SOSCertificate c = cert;
        c.v = c.v + Polynomial::monomial(MultiIndex({2}), bump);
        if (check_sos_certificate(c, f).valid) {
            note = "perturbed v accepted";
            return false;
        }
    }
    {
        SOSCertificate c = cert;
        c.shape_free[0] = c.shape_free[0] + Polynomial::monomial(MultiIndex({1}), bump);
        if (check_sos_certificate(c, f).valid) {
            note = "perturbed shape witness accepted";
            return false;
        }
    }
    {
        SOSCertificate c = cert;
        c.decay_free[0] = c.decay_free[0] + Polynomial::monomial(MultiIndex({1}), bump);
        if (check_sos_certificate(c, f).valid) {
            note = "perturbed decay witness accepted";
            return false;
        }
    }
    {
        SOSCertificate c = cert;
        c.epsilon += bump;
        if (check_sos_certificate(c, f).valid) {
            note = "perturbed epsilon accepted";
            return false;
        }
    }
    return true;
}

// 9. Axis operations are weighted-norm nonexpansive on fields vanishing to
//    second order at the origin, sampled on a 64x64 grid outside the ball.
bool criterion_weighted_gain(std::string& note) {
    Rng rng(109);
    Box box{2, Rational(1)};
    auto axes = tensor_grid(box, 64, false);
    const double eta2 = kOriginExclusionRadius * kOriginExclusionRadius;

    auto weighted_sup = [&](const Polynomial& g) {
        CompiledPolynomial fast(g);
        return max_abs_on_grid(axes, [&](const std::vector<double>& x) {
                   double ss = dot_self(x);
                   if (ss <= eta2) return 0.0;
                   return fast.eval(x) / ss;
               }).value;
    };

    for (int trial = 0; trial < 50; ++trial) {
        Polynomial f = test_support::random_flat_polynomial(rng, 2);
        double in_norm = weighted_sup(f);
        for (int i = 1; i <= 2; ++i) {
            for (uint32_t bit = 0; bit <= 1; ++bit) {
                double out = weighted_sup(slice_or_integrate(f, i, bit));
                if (out > in_norm + 1e-12) {
                    note = "axis " + std::to_string(i) + " op " + std::to_string(bit) +
                           " gain at trial " + std::to_string(trial);
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace

int main() {
    criterion(1, "reconstruction from exact mixed partials is the identity", 10.0,
              criterion_reconstruction);
    criterion(2, "reconstruction is 4-Lipschitz in the tuple sup norm at n=2", 60.0,
              criterion_lipschitz);
    criterion(3, "derivative-norm approximation reaches 1e-3 on the unit box", 120.0,
              criterion_sobolev);
    criterion(4, "weighted derivative-norm approximation reaches 1e-2", 180.0,
              criterion_weighted);
    criterion(5, "order-2 kills match the jet at the origin exactly", 10.0, criterion_jet);
    criterion(6, "certificate transfer for the logarithmic Lyapunov function", 300.0,
              criterion_transfer);
    criterion(7, "approximate-then-assemble matches direct approximation", 60.0,
              criterion_commutation);
    criterion(8, "exact certificate verifies and perturbations are rejected", 10.0,
              criterion_sos);
    criterion(9, "axis operations are weighted-norm nonexpansive", 60.0,
              criterion_weighted_gain);

    if (g_failures > 0) {
        std::printf("%d of 9 criteria failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
