#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

#include "polycert/expr.hpp"
#include "polycert/polynomial.hpp"
#include "polycert/rational.hpp"

namespace polycert {

// Evaluable scalar function on a box. `eval_exact` is present only when the
// field can be sampled in exact arithmetic (polynomials); approximation code
// prefers it so that algebraic identities survive with zero error.
struct ScalarField {
    int dimension = 0;
    std::function<double(const std::vector<double>&)> eval;
    std::function<Rational(const std::vector<Rational>&)> eval_exact;
};

inline ScalarField make_field(const Polynomial& p) {
    CompiledPolynomial fast(p);
    return {p.dimension(),
            [fast](const std::vector<double>& x) { return fast.eval(x); },
            [p](const std::vector<Rational>& x) { return p.eval_exact(x); }};
}

inline ScalarField make_field(const Expression& e) {
    auto poly = try_polynomial(e);
    if (poly) return make_field(*poly);
    return {e.dimension(), [e](const std::vector<double>& x) { return evaluate(e, x); }, nullptr};
}

inline constexpr double kOriginExclusionRadius = 1e-6;

// Squared euclidean norm.
inline double dot_self(const std::vector<double>& x) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return s;
}

inline constexpr size_t kGridPointCap = size_t{1} << 24;

// Inclusive uniform axis with `density` points from -r to r; both endpoints
// (hence all box corners) are sampled.
inline std::vector<double> uniform_axis(const Box& box, int density) {
    if (density < 2) throw std::invalid_argument("uniform_axis: density must be at least 2");
    double r = rational_to_double(box.radius);
    std::vector<double> xs(static_cast<size_t>(density));
    for (int k = 0; k < density; ++k) {
        xs[static_cast<size_t>(k)] = -r + 2.0 * r * k / (density - 1);
    }
    xs.front() = -r;
    xs.back() = r;
    return xs;
}

// Half-pitch shifted axis used for post-hoc verification, so the check never
// reuses the sample points an approximation was tuned on.
inline std::vector<double> offset_axis(const Box& box, int density) {
    if (density < 2) throw std::invalid_argument("offset_axis: density must be at least 2");
    double r = rational_to_double(box.radius);
    double pitch = 2.0 * r / (density - 1);
    std::vector<double> xs(static_cast<size_t>(density - 1));
    for (int k = 0; k + 1 < density; ++k) {
        xs[static_cast<size_t>(k)] = -r + pitch * (k + 0.5);
    }
    return xs;
}

inline std::vector<std::vector<double>> tensor_grid(const Box& box, int density, bool offset) {
    std::vector<double> axis = offset ? offset_axis(box, density) : uniform_axis(box, density);
    return std::vector<std::vector<double>>(static_cast<size_t>(box.dimension), axis);
}

// Visits every grid point in row-major order (last axis fastest).
template <typename Fn>
void for_each_grid_point(const std::vector<std::vector<double>>& axes, Fn&& fn) {
    size_t total = 1;
    for (const auto& a : axes) {
        if (a.empty()) throw std::invalid_argument("for_each_grid_point: empty axis");
        if (total > kGridPointCap / a.size()) {
            throw std::invalid_argument("for_each_grid_point: grid point cap exceeded");
        }
        total *= a.size();
    }
    std::vector<double> pt(axes.size());
    for (size_t c = 0; c < total; ++c) {
        size_t rem = c;
        for (size_t i = axes.size(); i-- > 0;) {
            pt[i] = axes[i][rem % axes[i].size()];
            rem /= axes[i].size();
        }
        fn(pt);
    }
}

struct GridMax {
    double value = 0.0;
    std::vector<double> point;
};

template <typename Fn>
GridMax max_abs_on_grid(const std::vector<std::vector<double>>& axes, Fn&& fn) {
    GridMax gm;
    for_each_grid_point(axes, [&](const std::vector<double>& x) {
        double v = std::abs(fn(x));
        if (gm.point.empty() || v > gm.value) {
            gm.value = v;
            gm.point = x;
        }
    });
    return gm;
}

}  // namespace polycert
