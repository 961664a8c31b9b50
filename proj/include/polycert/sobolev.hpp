#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "polycert/bernstein.hpp"
#include "polycert/expr.hpp"
#include "polycert/field.hpp"
#include "polycert/reconstruction.hpp"

namespace polycert {

// Raised when an assembled approximant fails its independent offset-grid
// check. Carries the worst derivative index and sample point.
struct PosthocFailure : std::runtime_error {
    MultiIndex alpha;
    double error;
    std::vector<double> point;
    PosthocFailure(MultiIndex a, double err, std::vector<double> x)
        : std::runtime_error("post-hoc check failed at derivative " + a.to_string() +
                             " with error " + std::to_string(err)),
          alpha(std::move(a)),
          error(err),
          point(std::move(x)) {}
};

struct SobolevReport {
    double epsilon = 0.0;
    double posthoc_error = 0.0;
    MultiIndex worst_alpha;
    std::vector<ApproxInfo> per_alpha;
    int grid_density = 0;
};

namespace detail {

inline ScalarField derivative_field(const Polynomial& p, const MultiIndex& alpha) {
    return make_field(p.diff(alpha));
}

inline ScalarField derivative_field(const Expression& e, const MultiIndex& alpha) {
    return make_field(differentiate(e, alpha));
}

}  // namespace detail

// Sampled W^{1,inf}-style distance: the max over binary derivative indices of
// the sampled sup of |D^alpha u - D^alpha v|. Offset grids avoid reusing the
// points any approximation was gated on.
template <typename U, typename V>
double sampled_sobolev_distance(const U& u, const V& v, const Box& box, int density,
                                bool offset = false, MultiIndex* worst_alpha = nullptr,
                                std::vector<double>* worst_point = nullptr) {
    if (u.dimension() != box.dimension || v.dimension() != box.dimension) {
        throw std::invalid_argument("sampled_sobolev_distance: dimension mismatch");
    }
    auto axes = tensor_grid(box, density, offset);
    double worst = -1.0;
    for (const MultiIndex& alpha : binary_multi_indices(box.dimension)) {
        ScalarField fu = detail::derivative_field(u, alpha);
        ScalarField fv = detail::derivative_field(v, alpha);
        GridMax gm = max_abs_on_grid(
            axes, [&](const std::vector<double>& x) { return fu.eval(x) - fv.eval(x); });
        if (gm.value > worst) {
            worst = gm.value;
            if (worst_alpha) *worst_alpha = alpha;
            if (worst_point) *worst_point = gm.point;
        }
    }
    return worst;
}

// Sobolev-norm driver: approximates every mixed first partial to eps / 2^n,
// assembles the results through the reconstruction operator (which amplifies
// per-component error by at most 2^n), then re-checks on an offset grid.
inline Polynomial approximate_sobolev(const Expression& v, double eps, const Box& box,
                                      const ApproxOptions& opts = {},
                                      SobolevReport* report = nullptr) {
    if (!(eps > 0.0)) throw std::invalid_argument("approximate_sobolev: eps must be positive");
    if (v.dimension() != box.dimension) {
        throw std::invalid_argument("approximate_sobolev: dimension mismatch");
    }

    int n = box.dimension;
    double per_alpha_tol = eps / static_cast<double>(size_t{1} << n);

    std::map<MultiIndex, Polynomial> entries;
    std::vector<ApproxInfo> infos;
    for (const MultiIndex& alpha : binary_multi_indices(n)) {
        ApproxInfo info;
        info.alpha = alpha;
        Polynomial q = approx_to_tolerance(make_field(differentiate(v, alpha)), per_alpha_tol,
                                           box, opts, &info);
        entries.emplace(alpha, std::move(q));
        infos.push_back(std::move(info));
    }
    Polynomial p = reconstruct_from_partials(DerivativeTuple<Polynomial>(n, std::move(entries)));

    MultiIndex worst_alpha = MultiIndex::zero(n);
    std::vector<double> worst_point;
    double err = sampled_sobolev_distance(p, v, box, opts.grid_density, /*offset=*/true,
                                          &worst_alpha, &worst_point);
    if (report) {
        report->epsilon = eps;
        report->posthoc_error = err;
        report->worst_alpha = worst_alpha;
        report->per_alpha = std::move(infos);
        report->grid_density = opts.grid_density;
    }
    if (err > eps) throw PosthocFailure(worst_alpha, err, worst_point);
    return p;
}

}  // namespace polycert
