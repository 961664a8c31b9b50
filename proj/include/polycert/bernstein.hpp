#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "polycert/field.hpp"
#include "polycert/multi_index.hpp"
#include "polycert/polynomial.hpp"
#include "polycert/rational.hpp"

namespace polycert {

struct ToleranceUnachievable : std::runtime_error {
    double best_error;
    int degree_cap;
    ToleranceUnachievable(double best, int cap)
        : std::runtime_error("tolerance not achievable within degree cap " + std::to_string(cap) +
                             " (best sampled error " + std::to_string(best) + ")"),
          best_error(best),
          degree_cap(cap) {}
};

struct GridCapExceeded : std::runtime_error {
    explicit GridCapExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

// Knobs for the driver. degree_cap = 0 resolves to the POLYCERT_DEGREE_CAP
// environment variable if set, else 64 for n <= 2 and 16 for n >= 3.
// `iterates` selects the combination I - (I - B_d)^m: m = 1 is the classical
// operator, larger m trades extra node-matrix passes for O(d^-m) decay on
// smooth targets. `lipschitz`, when positive, upgrades the sampled gate to
// the sound bound (sampled error + L * pitch / 2).
struct ApproxOptions {
    int start_degree = 4;
    int degree_cap = 0;
    int iterates = 4;
    int grid_density = 64;
    double safety = 0.5;
    double lipschitz = 0.0;
    size_t node_cap = size_t{1} << 22;
};

// Per-call record of what the driver settled on.
struct ApproxInfo {
    MultiIndex alpha;
    int degree = 0;
    int iterates = 1;
    int taylor_order = 0;
    double sampled_error = 0.0;
    double effective_error = 0.0;
};

inline int resolved_degree_cap(const ApproxOptions& opts, int dimension) {
    if (opts.degree_cap > 0) return opts.degree_cap;
    if (const char* env = std::getenv("POLYCERT_DEGREE_CAP")) {
        int cap = std::atoi(env);
        if (cap >= 1) return cap;
    }
    return dimension <= 2 ? 64 : 16;
}

namespace detail {

using RationalMatrix = std::vector<std::vector<Rational>>;

// Dense tensor over the node lattice, row-major with the last axis fastest.
struct RationalTensor {
    std::vector<size_t> shape;
    std::vector<Rational> data;

    static RationalTensor zeros(std::vector<size_t> shape) {
        size_t total = 1;
        for (size_t s : shape) total *= s;
        RationalTensor t;
        t.shape = std::move(shape);
        t.data.assign(total, Rational(0));
        return t;
    }
};

// Contracts `M` against one axis: out[..., a, ...] = sum_k M[a][k] in[..., k, ...].
inline RationalTensor apply_axis_matrix(const RationalTensor& in, size_t axis,
                                        const RationalMatrix& M) {
    size_t old_len = in.shape[axis];
    size_t new_len = M.size();
    size_t inner = 1;
    for (size_t i = axis + 1; i < in.shape.size(); ++i) inner *= in.shape[i];
    size_t outer = in.data.size() / (old_len * inner);

    std::vector<size_t> out_shape = in.shape;
    out_shape[axis] = new_len;
    RationalTensor out = RationalTensor::zeros(std::move(out_shape));

    Rational tmp;
    for (size_t o = 0; o < outer; ++o) {
        const size_t in_base = o * old_len * inner;
        const size_t out_base = o * new_len * inner;
        for (size_t a = 0; a < new_len; ++a) {
            const auto& row = M[a];
            for (size_t k = 0; k < old_len; ++k) {
                if (row[k] == 0) continue;
                const Rational& m = row[k];
                const size_t in_off = in_base + k * inner;
                const size_t out_off = out_base + a * inner;
                for (size_t j = 0; j < inner; ++j) {
                    tmp = m * in.data[in_off + j];
                    out.data[out_off + j] += tmp;
                }
            }
        }
    }
    return out;
}

inline Rational binomial(unsigned n, unsigned k) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(b);
}

// Node-to-node matrix of the degree-d operator on [0,1]:
// W[a][k] = C(d,k) (a/d)^k (1 - a/d)^{d-k}, all entries exact.
inline RationalMatrix node_matrix(int d) {
    size_t m = static_cast<size_t>(d) + 1;
    RationalMatrix W(m, std::vector<Rational>(m));
    mpz_class dd;
    mpz_ui_pow_ui(dd.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(d));
    for (size_t a = 0; a < m; ++a) {
        for (size_t k = 0; k < m; ++k) {
            mpz_class num, p1, p2;
            mpz_ui_pow_ui(p1.get_mpz_t(), a, k);
            mpz_ui_pow_ui(p2.get_mpz_t(), static_cast<unsigned long>(d) - a,
                          static_cast<unsigned long>(d) - k);
            mpz_bin_uiui(num.get_mpz_t(), static_cast<unsigned long>(d), k);
            num *= p1;
            num *= p2;
            Rational q(num, dd);
            q.canonicalize();
            W[a][k] = q;
        }
    }
    return W;
}

inline std::vector<Rational> convolve(const std::vector<Rational>& a,
                                      const std::vector<Rational>& b) {
    std::vector<Rational> out(a.size() + b.size() - 1, Rational(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

// Expansion matrix: E[j][k] = coefficient of x^j in the k-th basis function
// C(d,k) t^k (1-t)^{d-k} under t = (x + r) / (2r), exact over the box.
inline RationalMatrix expansion_matrix(int d, const Rational& radius) {
    size_t m = static_cast<size_t>(d) + 1;
    Rational half(1, 2);
    Rational inv2r = Rational(1) / (2 * radius);
    std::vector<Rational> u = {half, inv2r};    // t
    std::vector<Rational> w = {half, -inv2r};   // 1 - t

    std::vector<std::vector<Rational>> upow(m), wpow(m);
    upow[0] = {Rational(1)};
    wpow[0] = {Rational(1)};
    for (size_t k = 1; k < m; ++k) {
        upow[k] = convolve(upow[k - 1], u);
        wpow[k] = convolve(wpow[k - 1], w);
    }

    RationalMatrix E(m, std::vector<Rational>(m, Rational(0)));
    for (size_t k = 0; k < m; ++k) {
        std::vector<Rational> basis = convolve(upow[k], wpow[m - 1 - k]);
        Rational c = binomial(static_cast<unsigned>(d), static_cast<unsigned>(k));
        for (size_t j = 0; j < m && j < basis.size(); ++j) E[j][k] = c * basis[j];
    }
    return E;
}

// Samples the field on the (d+1)^n node lattice. Exact sampling is used when
// the field supports it; double samples are converted exactly otherwise.
inline RationalTensor sample_nodes(const ScalarField& field, int d, const Box& box,
                                   size_t node_cap) {
    int n = field.dimension;
    size_t m = static_cast<size_t>(d) + 1;
    size_t total = 1;
    for (int i = 0; i < n; ++i) {
        if (total > node_cap / m) {
            throw GridCapExceeded("node lattice exceeds cap at degree " + std::to_string(d));
        }
        total *= m;
    }

    std::vector<Rational> axis(m);
    for (size_t k = 0; k < m; ++k) {
        axis[k] = -box.radius + 2 * box.radius * Rational(static_cast<long>(k)) /
                                    Rational(static_cast<long>(d));
    }

    RationalTensor t = RationalTensor::zeros(std::vector<size_t>(static_cast<size_t>(n), m));
    std::vector<Rational> pt(static_cast<size_t>(n));
    std::vector<double> ptd(static_cast<size_t>(n));
    for (size_t c = 0; c < total; ++c) {
        size_t rem = c;
        for (size_t i = static_cast<size_t>(n); i-- > 0;) {
            pt[i] = axis[rem % m];
            rem /= m;
        }
        if (field.eval_exact) {
            t.data[c] = field.eval_exact(pt);
        } else {
            for (size_t i = 0; i < pt.size(); ++i) ptd[i] = rational_to_double(pt[i]);
            t.data[c] = rational_from_double(field.eval(ptd));
        }
    }
    return t;
}

inline Polynomial tensor_to_polynomial(const RationalTensor& t, int dimension) {
    Polynomial p(dimension);
    size_t total = t.data.size();
    for (size_t c = 0; c < total; ++c) {
        if (t.data[c] == 0) continue;
        size_t rem = c;
        std::vector<uint32_t> e(static_cast<size_t>(dimension));
        for (size_t i = static_cast<size_t>(dimension); i-- > 0;) {
            e[i] = static_cast<uint32_t>(rem % t.shape[i]);
            rem /= t.shape[i];
        }
        p.add_term(MultiIndex(std::move(e)), t.data[c]);
    }
    return p;
}

}  // namespace detail

// Iterated operator I - (I - B_d)^m = sum_j (-1)^{j-1} C(m,j) B_d^j. Because
// B_d g depends only on g's node values, every iterate lives on the node
// lattice: the result is B_d applied to the combined node tensor
// sum_j (-1)^{j-1} C(m,j) W^{j-1} F, which needs a single basis expansion.
inline Polynomial iterated_bernstein(const ScalarField& field, int degree, const Box& box,
                                     int iterates, size_t node_cap = size_t{1} << 22) {
    if (field.dimension != box.dimension) {
        throw std::invalid_argument("iterated_bernstein: dimension mismatch");
    }
    if (degree < 1) throw std::invalid_argument("iterated_bernstein: degree must be positive");
    if (iterates < 1) throw std::invalid_argument("iterated_bernstein: iterates must be positive");

    using namespace detail;
    int n = field.dimension;
    RationalTensor cur = sample_nodes(field, degree, box, node_cap);

    RationalTensor acc = cur;
    if (iterates > 1) {
        Rational c1(iterates);  // C(m,1)
        for (auto& v : acc.data) v *= c1;
        RationalMatrix W = node_matrix(degree);
        for (int j = 2; j <= iterates; ++j) {
            for (size_t axis = 0; axis < static_cast<size_t>(n); ++axis) {
                cur = apply_axis_matrix(cur, axis, W);
            }
            Rational c = binomial(static_cast<unsigned>(iterates), static_cast<unsigned>(j));
            if (j % 2 == 0) c = -c;
            for (size_t idx = 0; idx < acc.data.size(); ++idx) {
                acc.data[idx] += c * cur.data[idx];
            }
        }
    }

    RationalMatrix E = expansion_matrix(degree, box.radius);
    RationalTensor coeffs = acc;
    for (size_t axis = 0; axis < static_cast<size_t>(n); ++axis) {
        coeffs = apply_axis_matrix(coeffs, axis, E);
    }
    return tensor_to_polynomial(coeffs, n);
}

// Classical operator: multi-variable tensor-product form, exact coefficients.
inline Polynomial bernstein_approx(const ScalarField& field, int degree, const Box& box) {
    return iterated_bernstein(field, degree, box, 1);
}

// Doubling-schedule driver: raises the degree until the sampled sup error on
// the uniform gate grid clears tol * safety, then returns the approximant.
inline Polynomial approx_to_tolerance(const ScalarField& field, double tol, const Box& box,
                                      const ApproxOptions& opts = {}, ApproxInfo* info = nullptr) {
    if (!(tol > 0.0)) throw std::invalid_argument("approx_to_tolerance: tolerance must be positive");
    if (field.dimension != box.dimension) {
        throw std::invalid_argument("approx_to_tolerance: dimension mismatch");
    }
    if (opts.safety <= 0.0 || opts.safety > 1.0) {
        throw std::invalid_argument("approx_to_tolerance: safety must be in (0, 1]");
    }
    if (opts.start_degree < 1) {
        throw std::invalid_argument("approx_to_tolerance: start degree must be positive");
    }

    int cap = resolved_degree_cap(opts, field.dimension);
    std::vector<int> schedule;
    for (int d = opts.start_degree; d <= cap; d *= 2) schedule.push_back(d);
    if (schedule.empty() || schedule.back() != cap) schedule.push_back(cap);

    double target = tol * opts.safety;
    auto axes = tensor_grid(box, opts.grid_density, /*offset=*/false);
    double pitch = 2.0 * rational_to_double(box.radius) / (opts.grid_density - 1);

    double best = -1.0;
    bool any_degree_ran = false;
    for (int d : schedule) {
        Polynomial p(field.dimension);
        try {
            p = iterated_bernstein(field, d, box, opts.iterates, opts.node_cap);
        } catch (const GridCapExceeded&) {
            if (!any_degree_ran) throw;
            break;
        }
        any_degree_ran = true;
        CompiledPolynomial fast(p);
        GridMax gm = max_abs_on_grid(
            axes, [&](const std::vector<double>& x) { return field.eval(x) - fast.eval(x); });
        double effective = gm.value + (opts.lipschitz > 0.0 ? opts.lipschitz * pitch / 2.0 : 0.0);
        if (best < 0.0 || effective < best) best = effective;
        if (effective <= target) {
            if (info) {
                info->degree = d;
                info->iterates = opts.iterates;
                info->sampled_error = gm.value;
                info->effective_error = effective;
            }
            return p;
        }
    }
    throw ToleranceUnachievable(best, cap);
}

}  // namespace polycert
