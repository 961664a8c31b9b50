#pragma once

#include <map>
#include <stdexcept>
#include <utility>

#include "polycert/expr.hpp"
#include "polycert/multi_index.hpp"
#include "polycert/polynomial.hpp"

namespace polycert {

// Complete family of mixed first partials indexed by binary multi-indices:
// one entry D^alpha v for every alpha in {0,1}^n. The reconstruction operator
// consumes polynomial tuples; expression tuples feed the approximation stage.
template <typename F>
class DerivativeTuple {
  public:
    DerivativeTuple(int dimension, std::map<MultiIndex, F> entries)
        : dimension_(dimension), entries_(std::move(entries)) {
        if (dimension_ < 1) {
            throw std::invalid_argument("DerivativeTuple: dimension must be positive");
        }
        if (entries_.size() != (size_t{1} << dimension_)) {
            throw std::invalid_argument("DerivativeTuple: tuple must have one entry per binary index");
        }
        for (const auto& [alpha, f] : entries_) {
            if (alpha.dimension() != dimension_ || !alpha.is_binary()) {
                throw std::invalid_argument("DerivativeTuple: invalid index " + alpha.to_string());
            }
            if (f.dimension() != dimension_) {
                throw std::invalid_argument("DerivativeTuple: entry dimension mismatch at " +
                                            alpha.to_string());
            }
        }
    }

    int dimension() const { return dimension_; }
    const std::map<MultiIndex, F>& entries() const { return entries_; }

    const F& at(const MultiIndex& alpha) const {
        auto it = entries_.find(alpha);
        if (it == entries_.end()) {
            throw std::invalid_argument("DerivativeTuple: missing index " + alpha.to_string());
        }
        return it->second;
    }

  private:
    int dimension_;
    std::map<MultiIndex, F> entries_;
};

// Axis operation: either freeze x_i at 0 (bit 0) or integrate from 0 along
// x_i (bit 1). These are the two building blocks every component composes.
inline Polynomial slice_or_integrate(const Polynomial& h, int i, uint32_t bit) {
    if (bit > 1) throw std::invalid_argument("slice_or_integrate: bit must be 0 or 1");
    return bit == 0 ? h.substitute_zero(i) : h.integrate_from_zero(i);
}

// Composes the axis operations selected by a binary index. Composition is
// right-to-left: the axis-n operation applies to h first.
inline Polynomial assemble_component(const Polynomial& h, const MultiIndex& alpha) {
    if (alpha.dimension() != h.dimension()) {
        throw std::invalid_argument("assemble_component: index dimension mismatch");
    }
    if (!alpha.is_binary()) {
        throw std::invalid_argument("assemble_component: index must be binary");
    }
    Polynomial out = h;
    for (int i = h.dimension(); i >= 1; --i) out = slice_or_integrate(out, i, alpha[i]);
    return out;
}

// Rebuilds a function from its mixed first partials: summing the assembled
// components over all binary indices inverts mixed_partials exactly.
inline Polynomial reconstruct_from_partials(const DerivativeTuple<Polynomial>& tuple) {
    Polynomial sum(tuple.dimension());
    for (const auto& [alpha, q] : tuple.entries()) sum = sum + assemble_component(q, alpha);
    return sum;
}

inline DerivativeTuple<Polynomial> mixed_partials(const Polynomial& v) {
    std::map<MultiIndex, Polynomial> entries;
    for (const MultiIndex& alpha : binary_multi_indices(v.dimension())) {
        entries.emplace(alpha, v.diff(alpha));
    }
    return DerivativeTuple<Polynomial>(v.dimension(), std::move(entries));
}

inline DerivativeTuple<Expression> mixed_partials(const Expression& v) {
    std::map<MultiIndex, Expression> entries;
    for (const MultiIndex& alpha : binary_multi_indices(v.dimension())) {
        entries.emplace(alpha, differentiate(v, alpha));
    }
    return DerivativeTuple<Expression>(v.dimension(), std::move(entries));
}

// D^beta of an assembled component, in closed form: differentiating under
// the composition cancels the integrals where beta_i = 1, kills the term
// when an axis was sliced (alpha_i = 0) but beta asks for a derivative, and
// leaves the remaining axis operations untouched.
inline Polynomial assemble_component_derivative(const Polynomial& h, const MultiIndex& alpha,
                                                const MultiIndex& beta) {
    if (alpha.dimension() != h.dimension() || beta.dimension() != h.dimension()) {
        throw std::invalid_argument("assemble_component_derivative: index dimension mismatch");
    }
    if (!alpha.is_binary() || !beta.is_binary()) {
        throw std::invalid_argument("assemble_component_derivative: indices must be binary");
    }
    for (int i = 1; i <= h.dimension(); ++i) {
        if (alpha[i] < beta[i]) return Polynomial(h.dimension());
    }
    Polynomial out = h;
    for (int i = h.dimension(); i >= 1; --i) {
        if (beta[i] == 1) continue;
        out = slice_or_integrate(out, i, alpha[i]);
    }
    return out;
}

}  // namespace polycert
