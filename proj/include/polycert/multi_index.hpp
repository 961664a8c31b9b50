#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace polycert {

// Exponent / derivative-order tuple over a fixed number of variables.
// Ordering is graded lexicographic: lower total order first, ties broken
// lexicographically with the first coordinate most significant. This is the
// canonical term order used everywhere (serialization, CSV columns, tuples).
class MultiIndex {
  public:
    MultiIndex() = default;

    explicit MultiIndex(std::vector<uint32_t> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) {
            throw std::invalid_argument("MultiIndex: dimension must be positive");
        }
    }

    static MultiIndex zero(int dimension) {
        return MultiIndex(std::vector<uint32_t>(static_cast<size_t>(dimension), 0));
    }

    // Unit index e_i, 1-based coordinate.
    static MultiIndex unit(int dimension, int i) {
        MultiIndex a = zero(dimension);
        a.entries_.at(static_cast<size_t>(i - 1)) = 1;
        return a;
    }

    int dimension() const { return static_cast<int>(entries_.size()); }

    // 1-based coordinate access.
    uint32_t operator[](int i) const { return entries_.at(static_cast<size_t>(i - 1)); }

    uint32_t& at(int i) { return entries_.at(static_cast<size_t>(i - 1)); }

    const std::vector<uint32_t>& entries() const { return entries_; }

    uint64_t one_norm() const {
        return std::accumulate(entries_.begin(), entries_.end(), uint64_t{0});
    }

    uint32_t inf_norm() const {
        uint32_t m = 0;
        for (uint32_t e : entries_) m = e > m ? e : m;
        return m;
    }

    bool is_zero() const { return one_norm() == 0; }

    // True when every entry is 0 or 1 (the index selects a slice/integral mix).
    bool is_binary() const {
        for (uint32_t e : entries_) {
            if (e > 1) return false;
        }
        return true;
    }

    MultiIndex plus(int i, uint32_t delta = 1) const {
        MultiIndex a = *this;
        a.at(i) += delta;
        return a;
    }

    MultiIndex minus(int i, uint32_t delta = 1) const {
        MultiIndex a = *this;
        if (a[i] < delta) throw std::invalid_argument("MultiIndex: negative entry");
        a.at(i) -= delta;
        return a;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;

    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
        if (auto c = a.one_norm() <=> b.one_norm(); c != 0) return c;
        return a.entries_ <=> b.entries_;
    }

    std::string to_string() const {
        std::string s = "(";
        for (size_t k = 0; k < entries_.size(); ++k) {
            if (k > 0) s += ",";
            s += std::to_string(entries_[k]);
        }
        s += ")";
        return s;
    }

  private:
    std::vector<uint32_t> entries_;
};

// All 2^n binary multi-indices of the given dimension, graded-lex sorted.
inline std::vector<MultiIndex> binary_multi_indices(int dimension) {
    if (dimension < 1 || dimension > 30) {
        throw std::invalid_argument("binary_multi_indices: dimension out of range");
    }
    std::vector<MultiIndex> out;
    out.reserve(size_t{1} << dimension);
    for (uint32_t mask = 0; mask < (uint32_t{1} << dimension); ++mask) {
        std::vector<uint32_t> e(static_cast<size_t>(dimension), 0);
        for (int i = 0; i < dimension; ++i) e[static_cast<size_t>(i)] = (mask >> i) & 1u;
        out.emplace_back(std::move(e));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace polycert
