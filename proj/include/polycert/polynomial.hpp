#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "polycert/multi_index.hpp"
#include "polycert/rational.hpp"

namespace polycert {

// Closed infinity-norm ball of the given radius, centered at the origin.
struct Box {
    int dimension = 0;
    Rational radius = 1;

    Box(int dim, Rational r) : dimension(dim), radius(std::move(r)) {
        if (dimension < 1) throw std::invalid_argument("Box: dimension must be positive");
        if (radius <= 0) throw std::invalid_argument("Box: radius must be positive");
    }
};

// Sparse multivariate polynomial with exact rational coefficients.
// Terms are kept in a graded-lex map; zero coefficients are never stored,
// so structural equality is semantic equality.
class Polynomial {
  public:
    using TermMap = std::map<MultiIndex, Rational>;

    explicit Polynomial(int dimension) : dimension_(dimension) {
        if (dimension_ < 1) throw std::invalid_argument("Polynomial: dimension must be positive");
    }

    static Polynomial constant(int dimension, Rational c) {
        Polynomial p(dimension);
        p.add_term(MultiIndex::zero(dimension), std::move(c));
        return p;
    }

    // x_i, 1-based.
    static Polynomial variable(int dimension, int i) {
        Polynomial p(dimension);
        p.add_term(MultiIndex::unit(dimension, i), Rational(1));
        return p;
    }

    static Polynomial monomial(MultiIndex alpha, Rational c) {
        Polynomial p(alpha.dimension());
        p.add_term(std::move(alpha), std::move(c));
        return p;
    }

    // x1^2 + ... + xn^2.
    static Polynomial xtx(int dimension) {
        Polynomial p(dimension);
        for (int i = 1; i <= dimension; ++i) {
            p.add_term(MultiIndex::unit(dimension, i).plus(i), Rational(1));
        }
        return p;
    }

    int dimension() const { return dimension_; }

    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    uint64_t total_degree() const {
        uint64_t d = 0;
        for (const auto& [a, c] : terms_) d = std::max(d, a.one_norm());
        return d;
    }

    uint32_t degree_in(int i) const {
        uint32_t d = 0;
        for (const auto& [a, c] : terms_) d = std::max(d, a[i]);
        return d;
    }

    uint32_t max_variable_degree() const {
        uint32_t d = 0;
        for (const auto& [a, c] : terms_) d = std::max(d, a.inf_norm());
        return d;
    }

    Rational coeff(const MultiIndex& alpha) const {
        auto it = terms_.find(alpha);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(MultiIndex alpha, Rational c) {
        if (alpha.dimension() != dimension_) {
            throw std::invalid_argument("Polynomial: exponent dimension mismatch");
        }
        auto [it, inserted] = terms_.try_emplace(std::move(alpha), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        } else if (it->second == 0) {
            terms_.erase(it);
        }
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        check_same_dim(a, b);
        Polynomial out = a;
        for (const auto& [alpha, c] : b.terms_) out.add_term(alpha, c);
        return out;
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        check_same_dim(a, b);
        Polynomial out = a;
        for (const auto& [alpha, c] : b.terms_) out.add_term(alpha, -c);
        return out;
    }

    Polynomial operator-() const {
        Polynomial out(dimension_);
        for (const auto& [alpha, c] : terms_) out.terms_.emplace(alpha, -c);
        return out;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        check_same_dim(a, b);
        Polynomial out(a.dimension_);
        for (const auto& [aa, ca] : a.terms_) {
            for (const auto& [ab, cb] : b.terms_) {
                std::vector<uint32_t> e(static_cast<size_t>(a.dimension_));
                for (int i = 0; i < a.dimension_; ++i) {
                    e[static_cast<size_t>(i)] = aa.entries()[static_cast<size_t>(i)] +
                                                ab.entries()[static_cast<size_t>(i)];
                }
                out.add_term(MultiIndex(std::move(e)), ca * cb);
            }
        }
        return out;
    }

    friend Polynomial operator*(const Rational& c, const Polynomial& p) {
        Polynomial out(p.dimension_);
        if (c == 0) return out;
        for (const auto& [alpha, pc] : p.terms_) out.terms_.emplace(alpha, c * pc);
        return out;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.dimension_ == b.dimension_ && a.terms_ == b.terms_;
    }

    // Evaluation in double via per-variable power tables; the term order is
    // the canonical map order, so results are bitwise deterministic.
    double eval(const std::vector<double>& x) const {
        check_point_dim(x.size());
        std::vector<std::vector<double>> pows = power_tables<double>(x, 1.0);
        double sum = 0.0;
        for (const auto& [alpha, c] : terms_) {
            double t = rational_to_double(c);
            for (int i = 0; i < dimension_; ++i) {
                uint32_t e = alpha.entries()[static_cast<size_t>(i)];
                if (e > 0) t *= pows[static_cast<size_t>(i)][e];
            }
            sum += t;
        }
        return sum;
    }

    Rational eval_exact(const std::vector<Rational>& x) const {
        check_point_dim(x.size());
        std::vector<std::vector<Rational>> pows = power_tables<Rational>(x, Rational(1));
        Rational sum(0);
        for (const auto& [alpha, c] : terms_) {
            Rational t = c;
            for (int i = 0; i < dimension_; ++i) {
                uint32_t e = alpha.entries()[static_cast<size_t>(i)];
                if (e > 0) t *= pows[static_cast<size_t>(i)][e];
            }
            sum += t;
        }
        return sum;
    }

    // d/dx_i, 1-based.
    Polynomial diff(int i) const {
        check_var(i);
        Polynomial out(dimension_);
        for (const auto& [alpha, c] : terms_) {
            uint32_t e = alpha[i];
            if (e == 0) continue;
            out.terms_.emplace(alpha.minus(i), Rational(static_cast<long>(e)) * c);
        }
        return out;
    }

    Polynomial diff(const MultiIndex& alpha) const {
        if (alpha.dimension() != dimension_) {
            throw std::invalid_argument("Polynomial::diff: index dimension mismatch");
        }
        Polynomial out = *this;
        for (int i = 1; i <= dimension_; ++i) {
            for (uint32_t k = 0; k < alpha[i]; ++k) out = out.diff(i);
        }
        return out;
    }

    // Integral from 0 along x_i: x^e -> x^{e+1}/(e+1) in that variable.
    Polynomial integrate_from_zero(int i) const {
        check_var(i);
        Polynomial out(dimension_);
        for (const auto& [alpha, c] : terms_) {
            out.terms_.emplace(alpha.plus(i), c / Rational(static_cast<long>(alpha[i]) + 1));
        }
        return out;
    }

    // Substitutes x_i = 0 (keeps only terms with zero exponent in x_i).
    Polynomial substitute_zero(int i) const {
        check_var(i);
        Polynomial out(dimension_);
        for (const auto& [alpha, c] : terms_) {
            if (alpha[i] == 0) out.terms_.emplace(alpha, c);
        }
        return out;
    }

    // q with q(x) = p(x / r): each term is scaled by r^{-|alpha|}.
    Polynomial scale_domain(const Rational& r) const {
        if (r <= 0) throw std::invalid_argument("Polynomial::scale_domain: radius must be positive");
        Polynomial out(dimension_);
        for (const auto& [alpha, c] : terms_) {
            out.terms_.emplace(alpha, c / rational_pow(r, static_cast<unsigned>(alpha.one_norm())));
        }
        return out;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [alpha, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += rational_to_string(c);
            for (int i = 1; i <= dimension_; ++i) {
                if (alpha[i] == 0) continue;
                s += "*x" + std::to_string(i);
                if (alpha[i] > 1) s += "^" + std::to_string(alpha[i]);
            }
        }
        return s;
    }

  private:
    template <typename T>
    std::vector<std::vector<T>> power_tables(const std::vector<T>& x, T one) const {
        std::vector<std::vector<T>> pows(static_cast<size_t>(dimension_));
        for (int i = 1; i <= dimension_; ++i) {
            uint32_t d = degree_in(i);
            auto& tab = pows[static_cast<size_t>(i - 1)];
            tab.resize(d + 1, one);
            for (uint32_t e = 1; e <= d; ++e) tab[e] = tab[e - 1] * x[static_cast<size_t>(i - 1)];
        }
        return pows;
    }

    static void check_same_dim(const Polynomial& a, const Polynomial& b) {
        if (a.dimension_ != b.dimension_) {
            throw std::invalid_argument("Polynomial: dimension mismatch");
        }
    }

    void check_point_dim(size_t n) const {
        if (n != static_cast<size_t>(dimension_)) {
            throw std::invalid_argument("Polynomial: evaluation point dimension mismatch");
        }
    }

    void check_var(int i) const {
        if (i < 1 || i > dimension_) {
            throw std::invalid_argument("Polynomial: variable index out of range");
        }
    }

    int dimension_;
    TermMap terms_;
};

// Flattened copy of a polynomial with coefficients pre-converted to double,
// for tight grid-evaluation loops. Term order matches the canonical map
// order, so values agree bitwise with Polynomial::eval.
class CompiledPolynomial {
  public:
    explicit CompiledPolynomial(const Polynomial& p)
        : dimension_(p.dimension()), maxdeg_(static_cast<size_t>(p.dimension()), 0) {
        for (const auto& [alpha, c] : p.terms()) {
            exps_.push_back(alpha.entries());
            coeffs_.push_back(rational_to_double(c));
            for (size_t i = 0; i < maxdeg_.size(); ++i) {
                maxdeg_[i] = std::max(maxdeg_[i], alpha.entries()[i]);
            }
        }
        pows_.resize(maxdeg_.size());
        for (size_t i = 0; i < maxdeg_.size(); ++i) pows_[i].assign(maxdeg_[i] + 1, 1.0);
    }

    int dimension() const { return dimension_; }

    double eval(const std::vector<double>& x) const {
        for (size_t i = 0; i < pows_.size(); ++i) {
            for (uint32_t e = 1; e <= maxdeg_[i]; ++e) pows_[i][e] = pows_[i][e - 1] * x[i];
        }
        double sum = 0.0;
        for (size_t t = 0; t < coeffs_.size(); ++t) {
            double v = coeffs_[t];
            for (size_t i = 0; i < pows_.size(); ++i) {
                uint32_t e = exps_[t][i];
                if (e > 0) v *= pows_[i][e];
            }
            sum += v;
        }
        return sum;
    }

  private:
    int dimension_;
    std::vector<std::vector<uint32_t>> exps_;
    std::vector<double> coeffs_;
    std::vector<uint32_t> maxdeg_;
    mutable std::vector<std::vector<double>> pows_;
};

inline std::vector<Polynomial> gradient(const Polynomial& p) {
    std::vector<Polynomial> g;
    g.reserve(static_cast<size_t>(p.dimension()));
    for (int i = 1; i <= p.dimension(); ++i) g.push_back(p.diff(i));
    return g;
}

}  // namespace polycert
