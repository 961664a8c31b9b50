#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace polycert {

// Exact rational scalar. All polynomial coefficients and exact evaluations
// use this type; double round-trips are exact (binary mantissa -> rational).
using Rational = mpq_class;

inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("rational_from_double: value is not finite");
    }
    Rational q;
    mpq_set_d(q.get_mpq_t(), x);
    return q;
}

// Parses "p", "-p", or "p/q" in base 10. Rejects empty strings, q == 0, and
// any trailing garbage; the result is canonicalized.
inline Rational rational_from_string(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("rational_from_string: empty string");
    }
    Rational q;
    if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0) {
        throw std::invalid_argument("rational_from_string: cannot parse \"" + text + "\"");
    }
    if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0) {
        throw std::invalid_argument("rational_from_string: zero denominator in \"" + text + "\"");
    }
    q.canonicalize();
    return q;
}

inline std::string rational_to_string(const Rational& q) {
    return q.get_str();
}

inline double rational_to_double(const Rational& q) {
    return q.get_d();
}

// Exact nonnegative integer power.
inline Rational rational_pow(const Rational& base, unsigned exponent) {
    Rational out(1);
    Rational acc = base;
    unsigned e = exponent;
    while (e > 0) {
        if (e & 1u) out *= acc;
        e >>= 1u;
        if (e > 0) acc *= acc;
    }
    return out;
}

}  // namespace polycert
