#include <catch2/catch_amalgamated.hpp>

#include "polycert/polynomial.hpp"
#include "test_support.hpp"

using namespace polycert;
using test_support::Rng;

TEST_CASE("multi-index ordering is graded lexicographic") {
    MultiIndex a({0, 2}), b({1, 1}), c({2, 0}), d({1, 0});
    REQUIRE(d < a);
    REQUIRE(a < b);
    REQUIRE(b < c);
    REQUIRE(MultiIndex::zero(2) < d);
    REQUIRE(a.one_norm() == 2);
    REQUIRE(c.inf_norm() == 2);
    REQUIRE(b.is_binary());
    REQUIRE_FALSE(c.is_binary());
}

TEST_CASE("binary index enumeration is complete and sorted") {
    auto idx = binary_multi_indices(3);
    REQUIRE(idx.size() == 8);
    REQUIRE(idx.front() == MultiIndex::zero(3));
    REQUIRE(idx.back() == MultiIndex({1, 1, 1}));
    for (size_t k = 1; k < idx.size(); ++k) REQUIRE(idx[k - 1] < idx[k]);
}

TEST_CASE("polynomial evaluation") {
    // x1^2 x2 + 3 at (1, 1) and at the origin.
    Polynomial p(2);
    p.add_term(MultiIndex({2, 1}), Rational(1));
    p.add_term(MultiIndex({0, 0}), Rational(3));
    REQUIRE(p.eval({1.0, 1.0}) == 4.0);
    REQUIRE(p.eval({0.0, 0.0}) == 3.0);

    Polynomial ss = Polynomial::xtx(3);
    REQUIRE(ss.eval({1.0, -1.0, 2.0}) == 6.0);
    REQUIRE(ss.eval_exact({Rational(1, 2), Rational(0), Rational(0)}) == Rational(1, 4));
}

TEST_CASE("compiled evaluation matches term-by-term evaluation") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Polynomial p = test_support::random_polynomial(rng, 2, 3);
        CompiledPolynomial fast(p);
        for (int k = 0; k < 5; ++k) {
            auto x = test_support::random_point(rng, 2, 1.0);
            REQUIRE(fast.eval(x) == p.eval(x));
        }
    }
}

TEST_CASE("differentiation and the two directional primitives") {
    // d/dx1 of x1^2 x2 = 2 x1 x2; differentiating a constant gives 0.
    Polynomial p(2);
    p.add_term(MultiIndex({2, 1}), Rational(1));
    Polynomial dp = p.diff(1);
    Polynomial expected(2);
    expected.add_term(MultiIndex({1, 1}), Rational(2));
    REQUIRE(dp == expected);
    REQUIRE(Polynomial::constant(2, Rational(5)).diff(1).is_zero());
    REQUIRE(Polynomial::monomial(MultiIndex({0, 3}), Rational(1)).diff(1).is_zero());

    // Integration from zero: 1 -> x1, 2 x1 -> x1^2, x1 x2^2 -> x1 x2^3 / 3.
    REQUIRE(Polynomial::constant(2, Rational(1)).integrate_from_zero(1) ==
            Polynomial::variable(2, 1));
    Polynomial two_x1(2);
    two_x1.add_term(MultiIndex({1, 0}), Rational(2));
    REQUIRE(two_x1.integrate_from_zero(1) ==
            Polynomial::monomial(MultiIndex({2, 0}), Rational(1)));
    REQUIRE(Polynomial::monomial(MultiIndex({1, 2}), Rational(1)).integrate_from_zero(2) ==
            Polynomial::monomial(MultiIndex({1, 3}), Rational(1, 3)));

    // Substitution of zero keeps only the terms free of that variable.
    Polynomial q(2);
    q.add_term(MultiIndex({1, 1}), Rational(2));
    q.add_term(MultiIndex({0, 2}), Rational(-1));
    REQUIRE(q.substitute_zero(1) == Polynomial::monomial(MultiIndex({0, 2}), Rational(-1)));
}

TEST_CASE("derivative inverts integration exactly") {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + trial % 3;
        Polynomial p = test_support::random_polynomial(rng, n, 3);
        int i = 1 + trial % n;
        REQUIRE(p.integrate_from_zero(i).diff(i) == p);
        // Fundamental identity the reconstruction operator relies on:
        // integrating the derivative recovers p minus its zero slice.
        REQUIRE(p.diff(i).integrate_from_zero(i) == p - p.substitute_zero(i));
    }
}

TEST_CASE("domain rescaling") {
    // q(x) = p(x / r): x1^2 with r = 2 becomes x1^2 / 4.
    Polynomial p = Polynomial::monomial(MultiIndex({2}), Rational(1));
    REQUIRE(p.scale_domain(Rational(2)) == Polynomial::monomial(MultiIndex({2}), Rational(1, 4)));
    REQUIRE(p.scale_domain(Rational(1)) == p);

    Polynomial mixed = Polynomial::monomial(MultiIndex({1, 1}), Rational(1));
    REQUIRE(mixed.scale_domain(Rational(1, 2)) ==
            Polynomial::monomial(MultiIndex({1, 1}), Rational(4)));

    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        Polynomial f = test_support::random_polynomial(rng, 2, 3);
        Polynomial g = f.scale_domain(Rational(3, 2));
        std::vector<Rational> x = {Rational(3, 4), Rational(-3, 8)};
        std::vector<Rational> x_over_r = {Rational(1, 2), Rational(-1, 4)};
        REQUIRE(g.eval_exact(x) == f.eval_exact(x_over_r));
    }
}

TEST_CASE("ring operations and canonical form") {
    Polynomial x1 = Polynomial::variable(2, 1);
    Polynomial x2 = Polynomial::variable(2, 2);
    REQUIRE((x1 + (-x1)).is_zero());
    REQUIRE((x1 + x2) * (x1 - x2) == x1 * x1 - x2 * x2);

    // No zero coefficients survive arithmetic.
    Polynomial diff = (x1 * x2 + x1) - x1 * x2;
    REQUIRE(diff == x1);
    REQUIRE(diff.terms().size() == 1);

    Rng rng(29);
    for (int trial = 0; trial < 15; ++trial) {
        Polynomial a = test_support::random_polynomial(rng, 2, 2);
        Polynomial b = test_support::random_polynomial(rng, 2, 2);
        Polynomial c = test_support::random_polynomial(rng, 2, 2);
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a + b == b + a);
    }
}

TEST_CASE("exact rational coefficients round-trip through doubles") {
    REQUIRE(rational_from_double(0.5) == Rational(1, 2));
    REQUIRE(rational_from_double(0.1) == Rational(mpz_class("3602879701896397"), mpz_class("36028797018963968")));
    REQUIRE(rational_from_string("-3/4") == Rational(-3, 4));
    REQUIRE_THROWS_AS(rational_from_string("3/0"), std::invalid_argument);
    REQUIRE_THROWS_AS(rational_from_string("abc"), std::invalid_argument);
}

TEST_CASE("box validation") {
    REQUIRE_THROWS_AS(Box(2, Rational(0)), std::invalid_argument);
    REQUIRE_THROWS_AS(Box(2, Rational(-1)), std::invalid_argument);
    REQUIRE_THROWS_AS(Box(0, Rational(1)), std::invalid_argument);
    Box b(3, Rational(1, 2));
    REQUIRE(b.dimension == 3);
}

TEST_CASE("degree queries") {
    Polynomial p(2);
    p.add_term(MultiIndex({3, 1}), Rational(1));
    p.add_term(MultiIndex({0, 2}), Rational(1));
    REQUIRE(p.total_degree() == 4);
    REQUIRE(p.degree_in(1) == 3);
    REQUIRE(p.degree_in(2) == 2);
    REQUIRE(p.max_variable_degree() == 3);
}
