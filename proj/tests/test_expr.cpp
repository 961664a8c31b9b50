#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "polycert/expr.hpp"
#include "test_support.hpp"

using namespace polycert;
using test_support::Rng;

TEST_CASE("parsing and evaluation of basic expressions") {
    Expression e = parse_expression("x1*x2", 2);
    REQUIRE(evaluate(e, {0.5, -0.5}) == -0.25);

    Expression f = parse_expression("exp(-x1^2)*sin(x2)", 2);
    REQUIRE(evaluate(f, {0.0, 0.0}) == 0.0);

    Expression g = parse_expression("ln(1 + x1^2 + x2^2)", 2);
    REQUIRE(evaluate(g, {0.0, 0.0}) == 0.0);

    // Decimal literals convert exactly.
    Expression h = parse_expression("0.25*x1", 1);
    REQUIRE(evaluate(h, {1.0}) == 0.25);

    // Exponentiation binds tighter than unary minus.
    REQUIRE(evaluate(parse_expression("-x1^2", 1), {2.0}) == -4.0);
    REQUIRE(evaluate(parse_expression("(1 - x1)^3", 1), {3.0}) == -8.0);
    REQUIRE(evaluate(parse_expression("x1^-1", 1), {4.0}) == 0.25);
}

TEST_CASE("parse errors carry positions and messages") {
    try {
        parse_expression("x1 + ", 2);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.position == 5);
    }
    REQUIRE_THROWS_AS(parse_expression("x0 + 1", 2), ParseError);
    REQUIRE_THROWS_AS(parse_expression("x3", 2), ParseError);
    REQUIRE_THROWS_AS(parse_expression("tan(x1)", 1), ParseError);
    REQUIRE_THROWS_AS(parse_expression("x1^1.5", 1), ParseError);
    REQUIRE_THROWS_AS(parse_expression("x1 @ x2", 2), ParseError);
    REQUIRE_THROWS_AS(parse_expression("(x1", 1), ParseError);
    REQUIRE_THROWS_AS(parse_expression("x1 x2", 2), ParseError);
}

TEST_CASE("evaluation domain errors name the offending subexpression") {
    Expression inv = parse_expression("1/x1", 1);
    try {
        evaluate(inv, {0.0});
        FAIL("expected a domain error");
    } catch (const EvalError& e) {
        REQUIRE(e.subexpression.find("x1") != std::string::npos);
    }
    REQUIRE_THROWS_AS(evaluate(parse_expression("ln(x1)", 1), {-1.0}), EvalError);
    REQUIRE_THROWS_AS(evaluate(parse_expression("ln(x1)", 1), {0.0}), EvalError);
    REQUIRE_THROWS_AS(evaluate(parse_expression("sqrt(x1)", 1), {-0.5}), EvalError);
    REQUIRE_THROWS_AS(evaluate(parse_expression("x1^-2", 1), {0.0}), EvalError);
}

TEST_CASE("symbolic differentiation matches closed forms") {
    // D^(1,1) of x1^2 x2 is 2 x1.
    Expression e = parse_expression("x1^2*x2", 2);
    Expression d = differentiate(e, MultiIndex({1, 1}));
    Rng rng(5);
    for (int k = 0; k < 10; ++k) {
        auto x = test_support::random_point(rng, 2, 2.0);
        REQUIRE(evaluate(d, x) == Catch::Approx(2.0 * x[0]).margin(1e-12));
    }

    // Zero index is the identity.
    Expression same = differentiate(e, MultiIndex::zero(2));
    auto x = test_support::random_point(rng, 2, 1.0);
    REQUIRE(evaluate(same, x) == evaluate(e, x));

    // Third derivative of exp(2 x1) is 8 exp(2 x1).
    Expression tri = differentiate(
        differentiate(differentiate(parse_expression("exp(2*x1)", 1), 1), 1), 1);
    REQUIRE(evaluate(tri, {0.3}) == Catch::Approx(8.0 * std::exp(0.6)).epsilon(1e-12));

    // Quotient, square root, and logarithm rules.
    Expression q = differentiate(parse_expression("x1/(1 + x1^2)", 1), 1);
    double t = 0.7;
    REQUIRE(evaluate(q, {t}) ==
            Catch::Approx((1 - t * t) / ((1 + t * t) * (1 + t * t))).epsilon(1e-12));
    Expression s = differentiate(parse_expression("sqrt(1 + x1^2)", 1), 1);
    REQUIRE(evaluate(s, {t}) == Catch::Approx(t / std::sqrt(1 + t * t)).epsilon(1e-12));
    Expression l = differentiate(parse_expression("ln(1 + x1^2)", 1), 1);
    REQUIRE(evaluate(l, {t}) == Catch::Approx(2 * t / (1 + t * t)).epsilon(1e-12));
}

TEST_CASE("mixed partials commute on random smooth expressions") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        Expression e = test_support::random_smooth_expression(rng, 2, 3);
        Expression dxy = differentiate(differentiate(e, 1), 2);
        Expression dyx = differentiate(differentiate(e, 2), 1);
        for (int k = 0; k < 4; ++k) {
            auto x = test_support::random_point(rng, 2, 1.0);
            double a = evaluate(dxy, x);
            double b = evaluate(dyx, x);
            REQUIRE(a == Catch::Approx(b).margin(1e-9 * (1.0 + std::abs(a))));
        }
    }
}

TEST_CASE("symbolic derivatives agree with finite differences") {
    Rng rng(9);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        Expression e = test_support::random_smooth_expression(rng, 2, 3);
        int i = 1 + trial % 2;
        Expression de = differentiate(e, i);
        auto x = test_support::random_point(rng, 2, 0.9);
        auto xp = x, xm = x;
        xp[static_cast<size_t>(i - 1)] += h;
        xm[static_cast<size_t>(i - 1)] -= h;
        double fd = (evaluate(e, xp) - evaluate(e, xm)) / (2 * h);
        double sym = evaluate(de, x);
        REQUIRE(sym == Catch::Approx(fd).margin(1e-5 * (1.0 + std::abs(sym))));
    }
}

TEST_CASE("printing round-trips through the parser") {
    Rng rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        Expression e = test_support::random_smooth_expression(rng, 2, 3);
        Expression back = parse_expression(to_string(e), 2);
        for (int k = 0; k < 4; ++k) {
            auto x = test_support::random_point(rng, 2, 1.0);
            REQUIRE(evaluate(back, x) == Catch::Approx(evaluate(e, x)).margin(1e-12));
        }
    }
    // Fixed samples with every operator.
    for (const char* text : {"x1 - (x2 - 1)", "-x1*x2", "(x1 + x2)^3", "1/(2 + sin(x1))",
                             "sqrt(2 + cos(x1*x2))", "exp(x1)*ln(2 + x2^2)", "x1^-2 - x2"}) {
        Expression e = parse_expression(text, 2);
        Expression back = parse_expression(to_string(e), 2);
        std::vector<double> x = {0.37, -0.61};
        REQUIRE(evaluate(back, x) == Catch::Approx(evaluate(e, x)).margin(1e-12));
    }
}

TEST_CASE("constant folding stays rational and annihilates zeros") {
    // (1/3 + 1/6) folds to 1/2 exactly.
    Expression e = parse_expression("(1/3 + 1/6)*x1", 1);
    REQUIRE(evaluate(e, {2.0}) == 1.0);
    // x1^0 folds to 1; 0 * exp(x1) folds to 0.
    REQUIRE(evaluate(parse_expression("x1^0", 1), {5.0}) == 1.0);
    REQUIRE(to_string(parse_expression("0*exp(x1)", 1)) == "0");
    REQUIRE(to_string(parse_expression("x1 + 0", 1)) == "x1");
}

TEST_CASE("input scaling substitutes r times the variable") {
    Expression e = parse_expression("exp(x1)*x2", 2);
    Expression scaled = scale_input(e, Rational(2));
    REQUIRE(evaluate(scaled, {0.5, 0.25}) ==
            Catch::Approx(std::exp(1.0) * 0.5).epsilon(1e-14));
}

TEST_CASE("exact polynomial conversion") {
    auto p = try_polynomial(parse_expression("(x1 + x2)^2 - x1*x2/2", 2));
    REQUIRE(p.has_value());
    REQUIRE(p->coeff(MultiIndex({1, 1})) == Rational(3, 2));
    REQUIRE(p->coeff(MultiIndex({2, 0})) == Rational(1));

    REQUIRE_FALSE(try_polynomial(parse_expression("sin(x1)", 1)).has_value());
    REQUIRE_FALSE(try_polynomial(parse_expression("1/x1", 1)).has_value());
    REQUIRE_FALSE(try_polynomial(parse_expression("x1^-1", 1)).has_value());
    REQUIRE(try_polynomial(parse_expression("x1/4", 1)).has_value());
}
