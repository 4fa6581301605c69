#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "dynkin/errors.hpp"
#include "dynkin/expression.hpp"

using dynkin::EvalError;
using dynkin::Expression;
using dynkin::ParseError;

TEST_CASE("arithmetic grammar") {
    CHECK(Expression::parse("2 + 3 * x").eval(4.0) == doctest::Approx(14.0));
    CHECK(Expression::parse("(2 + 3) * x").eval(4.0) == doctest::Approx(20.0));
    CHECK(Expression::parse("1 - 2 - 3").eval(0.0) == doctest::Approx(-4.0));  // left assoc
    CHECK(Expression::parse("12 / 4 / 3").eval(0.0) == doctest::Approx(1.0));
    CHECK(Expression::parse("2 ^ 3 ^ 2").eval(0.0) == doctest::Approx(512.0));  // right assoc
    CHECK(Expression::parse("-x ^ 2").eval(3.0) == doctest::Approx(-9.0));      // unary binds last
    CHECK(Expression::parse("(-x) ^ 2").eval(3.0) == doctest::Approx(9.0));
    CHECK(Expression::parse("--x").eval(5.0) == doctest::Approx(5.0));
    CHECK(Expression::parse("1e-3 + 2.5E2").eval(0.0) == doctest::Approx(250.001));
    CHECK(Expression::parse("x").eval(-7.25) == -7.25);
}

TEST_CASE("function library") {
    CHECK(Expression::parse("exp(1)").eval(0.0) == doctest::Approx(std::exp(1.0)));
    CHECK(Expression::parse("log(exp(2))").eval(0.0) == doctest::Approx(2.0));
    CHECK(Expression::parse("sqrt(x)").eval(9.0) == doctest::Approx(3.0));
    CHECK(Expression::parse("sin(x)^2 + cos(x)^2").eval(0.83) == doctest::Approx(1.0));
    CHECK(Expression::parse("cosh(x)^2 - sinh(x)^2").eval(1.3) == doctest::Approx(1.0));
    CHECK(Expression::parse("tanh(x)").eval(0.5) == doctest::Approx(std::tanh(0.5)));
    CHECK(Expression::parse("abs(x)").eval(-3.5) == doctest::Approx(3.5));
    CHECK(Expression::parse("pow(x, 3)").eval(2.0) == doctest::Approx(8.0));
    CHECK(Expression::parse("pow(2, x)").eval(10.0) == doctest::Approx(1024.0));
}

TEST_CASE("parse errors carry 1-based columns") {
    const auto column_of = [](const char* text) -> std::size_t {
        try {
            Expression::parse(text);
        } catch (const ParseError& e) {
            return e.column;
        }
        return 0;  // parsed cleanly: fail the expectation below
    };
    CHECK(column_of("x *") == 4);       // operand missing at end of input
    CHECK(column_of("x ^") == 4);
    CHECK(column_of("1 + (2") == 7);    // unclosed paren reported at the gap
    CHECK(column_of("foo(x)") == 1);    // unknown identifier at its start
    CHECK(column_of("2 ** 3") == 4);    // second star begins nothing
    CHECK(column_of("") == 1);
    CHECK(column_of("1 + 2)") != 0);    // trailing garbage is an error too
}

TEST_CASE("domain failures raise EvalError") {
    CHECK_THROWS_AS(Expression::parse("log(x)").eval(-1.0), EvalError);
    CHECK_THROWS_AS(Expression::parse("sqrt(x)").eval(-4.0), EvalError);
    CHECK_THROWS_AS(Expression::parse("1 / x").eval(0.0), EvalError);
    CHECK_THROWS_AS(Expression::parse("x / (x - 2)").eval(2.0), EvalError);
    // well inside the domain nothing throws
    CHECK_NOTHROW(Expression::parse("log(x) + sqrt(x) + 1 / x").eval(0.5));
}

TEST_CASE("symbolic derivative matches central differences") {
    const char* exprs[] = {
        "exp(-x^2 / 2) * sin(3 * x)",
        "tanh(x) - 0.5 * tanh(x - 1)",
        "x^3 - 2 * x + 7",
        "log(1 + x^2) / (2 + cos(x))",
        "sqrt(1 + x^2) * exp(0.3 * x)",
        "pow(1 + x^2, 0.75)",
        "sinh(x / 2) + cosh(x / 3)",
    };
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> pick(-2.0, 2.0);
    for (const char* text : exprs) {
        const Expression f = Expression::parse(text);
        const Expression df = f.derivative();
        for (int i = 0; i < 15; ++i) {
            const double x = pick(rng);
            const double h = 1e-5;
            const double fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            CHECK(df.eval(x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("derivative of abs is refused") {
    const Expression f = Expression::parse("abs(x - 1)");
    CHECK_THROWS_AS(f.derivative(), EvalError);
    // buteval is fine on both sides of the kink
    CHECK(f.eval(0.0) == doctest::Approx(1.0));
}

TEST_CASE("to_string round-trips through the parser") {
    const char* exprs[] = {
        "2 + 3 * x ^ 2",
        "-exp(-x) * (1 + x)",
        "tanh(x - 1) - 0.8",
        "pow(x, 1.5) / (1 + x)",
        "sin(cos(x))",
    };
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> pick(0.1, 2.0);
    for (const char* text : exprs) {
        const Expression f = Expression::parse(text);
        const Expression g = Expression::parse(f.to_string());
        for (int i = 0; i < 10; ++i) {
            const double x = pick(rng);
            CHECK(g.eval(x) == doctest::Approx(f.eval(x)).epsilon(1e-14));
        }
    }
}

TEST_CASE("constant detection folds literals") {
    double v = 0.0;
    CHECK(Expression::parse("3 * 4 + 1").is_constant(&v));
    CHECK(v == doctest::Approx(13.0));
    CHECK(Expression::parse("exp(0.5)").is_constant(&v));
    CHECK(v == doctest::Approx(std::exp(0.5)));
    CHECK_FALSE(Expression::parse("x - x").is_constant());  // structural, not algebraic
    CHECK(Expression::parse("0 * x").is_constant(&v));      // but zero products do fold
    CHECK(v == 0.0);
    CHECK(Expression::constant(2.5).is_constant(&v));
    CHECK(v == 2.5);
    CHECK_FALSE(Expression::variable().is_constant());
}
