#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dynkin/errors.hpp"
#include "dynkin/numeric.hpp"

using namespace dynkin;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("bisect finds simple roots") {
    const double root = num::bisect([](double x) { return std::cos(x); }, 0.0, 2.0);
    CHECK(root == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    const double cube = num::bisect([](double x) { return x * x * x - 5.0; }, 0.0, 3.0);
    CHECK(cube == doctest::Approx(std::cbrt(5.0)).epsilon(1e-12));
    CHECK_THROWS_AS(num::bisect([](double x) { return x * x + 1.0; }, 0.0, 1.0),
                    BracketFailure);
}

TEST_CASE("bracket expansion doubles its probe step") {
    const auto f = [](double x) { return x - 10.0; };
    const num::Bracket up = num::expand_up(f, 0.0, 0.5);
    CHECK(up.lo < 10.0);
    CHECK(up.hi >= 10.0);
    CHECK(up.f_lo < 0.0);
    CHECK(up.f_hi >= 0.0);

    const auto g = [](double x) { return x + 3.0; };
    const num::Bracket dn = num::expand_down(g, 0.0, 0.5);
    CHECK(dn.lo <= -3.0);
    CHECK(dn.hi > -3.0);

    // a function bounded away from zero must give up rather than loop
    CHECK_THROWS_AS(num::expand_up([](double x) { return 1.0 + x; }, 0.0, 1.0, 20),
                    BracketFailure);
}

TEST_CASE("proper integrals against closed forms") {
    CHECK(num::integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(num::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(num::integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("improper integrals converge or flag divergence") {
    const auto decay = num::integrate_improper([](double x) { return std::exp(-x); }, 0.0, kInf);
    CHECK(decay.converged);
    CHECK(decay.value == doctest::Approx(1.0).epsilon(1e-8));

    // integrable singularity at the finite endpoint; the result is reported
    // in left-to-right orientation regardless of which side is singular
    const auto invsqrt =
        num::integrate_improper([](double x) { return 1.0 / std::sqrt(x); }, 1.0, 0.0);
    CHECK(invsqrt.converged);
    CHECK(invsqrt.value == doctest::Approx(2.0).epsilon(1e-8));

    const auto harmonic = num::integrate_improper([](double x) { return 1.0 / x; }, 1.0, kInf);
    CHECK_FALSE(harmonic.converged);
    CHECK(harmonic.looks_divergent());

    const auto pole = num::integrate_improper([](double x) { return 1.0 / x; }, 1.0, 0.0);
    CHECK_FALSE(pole.converged);
    CHECK(pole.looks_divergent());
}

TEST_CASE("Hermite interpolation reproduces cubics exactly") {
    const auto f = [](double x) { return x * x * x - 2.0 * x + 1.0; };
    const auto df = [](double x) { return 3.0 * x * x - 2.0; };
    std::vector<double> xs = num::linspace(-1.0, 2.0, 7);
    std::vector<double> ys, ds;
    for (double x : xs) {
        ys.push_back(f(x));
        ds.push_back(df(x));
    }
    const num::HermiteInterp interp(xs, ys, ds);
    for (double x : num::linspace(-1.0, 2.0, 41)) {
        CHECK(interp.eval(x) == doctest::Approx(f(x)).epsilon(1e-12));
        CHECK(interp.eval_deriv(x) == doctest::Approx(df(x)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("monotone clamp prevents overshoot between nodes") {
    // increasing node values but one wildly wrong derivative
    std::vector<double> xs = {0.0, 1.0, 2.0, 3.0};
    std::vector<double> ys = {0.0, 1.0, 1.05, 2.0};
    std::vector<double> ds = {1.0, 8.0, 8.0, 1.0};  // way above the local secants
    const num::HermiteInterp interp(xs, ys, ds, /*enforce_monotone=*/true);
    double prev = interp.eval(0.0);
    for (double x : num::linspace(0.0, 3.0, 301)) {
        const double v = interp.eval(x);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    CHECK_THROWS_AS(num::HermiteInterp({0.0, 0.0, 1.0}, {0, 1, 2}, {1, 1, 1}), DomainError);
    CHECK_THROWS_AS(num::HermiteInterp({0.0}, {0.0}, {1.0}), DomainError);
}

TEST_CASE("grids hit their endpoints") {
    const auto lin = num::linspace(-2.0, 3.0, 11);
    CHECK(lin.size() == 11);
    CHECK(lin.front() == -2.0);
    CHECK(lin.back() == 3.0);
    CHECK(lin[1] - lin[0] == doctest::Approx(0.5));

    const auto lg = num::logspace(0.01, 100.0, 5);
    CHECK(lg.size() == 5);
    CHECK(lg.front() == doctest::Approx(0.01));
    CHECK(lg.back() == doctest::Approx(100.0));
    CHECK(lg[2] == doctest::Approx(1.0));  // geometric midpoint
}

TEST_CASE("pairwise summation keeps cancellation small") {
    std::vector<double> xs(100000, 0.1);
    CHECK(std::abs(num::pairwise_sum(xs) - 10000.0) < 1e-9);
    std::vector<double> empty;
    CHECK(num::pairwise_sum(empty) == 0.0);
}

TEST_CASE("accumulator matches closed-form moments") {
    num::Accumulator acc;
    for (double v : {1.0, 2.0, 3.0, 4.0}) acc.push(v);
    CHECK(acc.count() == 4);
    CHECK(acc.mean() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(acc.variance() == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK(acc.std_error() == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-14));
}

TEST_CASE("one-sided derivatives are second order") {
    // Richardson over the steps h and h/2 leaves an error of h^2 f'''/12
    const auto f = [](double x) { return std::exp(x); };
    CHECK(num::one_sided_deriv(f, 0.0, 1e-3, +1) == doctest::Approx(1.0).epsilon(5e-7));
    CHECK(num::one_sided_deriv(f, 0.0, 1e-3, -1) == doctest::Approx(1.0).epsilon(5e-7));
    CHECK(num::one_sided_deriv(f, 0.0, 1e-4, +1) == doctest::Approx(1.0).epsilon(5e-9));
    // a function only defined on one side still works from that side
    const auto g = [](double x) { return std::sqrt(x); };
    CHECK(num::one_sided_deriv(g, 1.0, 1e-4, +1) == doctest::Approx(0.5).epsilon(1e-8));
}
