#include <cmath>
#include <vector>

#include "doctest.h"
#include "dynkin/diffusion.hpp"
#include "dynkin/errors.hpp"
#include "dynkin/fundamental.hpp"
#include "dynkin/numeric.hpp"

using namespace dynkin;

TEST_CASE("driftless BM pair is exp(x), exp(-x) at r = 1/2") {
    const auto pair = solve_fundamental(make_bm(0.0, 1.0, 0.5));
    CHECK(pair.kind() == PairKind::closed_form);
    for (double x : {-3.0, -1.0, 0.0, 0.4, 2.5}) {
        CHECK(pair.psi(x) == doctest::Approx(std::exp(x)).epsilon(1e-13));
        CHECK(pair.phi(x) == doctest::Approx(std::exp(-x)).epsilon(1e-13));
        CHECK(pair.psi_deriv(x) == doctest::Approx(std::exp(x)).epsilon(1e-13));
        CHECK(pair.phi_deriv(x) == doctest::Approx(-std::exp(-x)).epsilon(1e-13));
    }
    CHECK(pair.wronskian() == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(pair.psi(0.0) == 1.0);  // normalised at x_ref
    CHECK(pair.phi(0.0) == 1.0);
}

TEST_CASE("BM with drift uses the characteristic roots") {
    const double mu = 0.25, r = 0.5;
    const auto pair = solve_fundamental(make_bm(mu, 1.0, r));
    const double s_plus = -mu + std::sqrt(mu * mu + 2.0 * r);
    const double s_minus = -mu - std::sqrt(mu * mu + 2.0 * r);
    for (double x : {-2.0, -0.3, 1.7}) {
        CHECK(pair.psi(x) == doctest::Approx(std::exp(s_plus * x)).epsilon(1e-12));
        CHECK(pair.phi(x) == doctest::Approx(std::exp(s_minus * x)).epsilon(1e-12));
    }
}

TEST_CASE("GBM pair is a power pair") {
    const double mu = 0.1, vol = 0.3, r = 0.5;
    const auto pair = solve_fundamental(make_gbm(mu, vol, r));
    CHECK(pair.kind() == PairKind::closed_form);
    // roots b of (1/2) vol^2 b (b - 1) + mu b = r
    const double a = 0.5 * vol * vol;
    const double bq = mu - a;
    const double b_plus = (-bq + std::sqrt(bq * bq + 4.0 * a * r)) / (2.0 * a);
    const double b_minus = (-bq - std::sqrt(bq * bq + 4.0 * a * r)) / (2.0 * a);
    for (double x : {0.2, 0.9, 1.0, 3.7}) {
        CHECK(pair.psi(x) == doctest::Approx(std::pow(x, b_plus)).epsilon(1e-12));
        CHECK(pair.phi(x) == doctest::Approx(std::pow(x, b_minus)).epsilon(1e-12));
    }
}

TEST_CASE("numerical branch reproduces the BM and GBM closed forms") {
    FundamentalOptions opts;
    opts.grid_n = 1024;
    opts.force_numerical = true;

    const auto bm_spec = make_bm(0.1, 0.8, 0.5);
    const auto closed = solve_fundamental(bm_spec);
    const auto numeric = solve_fundamental(bm_spec, opts);
    CHECK(numeric.kind() == PairKind::numerical);
    REQUIRE(numeric.diagnostics().has_value());
    for (double x : num::linspace(numeric.range_lo() + 0.1, numeric.range_hi() - 0.1, 33)) {
        CHECK(numeric.psi(x) == doctest::Approx(closed.psi(x)).epsilon(1e-6));
        CHECK(numeric.phi(x) == doctest::Approx(closed.phi(x)).epsilon(1e-6));
    }
    CHECK(numeric.diagnostics()->wronskian_spread < 1e-6);
    CHECK(std::abs(numeric.wronskian() - closed.wronskian()) <
          1e-6 * std::abs(closed.wronskian()));

    const auto gbm_spec = make_gbm(0.1, 0.3, 0.5);
    const auto gclosed = solve_fundamental(gbm_spec);
    const auto gnumeric = solve_fundamental(gbm_spec, opts);
    for (double x : num::linspace(gnumeric.range_lo() * 1.05, gnumeric.range_hi() * 0.95, 33)) {
        CHECK(gnumeric.psi(x) == doctest::Approx(gclosed.psi(x)).epsilon(1e-6));
        CHECK(gnumeric.phi(x) == doctest::Approx(gclosed.phi(x)).epsilon(1e-6));
    }
}

TEST_CASE("Bessel(3) pair matches sinh(x)/x and exp(-x)/x") {
    // at r = 1/2 the solutions normalised at x_ref = 1 are
    //   psi = sinh(x) / (x sinh 1),  phi = e^{1-x} / x
    const auto pair = solve_fundamental(make_bessel(3.0, 0.5));
    CHECK(pair.kind() == PairKind::numerical);
    const double s1 = std::sinh(1.0);
    for (double x : {0.05, 0.3, 1.0, 2.5, 6.0}) {
        CHECK(pair.psi(x) == doctest::Approx(std::sinh(x) / (x * s1)).epsilon(1e-6));
        CHECK(pair.phi(x) == doctest::Approx(std::exp(1.0 - x) / x).epsilon(1e-6));
    }
    CHECK(pair.wronskian() == doctest::Approx(std::exp(1.0) / s1).epsilon(1e-7));
}

TEST_CASE("BESQ(0) pair matches the Bessel-function closed forms") {
    // psi ~ sqrt(x) I_1(sqrt(2 r x)), phi ~ sqrt(x) K_1(sqrt(2 r x)),
    // both normalised at x_ref = 1. The exit boundary at 0 leaves psi with a
    // finite positive slope there, which the shooting anchor must respect.
    const double r = 0.5;
    const auto pair = solve_fundamental(make_besq(0.0, r));
    const auto psi_cf = [&](double x) {
        return std::sqrt(x) * std::cyl_bessel_i(1, std::sqrt(2.0 * r * x));
    };
    const auto phi_cf = [&](double x) {
        return std::sqrt(x) * std::cyl_bessel_k(1, std::sqrt(2.0 * r * x));
    };
    const double psi_ref = psi_cf(1.0), phi_ref = phi_cf(1.0);
    for (double x : {0.01, 0.2, 1.0, 3.0, 10.0}) {
        CHECK(pair.psi(x) == doctest::Approx(psi_cf(x) / psi_ref).epsilon(1e-6));
        CHECK(pair.phi(x) == doctest::Approx(phi_cf(x) / phi_ref).epsilon(1e-6));
    }
    // the refinement loop must stabilise quickly with the first-order anchor
    REQUIRE(pair.diagnostics().has_value());
    CHECK(pair.diagnostics()->refinements <= 4);
}

TEST_CASE("hitting-time transforms are psi and phi ratios") {
    const auto pair = solve_fundamental(make_bm(0.0, 1.0, 0.5));
    CHECK(laplace_hitting(pair, 0.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(laplace_hitting(pair, 2.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(laplace_hitting(pair, 1.0, 1.0) == doctest::Approx(1.0));
    // monotone in distance
    CHECK(laplace_hitting(pair, 0.0, 3.0) < laplace_hitting(pair, 0.0, 1.0));
}

TEST_CASE("transform context inverts itself") {
    const auto spec = make_bm(0.0, 1.0, 0.5);
    const auto pair = solve_fundamental(spec);
    const TransformContext ctx(spec, pair);
    for (double x : {-2.0, -0.5, 0.0, 1.3, 3.0}) {
        const double y = ctx.F(x);
        CHECK(y == doctest::Approx(std::exp(2.0 * x)).epsilon(1e-12));
        CHECK(ctx.F_inv(y) == doctest::Approx(x).epsilon(1e-10));
        // F' from the Wronskian identity vs the closed form 2 e^{2x}
        CHECK(ctx.F_deriv(x) == doctest::Approx(2.0 * std::exp(2.0 * x)).epsilon(1e-12));
    }
    CHECK(ctx.F(0.0) == doctest::Approx(1.0));  // psi/phi = 1 at x_ref

    // same round trip on a numerical pair
    const auto bspec = make_bessel(3.0, 0.5);
    const auto bpair = solve_fundamental(bspec);
    const TransformContext bctx(bspec, bpair);
    for (double x : {0.3, 1.0, 2.2}) {
        CHECK(bctx.F_inv(bctx.F(x)) == doctest::Approx(x).epsilon(1e-9));
    }
}

TEST_CASE("reference-point normalisation is a pure rescaling") {
    const auto pa = solve_fundamental(make_bessel(3.0, 0.5, 1.0));
    const auto pb = solve_fundamental(make_bessel(3.0, 0.5, 2.0));
    const double c_psi = pb.psi(1.5) / pa.psi(1.5);
    const double c_phi = pb.phi(1.5) / pa.phi(1.5);
    for (double x : {0.4, 0.9, 3.0}) {
        CHECK(pb.psi(x) / pa.psi(x) == doctest::Approx(c_psi).epsilon(1e-7));
        CHECK(pb.phi(x) / pa.phi(x) == doctest::Approx(c_phi).epsilon(1e-7));
    }
    CHECK(pb.psi(2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pb.phi(2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("resolvent of a constant is the constant over r") {
    const auto spec = make_bm(0.0, 1.0, 0.5);
    const auto pair = solve_fundamental(spec);
    const double v = resolvent_eval(spec, pair, [](double) { return 1.0; }, 0.3);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-7));  // 1 / r

    // a function growing faster than psi toward +inf diverges
    const auto probe =
        resolvent_probe(spec, pair, [](double x) { return std::exp(3.0 * std::abs(x)); }, 0.0);
    CHECK(probe.divergent);
    CHECK_THROWS_AS(
        resolvent_eval(spec, pair, [](double x) { return std::exp(3.0 * std::abs(x)); }, 0.0),
        IntegralDivergence);
}
