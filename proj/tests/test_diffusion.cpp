#include <cmath>
#include <limits>

#include "doctest.h"
#include "dynkin/diffusion.hpp"
#include "dynkin/errors.hpp"

using namespace dynkin;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("preset construction pins intervals and classes") {
    const auto bm = make_bm(0.1, 0.7, 0.5);
    CHECK(bm.x_lo == -kInf);
    CHECK(bm.x_hi == kInf);
    CHECK(bm.x_ref == 0.0);
    CHECK(bm.boundary_lo == BoundaryClass::natural);
    CHECK(bm.boundary_hi == BoundaryClass::natural);
    CHECK(bm.mu(3.0) == doctest::Approx(0.1));
    CHECK(bm.sigma(3.0) == doctest::Approx(0.7));
    CHECK(bm.sigma2(3.0) == doctest::Approx(0.49));

    const auto gbm = make_gbm(0.1, 0.3, 0.5);
    CHECK(gbm.x_lo == 0.0);
    CHECK(gbm.x_hi == kInf);
    CHECK(gbm.x_ref == 1.0);
    CHECK(gbm.boundary_lo == BoundaryClass::natural);
    CHECK(gbm.mu(2.0) == doctest::Approx(0.2));
    CHECK(gbm.sigma(2.0) == doctest::Approx(0.6));

    const auto b3 = make_bessel(3.0, 0.5);
    CHECK(b3.x_lo == 0.0);
    CHECK(b3.boundary_lo == BoundaryClass::entrance_not_exit);
    CHECK(b3.mu(0.5) == doctest::Approx(2.0));  // (dim-1)/(2x)
    CHECK(b3.sigma(0.5) == doctest::Approx(1.0));

    const auto q0 = make_besq(0.0, 0.5);
    CHECK(q0.x_lo == 0.0);
    CHECK(q0.boundary_lo == BoundaryClass::exit_not_entrance);
    CHECK(q0.mu(2.0) == doctest::Approx(0.0));  // dim = 0
    CHECK(q0.sigma(4.0) == doctest::Approx(4.0));  // 2 sqrt(x)
}

TEST_CASE("discount model distinguishes constant from functional") {
    const auto c = DiscountModel::constant(0.5);
    CHECK(c.is_constant());
    CHECK(c.constant_value() == 0.5);
    CHECK(c(123.0) == 0.5);

    const auto f = DiscountModel::function([](double x) { return 0.4 + 0.1 * std::tanh(x); });
    CHECK_FALSE(f.is_constant());
    CHECK(f(0.0) == doctest::Approx(0.4));
    CHECK_THROWS_AS(f.constant_value(), DomainError);
}

TEST_CASE("structural validation rejects broken specs") {
    auto spec = make_bm(0.0, 1.0, 0.5);
    CHECK_NOTHROW(spec.validate());

    // non-positive rates are rejected at construction
    CHECK_THROWS_AS(make_bm(0.0, 1.0, -0.1), DomainError);

    // sigma vanishing at an interior point
    auto pinched = make_custom([](double) { return 0.0; }, [](double x) { return x; },
                               DiscountModel::constant(0.5), -1.0, 1.0, BoundaryClass::natural,
                               BoundaryClass::natural, 0.5);
    CHECK_THROWS_AS(pinched.validate(), DomainError);

    // x_ref outside the interval
    auto off = make_custom([](double) { return 0.0; }, [](double) { return 1.0; },
                           DiscountModel::constant(0.5), 0.0, 1.0, BoundaryClass::natural,
                           BoundaryClass::natural, 2.0);
    CHECK_THROWS_AS(off.validate(), DomainError);
}

TEST_CASE("scale density matches closed forms") {
    const auto bm = make_bm(0.25, 1.0, 0.5);
    const auto s_bm = scale_density_fn(bm);
    for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0})
        CHECK(s_bm(x) == doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-12));

    // bessel dim 3: S'(x) = (x_ref / x)^2
    const auto b3 = make_bessel(3.0, 0.5);
    const auto s_b3 = scale_density_fn(b3);
    for (double x : {0.25, 1.0, 4.0})
        CHECK(s_b3(x) == doctest::Approx(1.0 / (x * x)).epsilon(1e-12));

    // the custom path integrates mu/sigma^2 numerically; it must agree with
    // the preset's closed form for the same coefficients
    const auto custom = make_custom([](double) { return 0.25; }, [](double) { return 1.0; },
                                    DiscountModel::constant(0.5), -kInf, kInf,
                                    BoundaryClass::natural, BoundaryClass::natural, 0.0);
    const auto s_custom = scale_density_fn(custom);
    for (double x : {-1.5, 0.3, 2.0})
        CHECK(s_custom(x) == doctest::Approx(s_bm(x)).epsilon(1e-9));
}

TEST_CASE("Feller classification recovers the textbook classes") {
    const auto bm_rep = classify_boundary(make_bm(0.0, 1.0, 0.5));
    REQUIRE(bm_rep.lower.inferred.has_value());
    CHECK(*bm_rep.lower.inferred == BoundaryClass::natural);
    CHECK(*bm_rep.upper.inferred == BoundaryClass::natural);
    CHECK(bm_rep.all_match());
    CHECK_FALSE(bm_rep.lower.attainable);
    CHECK_FALSE(bm_rep.lower.enterable);

    const auto b3_rep = classify_boundary(make_bessel(3.0, 0.5));
    REQUIRE(b3_rep.lower.inferred.has_value());
    CHECK(*b3_rep.lower.inferred == BoundaryClass::entrance_not_exit);
    CHECK_FALSE(b3_rep.lower.attainable);
    CHECK(b3_rep.lower.enterable);
    CHECK(*b3_rep.upper.inferred == BoundaryClass::natural);
    CHECK(b3_rep.all_match());
    // the entrance integral has the closed form 1/3 for dim 3 at x_ref = 1
    CHECK(b3_rep.lower.entrance_integral == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
    CHECK(b3_rep.lower.exit_integral == kInf);

    const auto q0_rep = classify_boundary(make_besq(0.0, 0.5));
    REQUIRE(q0_rep.lower.inferred.has_value());
    CHECK(*q0_rep.lower.inferred == BoundaryClass::exit_not_entrance);
    CHECK(q0_rep.lower.attainable);
    CHECK_FALSE(q0_rep.lower.enterable);
    CHECK(q0_rep.all_match());
    // exit integral = int_0^1 (1/2) log(1/u) du = 1/2 exactly
    CHECK(q0_rep.lower.exit_integral == doctest::Approx(0.5).epsilon(1e-7));

    const auto gbm_rep = classify_boundary(make_gbm(0.1, 0.3, 0.5));
    REQUIRE(gbm_rep.lower.inferred.has_value());
    CHECK(*gbm_rep.lower.inferred == BoundaryClass::natural);
    CHECK(gbm_rep.all_match());
}

TEST_CASE("declared class mismatch is reported, not thrown") {
    auto spec = make_bessel(3.0, 0.5);
    spec.boundary_lo = BoundaryClass::natural;  // wrong on purpose
    const auto rep = classify_boundary(spec);
    CHECK_FALSE(rep.all_match());
    CHECK_FALSE(rep.lower.matches_declaration);
    REQUIRE(rep.lower.inferred.has_value());
    CHECK(*rep.lower.inferred == BoundaryClass::entrance_not_exit);
    CHECK_FALSE(rep.lower.note.empty());
    CHECK(rep.upper.matches_declaration);
}
