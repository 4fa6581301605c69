#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "dynkin/costs.hpp"
#include "dynkin/diffusion.hpp"
#include "dynkin/expression.hpp"
#include "dynkin/fundamental.hpp"
#include "dynkin/numeric.hpp"

using namespace dynkin;

namespace {

struct BmWorld {
    DiffusionSpec spec = make_bm(0.0, 1.0, 0.5);
    FundamentalPair pair = solve_fundamental(spec);
    TransformContext ctx{spec, pair};
};

const BmWorld& bm_world() {
    static const BmWorld w;
    return w;
}

CostInput from_expr(const std::string& text) {
    const Expression f = Expression::parse(text);
    const Expression d1 = f.derivative();
    const Expression d2 = d1.derivative();
    return CostInput::analytic([f](double x) { return f.eval(x); },
                               [d1](double x) { return d1.eval(x); },
                               [d2](double x) { return d2.eval(x); });
}

}  // namespace

TEST_CASE("transform maps the fundamental pair to the coordinate axes") {
    // H = psi must transform to the identity and H = phi to the constant 1
    const auto& w = bm_world();
    const auto psi_in = CostInput::analytic([&](double x) { return w.pair.psi(x); },
                                            [&](double x) { return w.pair.psi_deriv(x); },
                                            [&](double x) { return w.pair.psi(x); });
    const auto phi_in = CostInput::analytic([&](double x) { return w.pair.phi(x); },
                                            [&](double x) { return w.pair.phi_deriv(x); },
                                            [&](double x) { return w.pair.phi(x); });
    const CostProfile psi_prof = classify_cost(w.spec, w.ctx, psi_in);
    const CostProfile phi_prof = classify_cost(w.spec, w.ctx, phi_in);
    // both lie in the kernel of the generator minus r: no sign changes, no class
    CHECK(psi_prof.class_tag() == CostClass::none);
    CHECK(phi_prof.class_tag() == CostClass::none);

    const HatFunction psi_hat(w.ctx, psi_prof);
    const HatFunction phi_hat(w.ctx, phi_prof);
    for (double x : num::linspace(-4.0, 4.0, 41)) {
        const double y = w.ctx.F(x);
        CHECK(std::abs(psi_hat.value_at_x(x) - y) <= 1e-10 * std::max(1.0, std::abs(y)));
        CHECK(std::abs(phi_hat.value_at_x(x) - 1.0) <= 1e-10);
        CHECK(std::abs(psi_hat.deriv_at_x(x) - 1.0) <= 1e-10);
        CHECK(std::abs(phi_hat.deriv_at_x(x)) <= 1e-10);
    }
}

TEST_CASE("tanh cost families land in the expected classes") {
    const auto& w = bm_world();

    const CostProfile g1 = classify_cost(w.spec, w.ctx, from_expr("tanh(x)"));
    CHECK(g1.class_tag() == CostClass::A1);
    CHECK(g1.x_hat() == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(g1.y_hat() == doctest::Approx(1.0).epsilon(1e-9));  // F(0) = 1
    // transformed minimum: hat G1'(y) = 0 at tanh(x) = (1 - sqrt 5)/2, where
    // y = (1 + t)/(1 - t) = sqrt 5 - 2
    REQUIRE(g1.stationary_y().has_value());
    CHECK(*g1.stationary_y() == doctest::Approx(std::sqrt(5.0) - 2.0).epsilon(1e-9));
    REQUIRE(g1.stationary_x().has_value());
    CHECK(*g1.stationary_x() ==
          doctest::Approx(std::atanh((1.0 - std::sqrt(5.0)) / 2.0)).epsilon(1e-9));
    // A1 with a natural lower end: transformed slope dives at the origin
    CHECK(g1.hat_deriv_origin().kind == LimitKind::minus_infinity);

    const CostProfile g2 = classify_cost(w.spec, w.ctx, from_expr("-tanh(x - 1)"));
    CHECK(g2.class_tag() == CostClass::A2);
    CHECK(g2.x_hat() == doctest::Approx(1.0).scale(1.0).epsilon(1e-9));

    // constant negative cost: no sign change of h = -r H, base class only
    const CostProfile flat = classify_cost(w.spec, w.ctx, from_expr("-1.2"));
    CHECK(flat.class_tag() == CostClass::A);
    CHECK(flat.diagnostics().sign_changes == 0);
    CHECK(std::isnan(flat.x_hat()));
}

TEST_CASE("growth beyond the fundamental solutions voids the class") {
    const auto& w = bm_world();
    // H = e^{2x} outgrows psi = e^x toward +inf: the H/psi limit leg fails
    const CostProfile fat = classify_cost(w.spec, w.ctx, from_expr("exp(2 * x)"));
    CHECK(fat.class_tag() == CostClass::none);
    CHECK_FALSE(fat.diagnostics().upper_vanishes);
}

TEST_CASE("convexity of the transform follows the sign of the generator image") {
    // second differences of hat H across 50 random smooth costs, compared
    // against h = (L - r)H wherever |h| is clearly nonzero
    const auto& w = bm_world();
    std::mt19937 rng(20240818u);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    std::uniform_real_distribution<double> shift(-1.5, 1.5);
    std::uniform_real_distribution<double> freq(0.3, 1.4);
    int convex_checks = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const double a = amp(rng), b = shift(rng), c = freq(rng), d = amp(rng);
        const auto H = [=](double x) {
            return a * std::tanh(c * (x - b)) + d * std::exp(-0.5 * (x - b) * (x - b));
        };
        const auto H1 = [=](double x) {
            const double t = std::tanh(c * (x - b));
            return a * c * (1.0 - t * t) - d * (x - b) * std::exp(-0.5 * (x - b) * (x - b));
        };
        const auto H2 = [=](double x) {
            const double t = std::tanh(c * (x - b));
            const double g = std::exp(-0.5 * (x - b) * (x - b));
            return -2.0 * a * c * c * t * (1.0 - t * t) +
                   d * ((x - b) * (x - b) - 1.0) * g;
        };
        const CostProfile prof =
            classify_cost(w.spec, w.ctx, CostInput::analytic(H, H1, H2));
        const HatFunction hat(w.ctx, prof);
        for (double x : num::linspace(-2.5, 2.5, 41)) {
            const double h = prof.gen(x);
            if (std::abs(h) <= 1e-7) continue;
            const double y = w.ctx.F(x);
            const double dy = 1e-3 * y;  // constant step in x-scale
            const double second =
                hat.value(y + dy) - 2.0 * hat.value(y) + hat.value(y - dy);
            CHECK(second * h > 0.0);
            ++convex_checks;
        }
    }
    CHECK(convex_checks > 1500);  // the filter must not eat the test
}

TEST_CASE("two derivative routes agree for classified costs") {
    const auto& w = bm_world();
    const CostProfile g1 = classify_cost(w.spec, w.ctx, from_expr("tanh(x)"));
    const HatFunction hat(w.ctx, g1);
    for (double x : {-1.5, -0.5, 0.0, 0.8, 2.0}) {
        const double direct = hat.deriv_at_x(x);
        const double tail = hat.deriv_integral_at_x(x);
        CHECK(tail == doctest::Approx(direct).epsilon(1e-6));
    }
}

TEST_CASE("finite-difference inputs classify like analytic ones") {
    const auto& w = bm_world();
    const CostProfile exact = classify_cost(w.spec, w.ctx, from_expr("tanh(x)"));
    const CostProfile fd =
        classify_cost(w.spec, w.ctx, CostInput::numeric([](double x) { return std::tanh(x); }));
    CHECK(fd.class_tag() == CostClass::A1);
    CHECK(fd.x_hat() == doctest::Approx(exact.x_hat()).scale(1.0).epsilon(1e-6));
    REQUIRE(fd.stationary_y().has_value());
    CHECK(*fd.stationary_y() == doctest::Approx(*exact.stationary_y()).epsilon(1e-5));
}

TEST_CASE("classification grid respects bounds and singular-end clustering") {
    const auto bspec = make_bessel(3.0, 0.5);
    const auto grid = classification_grid(bspec, 1e-4, 50.0, 257);
    CHECK(grid.size() == 257);
    CHECK(grid.front() >= 1e-4);
    CHECK(grid.back() <= 50.0);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
    // log spacing near the finite endpoint: many more nodes below 1 than a
    // uniform grid would put there
    const std::size_t below_one =
        static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), 1.0) - grid.begin());
    CHECK(below_one > grid.size() / 4);
}
