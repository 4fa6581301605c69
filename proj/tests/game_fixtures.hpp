#pragma once

// Shared game fixtures for the solver-level test files. The games on the
// Bessel-type presets need a numerically integrated fundamental pair, which
// dominates setup time, so each game is built once behind a static local and
// reused by every translation unit in the test binary.

#include <string>

#include "dynkin/expression.hpp"
#include "dynkin/game.hpp"

namespace fixtures {

inline dynkin::CostInput cost_expr(const std::string& text) {
    const auto f = dynkin::Expression::parse(text);
    const auto d = f.derivative();
    const auto d2 = d.derivative();
    return dynkin::CostInput::analytic([f](double x) { return f.eval(x); },
                                       [d](double x) { return d.eval(x); },
                                       [d2](double x) { return d2.eval(x); });
}

// War of attrition on standard Brownian motion: bounded smooth stopping
// costs, flat -1.2 when the opponent stops first.
inline const dynkin::GameSpec& tanh_game() {
    static const dynkin::GameSpec game(
        dynkin::make_bm(0.0, 1.0, 0.5), cost_expr("tanh(x)"),
        cost_expr("-tanh(x - 1)"), cost_expr("-1.2"), cost_expr("-1.2"));
    return game;
}

// Same stopping costs with opponent-stop costs that are shifted copies of
// them; this variant satisfies every leg of the uniqueness certificate.
inline const dynkin::GameSpec& tanh_shift_game() {
    static const dynkin::GameSpec game(
        dynkin::make_bm(0.0, 1.0, 0.5), cost_expr("tanh(x)"),
        cost_expr("-tanh(x - 1)"), cost_expr("tanh(x - 1.5) - 0.1"),
        cost_expr("-tanh(x - 1) - 0.1"));
    return game;
}

// Bessel(3) game with an entrance-not-exit origin. The scale k on L1 decides
// the dichotomy: k = 1 leaves the interior system applicable, k = 16 drags
// the chord slope below the origin slope of the transformed G1 and player 1
// never stops.
inline const dynkin::GameSpec& bessel_game(double k) {
    const auto build = [](double scale) {
        const std::string l1 =
            "-" + std::to_string(scale) + " * exp(-x) / x";
        return dynkin::GameSpec(dynkin::make_bessel(3.0, 0.5),
                                cost_expr("tanh(x - 0.2)"),
                                cost_expr("-tanh(x - 1.2)"), cost_expr(l1),
                                cost_expr("-1.2"));
    };
    if (k == 1.0) {
        static const dynkin::GameSpec game = build(1.0);
        return game;
    }
    static const dynkin::GameSpec game = build(16.0);
    return game;
}

// Squared Bessel of dimension zero: the origin is exit-not-entrance, an
// absorbed path pays nothing, and G1 stays positive near zero while dipping
// negative in the interior, which produces the two-regime equilibrium.
inline const dynkin::GameSpec& besq_game() {
    static const dynkin::GameSpec game(
        dynkin::make_besq(0.0, 0.5), cost_expr("0.2 + x * log(x)"),
        cost_expr("4 - x"), cost_expr("-exp(-sqrt(x))"),
        cost_expr("-0.5 - x"));
    return game;
}

// Both gain costs in the stop-below class with negative infima: the standard
// construction does not apply and the relaxed route decides who stops by
// comparing single-player thresholds. The swapped variant exchanges the
// player labels.
inline const dynkin::GameSpec& relaxed_game(bool swapped) {
    const auto build = [](bool sw) {
        dynkin::CostInput g1 = cost_expr("tanh(x) - 0.5");
        dynkin::CostInput g2 = cost_expr("tanh(x - 1) - 0.5");
        dynkin::CostInput l1 = cost_expr("tanh(x) - 0.8");
        dynkin::CostInput l2 = cost_expr("tanh(x - 1) - 0.8");
        if (sw) {
            std::swap(g1, g2);
            std::swap(l1, l2);
        }
        return dynkin::GameSpec(dynkin::make_bm(0.0, 1.0, 0.5), g1, g2, l1,
                                l2);
    };
    if (swapped) {
        static const dynkin::GameSpec game = build(true);
        return game;
    }
    static const dynkin::GameSpec game = build(false);
    return game;
}

}  // namespace fixtures
