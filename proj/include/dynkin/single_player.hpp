#pragma once

#include <optional>

#include "dynkin/payoff.hpp"

namespace dynkin {

enum class SingleCase { tangent_threshold, never_stop, two_sided };
std::string to_string(SingleCase c);

/// Which side the player stops on: below a threshold (the G-in-A1 geometry)
/// or above one (the mirror image).
enum class StopSide { stop_below, stop_above };

struct SinglePlayerSolution {
    SingleCase case_tag = SingleCase::tangent_threshold;
    /// Tangency point in transformed coordinates (the threshold is
    /// x_star = F_inv(y_star)); for two_sided, y_star_1 <= y_star_2.
    double y_star = 0.0;
    double x_star = 0.0;
    double y_star_1 = 0.0, y_star_2 = 0.0;
    double x_star_1 = 0.0, x_star_2 = 0.0;
    /// Transformed straight-line coefficients of the continuation value:
    /// m y + q through the opponent's point, p y through the origin.
    double m = 0.0, q = 0.0, p = 0.0;
    PiecewisePayoff value;
};

/// One player stopping alone, possibly against an absorbing opponent
/// threshold x_o with terminal cost L. Geometry in transformed coordinates:
/// the value is the largest convex minorant of the obstacle, so every case
/// reduces to a tangent-line construction.
///   stop_below, no L: horizontal tangent at the minimum of the transform.
///   stop_below, L at x_o: tangent from (y_o, L(y_o)/phi(x_o)); falls back to
///     never_stop when the chord through the origin stays under the obstacle,
///     and to two_sided when the transform has a positive limit at 0 (exit
///     boundaries) with a negative dip.
///   stop_above, no L: tangent through the origin (threshold y_inf).
///   stop_above, L at x_o: tangent from the opponent's point, upper side.
SinglePlayerSolution solve_single_player(const GameSpec& game, int player,
                                         StopSide side,
                                         std::optional<double> x_opponent = {});

/// Same construction from raw pieces (no GameSpec needed): used by the
/// relaxed-route dispatch and by tests that build ad-hoc costs.
SinglePlayerSolution solve_single_player(const DiffusionSpec& spec,
                                         const TransformContext& ctx,
                                         const CostProfile& G,
                                         const CostProfile* L, StopSide side,
                                         std::optional<double> x_opponent = {});

}  // namespace dynkin
