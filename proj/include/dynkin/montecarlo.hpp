#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dynkin/equilibrium.hpp"
#include "dynkin/game.hpp"
#include "dynkin/payoff.hpp"

namespace dynkin {

/// Simulation settings shared by every estimator in this module.
///
/// Paths evolve under Euler-Maruyama with step `dt` and are truncated once
/// the accumulated discount drops below `discount_floor`; a truncated path
/// contributes zero, so the induced bias is bounded by
/// sup|cost| * discount_floor. Threshold crossings are resolved with a
/// per-step Brownian bridge test (a step that straddles a barrier certainly
/// crossed; one that stays inside may still have touched it, with the bridge
/// probability), and a stop pays at the threshold itself. Endpoint-only
/// monitoring would detect first passage late by O(sqrt(dt)), which at the
/// step sizes used here is larger than the Monte Carlo noise being measured.
/// States are clamped to [x_lo + boundary_pad, x_hi - boundary_pad]
/// intersected with the core window of the fundamental pair; at an exit
/// lower boundary, reaching the pad instead ends the game with zero payoff.
///
/// Estimates are reproducible bit for bit: path i draws from its own
/// counter-seeded stream, paths are aggregated in fixed blocks of 1024, and
/// block totals are combined in index order with pairwise summation, so the
/// result is independent of `threads`.
struct PathConfig {
    double dt = 1e-4;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 12345;
    double discount_floor = 1e-4;
    double boundary_pad = 1e-6;
    unsigned threads = 1;

    bool operator==(const PathConfig&) const = default;
};

/// One player's stopping rule: stop the first time the state reaches the
/// threshold from the relevant side, or never stop. Player 1 conventionally
/// stops from above (first passage below), player 2 from below; `from_above`
/// flips player 1's orientation for the lower-regime rule that stops at the
/// tangency point from below.
struct Strategy {
    bool never = false;
    double threshold = 0.0;
    bool from_above = true;  // true: stop when x <= threshold

    bool triggers(double x) const {
        if (never) return false;
        return from_above ? x <= threshold : x >= threshold;
    }

    static Strategy stop_below(double z) { return Strategy{false, z, true}; }
    static Strategy stop_above(double z) { return Strategy{false, z, false}; }
    static Strategy none() { return Strategy{true, 0.0, true}; }
};

/// A strategy profile. When both rules are thresholds of the standard
/// orientation, player 1's must sit strictly below player 2's.
struct StrategyPair {
    Strategy tau1;
    Strategy tau2;
};

/// The strategy profile realised by a solved game when started at x0. The
/// starting point only matters for the two-regime construction at an exit
/// boundary, where starts below the tangency point stop from below instead.
StrategyPair equilibrium_strategies(const GameSpec& game, const EquilibriumResult& eq,
                                    double x0);

struct PayoffEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t n_effective = 0;
    double fraction_truncated = 0.0;  // paths ended by the discount floor
    double fraction_clamped = 0.0;    // paths that touched a clamp at least once
};

/// Discounted expected cost of `player` under the profile `strat` started at
/// x0. Exact (zero variance) when the start already triggers a rule; ties in
/// the same step resolve in player 2's favour. Throws ConfigError for a
/// non-positive dt or zero path count.
PayoffEstimate estimate_payoff(const GameSpec& game, const StrategyPair& strat, double x0,
                               const PathConfig& cfg, int player);

/// Both players' costs from one set of paths (common random numbers).
std::pair<PayoffEstimate, PayoffEstimate> estimate_payoff_pair(const GameSpec& game,
                                                               const StrategyPair& strat,
                                                               double x0,
                                                               const PathConfig& cfg);

/// Monte Carlo estimate of E[exp(-r tau_target)] for the first passage to
/// `target`, used to cross-check the fundamental pair's hitting transform.
PayoffEstimate estimate_discounted_hitting(const DiffusionSpec& spec,
                                           const FundamentalPair& pair, double x0,
                                           double target, const PathConfig& cfg);

struct DeviationCase {
    int player = 0;
    bool never = false;        // the never-stop deviation
    double threshold = 0.0;    // ignored when never
    double estimate = 0.0;
    double standard_error = 0.0;
    bool ok = true;  // estimate >= equilibrium - 3 * combined SE
};

struct DeviationReport {
    double eq_value_1 = 0.0;
    double eq_se_1 = 0.0;
    double eq_value_2 = 0.0;
    double eq_se_2 = 0.0;
    std::vector<DeviationCase> cases;
    bool pass = true;
};

/// One-sided deviation test: holds each player at the solved rule in turn and
/// re-estimates the opponent's cost over `grid_size` alternative thresholds
/// on each side of their own rule plus the never-stop rule, all on common
/// random numbers. A deviation fails when it undercuts the equilibrium
/// estimate by more than three combined standard errors. `player` restricts
/// the test to one deviator (0 = both).
DeviationReport nash_deviation_test(const GameSpec& game, const EquilibriumResult& eq,
                                    double x0, const PathConfig& cfg, std::size_t grid_size,
                                    int player = 0);

struct MartingaleCheckpoint {
    double t = 0.0;
    // stopped at the first of the two equilibrium rules
    double mean_1 = 0.0, se_1 = 0.0;
    double mean_2 = 0.0, se_2 = 0.0;
    // stopped at the opponent's rule only
    double sub_mean_1 = 0.0, sub_se_1 = 0.0;
    double sub_mean_2 = 0.0, sub_se_2 = 0.0;
    // undiscounted-by-stopping sanity process exp(-rt) phi(X_t)
    double phi_mean = 0.0, phi_se = 0.0;
};

struct MartingaleReport {
    double v1_x0 = 0.0;
    double v2_x0 = 0.0;
    double phi_x0 = 0.0;
    std::vector<MartingaleCheckpoint> checkpoints;
    bool martingale_ok = true;     // stopped means match v_i(x0) within 3 SE
    bool submartingale_ok = true;  // opponent-stopped means non-decreasing within 3 SE
    // exp(-rt) phi(X_t) matches phi(x0) within 3 SE when the lower boundary
    // is natural or exit; at an entrance boundary phi explodes and the
    // discounted phi process is a strict supermartingale, so only its
    // downward drift across checkpoints is asserted there.
    bool phi_ok = true;
    bool pass() const { return martingale_ok && submartingale_ok && phi_ok; }
};

/// Checks the martingale characterisation of the value pair along one set of
/// paths: exp(-r (t ^ tau)) v_i is a martingale when stopped at the first of
/// the two rules and a submartingale when stopped at the opponent's rule
/// only. Checkpoint times default to {0.5, 1, 2, 4, 8}.
MartingaleReport martingale_check(const GameSpec& game, const EquilibriumResult& eq,
                                  const PiecewisePayoff& v1, const PiecewisePayoff& v2,
                                  double x0, const PathConfig& cfg,
                                  std::vector<double> checkpoints = {0.5, 1.0, 2.0, 4.0,
                                                                     8.0});

}  // namespace dynkin
