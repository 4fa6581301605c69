#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dynkin/game.hpp"

namespace dynkin {

/// Which construction produced the equilibrium.
enum class Regime {
    interior_thresholds,  ///< player 1 stops below x1*, player 2 above x2*
    p1_never_stops,       ///< player 1 waits (forever, or until the exit time)
    p2_never_stops,       ///< reserved for the mirrored boundary configuration
    exit_two_regime,      ///< below x_S: stop on reaching x_S vs wait; above: interior pair
    relaxed_p1_stops,     ///< same-class gain costs; player 1 plays its free optimum
    relaxed_p2_stops,
    relaxed_both,         ///< free optima coincide; both one-sided pairs are equilibria
    not_found,            ///< no construction in the supported class applies
};
std::string to_string(Regime r);

enum class UniquenessStatus { certified_unique, not_certified, multiple_found };
std::string to_string(UniquenessStatus s);

struct UniquenessCertificate {
    UniquenessStatus status = UniquenessStatus::not_certified;
    bool loss_classes_ok = false;      // L1 in A1 and L2 in A2
    bool loss_stationary_ok = false;   // stationary point of the transformed L2 above y_hat_1
    bool slope_separation_ok = false;  // Ghat1'(y1_inf) < Lhat1'(y2_inf)
    bool reply_monotone_ok = false;    // sampled best replies strictly monotone
    std::vector<double> scan_roots;    // every root of the reduced equation found
    std::string detail;
};

struct EquilibriumResult {
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    Regime regime = Regime::not_found;
    /// Thresholds in both coordinate systems (NaN when the regime has none).
    double y1_star = nan, y2_star = nan;
    double x1_star = nan, x2_star = nan;
    /// |ell_i| at the solution and the best-reply round-trip gap in y.
    double residual_1 = nan, residual_2 = nan;
    double fixed_point_gap = nan;
    /// Straight-line coefficients of the transformed continuation values
    /// (relaxed regimes reuse them with m = 0) and the psi coefficients of
    /// the pieces attached to the lower boundary.
    double m1 = nan, q1 = nan, m2 = nan, q2 = nan;
    double p1 = nan, p2 = nan;
    /// Free-problem auxiliaries: player 2's origin-tangent threshold, player
    /// 1's reply to it, the exit-boundary tangent point, and the chord roots
    /// deciding the entrance/exit dichotomies.
    double y2_inf = nan, x2_inf = nan;
    double y1_inf = nan;
    double y_s = nan, x_s = nan;
    double y_t = nan, yhat_t = nan;
    /// Relaxed route: the two free-optimum thresholds being compared.
    double x_prime_1 = nan, x_prime_2 = nan;
    /// Human-readable description of player 1's strategy when it is not a
    /// plain threshold rule (exit-regime start below x_S, never-stop cases).
    std::string strategy_note;
    UniquenessCertificate uniqueness;
    std::string detail;
};

/// ell_i(u, v) = Ghat_i(u) - Lhat_i(v) - Ghat_i'(u) (u - v) in transformed
/// coordinates: zero exactly when the line through (v, Lhat_i(v)) with slope
/// Ghat_i'(u) is tangent to Ghat_i at u.
double ell(const GameSpec& game, int player, double u, double v);

/// Unique root of ell_2(., zeta) = 0 above y_hat_2, for zeta below y_hat_1.
/// Throws BracketFailure when the expansion budget is exhausted (an upstream
/// assumption violation).
double best_reply_p2(const GameSpec& game, double zeta);

/// Unique root of ell_1(., zeta) = 0 in (0, y_hat_1), for zeta above y_hat_2.
/// BracketFailure here signals that a lower-boundary construction (never
/// stopping) applies instead.
double best_reply_p1(const GameSpec& game, double zeta);

/// Full dispatch: interior-threshold system for the natural route, the
/// entrance and exit dichotomies, and the relaxed same-class route. Interior
/// solves also run a multiplicity scan and a uniqueness check.
EquilibriumResult solve_equilibrium(const GameSpec& game);

/// Uniqueness certificate for an interior solution: the three hypotheses of
/// the uniqueness theorem evaluated numerically, an empirical monotonicity
/// check of both best-reply maps (50 samples each), and the requirement that
/// the multiplicity scan found exactly one root.
UniquenessCertificate check_uniqueness(const GameSpec& game,
                                       const EquilibriumResult& eq);

}  // namespace dynkin
