#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dynkin/game.hpp"

namespace dynkin {

struct EquilibriumResult;

/// On each interval a payoff is one of: the player's own stopping cost, the
/// opponent-stop cost, an r-harmonic combination m psi + q phi (a straight
/// line in transformed coordinates), or a pure p psi piece (a line through
/// the transformed origin).
enum class PieceKind { cost_G, cost_L, linear_combination, pure_psi };
std::string to_string(PieceKind k);

struct PayoffPiece {
    double lo = 0.0, hi = 0.0;
    PieceKind kind = PieceKind::cost_G;
    double m = 0.0, q = 0.0, p = 0.0;  // coefficients, meaningful per kind
    std::function<double(double)> f;   // bound evaluator
    std::function<double(double)> df;  // bound derivative
};

/// A payoff assembled from analytic pieces; self-contained (pieces capture
/// copies of everything they evaluate) so it can outlive the game objects.
class PiecewisePayoff {
public:
    PiecewisePayoff() = default;
    PiecewisePayoff(int owner, std::vector<PayoffPiece> pieces);

    double operator()(double x) const;
    double deriv(double x) const;
    /// Index of the piece containing x (upper-inclusive only on the last).
    std::size_t piece_index(double x) const;

    int owner() const { return owner_; }
    const std::vector<PayoffPiece>& pieces() const { return pieces_; }
    double lo() const { return pieces_.front().lo; }
    double hi() const { return pieces_.back().hi; }

private:
    int owner_ = 0;
    std::vector<PayoffPiece> pieces_;
};

/// Piece constructors shared by the equilibrium and single-player assemblers.
/// Each returned piece captures copies of what it evaluates, so the payoff
/// stays valid after the game objects are gone.
PayoffPiece make_cost_piece(const CostProfile& cost, PieceKind kind, double lo,
                            double hi);
PayoffPiece make_combo_piece(const FundamentalPair& pair, double m, double q,
                             double lo, double hi);
PayoffPiece make_psi_piece(const FundamentalPair& pair, double p, double lo,
                           double hi);

/// Equilibrium payoffs for both players, assembled per regime.
std::pair<PiecewisePayoff, PiecewisePayoff> build_payoffs(const GameSpec& game,
                                                          const EquilibriumResult& eq);

struct ResidualReport {
    double ode_residual_1 = 0.0, ode_residual_2 = 0.0;  // sup |(L-r)v| on continuation
    bool gen_sign_ok_1 = true, gen_sign_ok_2 = true;    // stopping-side generator sign
    double obstacle_min_1 = 0.0, obstacle_min_2 = 0.0;  // min of G_i - v_i on grid
    double smooth_gap_1 = 0.0, smooth_gap_2 = 0.0;      // own-threshold derivative gap
    double kink_1 = 0.0, kink_2 = 0.0;                  // opponent-threshold gap (may be big)

    bool pass(double ode_tol = 1e-8, double smooth_tol = 1e-6,
              double obstacle_tol = 1e-9) const;
};

/// Grid verification of the free-boundary system: harmonicity on continuation
/// pieces, generator signs on stopping pieces, the obstacle bound v_i <= G_i,
/// and one-sided smooth fit at the thresholds.
ResidualReport verify_variational(const GameSpec& game, const EquilibriumResult& eq,
                                  const PiecewisePayoff& v1, const PiecewisePayoff& v2);

/// Samples both payoffs on n points and writes x, v1, v2 and the active piece
/// tags as CSV.
void write_payoff_csv(const std::string& path, const GameSpec& game,
                      const PiecewisePayoff& v1, const PiecewisePayoff& v2,
                      std::size_t n = 512);

}  // namespace dynkin
