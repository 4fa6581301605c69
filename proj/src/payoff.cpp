#include "dynkin/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "dynkin/equilibrium.hpp"
#include "dynkin/errors.hpp"
#include "dynkin/numeric.hpp"

namespace dynkin {

std::string to_string(PieceKind k) {
    switch (k) {
        case PieceKind::cost_G: return "cost_G";
        case PieceKind::cost_L: return "cost_L";
        case PieceKind::linear_combination: return "linear_combination";
        default: return "pure_psi";
    }
}

PayoffPiece make_cost_piece(const CostProfile& cost, PieceKind kind, double lo,
                            double hi) {
    PayoffPiece p;
    p.lo = lo;
    p.hi = hi;
    p.kind = kind;
    p.f = [cost](double x) { return cost.value(x); };
    p.df = [cost](double x) { return cost.deriv(x); };
    return p;
}

PayoffPiece make_combo_piece(const FundamentalPair& pair, double m, double q,
                             double lo, double hi) {
    PayoffPiece p;
    p.lo = lo;
    p.hi = hi;
    p.kind = PieceKind::linear_combination;
    p.m = m;
    p.q = q;
    p.f = [pair, m, q](double x) { return m * pair.psi(x) + q * pair.phi(x); };
    p.df = [pair, m, q](double x) {
        return m * pair.psi_deriv(x) + q * pair.phi_deriv(x);
    };
    return p;
}

PayoffPiece make_psi_piece(const FundamentalPair& pair, double coeff, double lo,
                           double hi) {
    PayoffPiece p;
    p.lo = lo;
    p.hi = hi;
    p.kind = PieceKind::pure_psi;
    p.p = coeff;
    p.f = [pair, coeff](double x) { return coeff * pair.psi(x); };
    p.df = [pair, coeff](double x) { return coeff * pair.psi_deriv(x); };
    return p;
}

PiecewisePayoff::PiecewisePayoff(int owner, std::vector<PayoffPiece> pieces)
    : owner_(owner), pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw DomainError("a payoff needs at least one piece");
}

std::size_t PiecewisePayoff::piece_index(double x) const {
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
        if (x < pieces_[i].hi) return i;
    return pieces_.size() - 1;
}

double PiecewisePayoff::operator()(double x) const {
    return pieces_[piece_index(x)].f(x);
}

double PiecewisePayoff::deriv(double x) const {
    return pieces_[piece_index(x)].df(x);
}

std::pair<PiecewisePayoff, PiecewisePayoff> build_payoffs(
    const GameSpec& game, const EquilibriumResult& eq) {
    const FundamentalPair& pr = game.pair();
    const double lo = pr.range_lo(), hi = pr.range_hi();
    switch (eq.regime) {
        case Regime::interior_thresholds: {
            PiecewisePayoff v1(
                1, {make_cost_piece(game.G(1), PieceKind::cost_G, lo, eq.x1_star),
                    make_combo_piece(pr, eq.m1, eq.q1, eq.x1_star, eq.x2_star),
                    make_cost_piece(game.L(1), PieceKind::cost_L, eq.x2_star, hi)});
            PiecewisePayoff v2(
                2, {make_cost_piece(game.L(2), PieceKind::cost_L, lo, eq.x1_star),
                    make_combo_piece(pr, eq.m2, eq.q2, eq.x1_star, eq.x2_star),
                    make_cost_piece(game.G(2), PieceKind::cost_G, eq.x2_star, hi)});
            return {std::move(v1), std::move(v2)};
        }
        case Regime::exit_two_regime: {
            PiecewisePayoff v1(
                1, {make_psi_piece(pr, eq.p1, lo, eq.x_s),
                    make_cost_piece(game.G(1), PieceKind::cost_G, eq.x_s, eq.x1_star),
                    make_combo_piece(pr, eq.m1, eq.q1, eq.x1_star, eq.x2_star),
                    make_cost_piece(game.L(1), PieceKind::cost_L, eq.x2_star, hi)});
            PiecewisePayoff v2(
                2, {make_psi_piece(pr, eq.p2, lo, eq.x_s),
                    make_cost_piece(game.L(2), PieceKind::cost_L, eq.x_s, eq.x1_star),
                    make_combo_piece(pr, eq.m2, eq.q2, eq.x1_star, eq.x2_star),
                    make_cost_piece(game.G(2), PieceKind::cost_G, eq.x2_star, hi)});
            return {std::move(v1), std::move(v2)};
        }
        case Regime::p1_never_stops: {
            PiecewisePayoff v1(
                1, {make_psi_piece(pr, eq.p1, lo, eq.x2_star),
                    make_cost_piece(game.L(1), PieceKind::cost_L, eq.x2_star, hi)});
            PiecewisePayoff v2(
                2, {make_psi_piece(pr, eq.p2, lo, eq.x2_star),
                    make_cost_piece(game.G(2), PieceKind::cost_G, eq.x2_star, hi)});
            return {std::move(v1), std::move(v2)};
        }
        case Regime::relaxed_p1_stops:
        case Regime::relaxed_p2_stops:
        case Regime::relaxed_both: {
            const int stopper = eq.regime == Regime::relaxed_p2_stops ? 2 : 1;
            const double xs = stopper == 1 ? eq.x1_star : eq.x2_star;
            const bool below = game.G(1).class_tag() == CostClass::A1;
            const PieceKind own = PieceKind::cost_G;
            const PieceKind opp = PieceKind::cost_L;
            const CostProfile& gs = game.G(stopper);
            const CostProfile& lo_cost = game.L(3 - stopper);
            if (below) {
                PiecewisePayoff vs(stopper,
                                   {make_cost_piece(gs, own, lo, xs),
                                    make_combo_piece(pr, 0.0,
                                                     stopper == 1 ? eq.q1 : eq.q2,
                                                     xs, hi)});
                PiecewisePayoff vo(3 - stopper,
                                   {make_cost_piece(lo_cost, opp, lo, xs),
                                    make_combo_piece(pr, 0.0,
                                                     stopper == 1 ? eq.q2 : eq.q1,
                                                     xs, hi)});
                return stopper == 1
                           ? std::pair{std::move(vs), std::move(vo)}
                           : std::pair{std::move(vo), std::move(vs)};
            }
            PiecewisePayoff vs(stopper,
                               {make_psi_piece(pr, stopper == 1 ? eq.p1 : eq.p2,
                                               lo, xs),
                                make_cost_piece(gs, own, xs, hi)});
            PiecewisePayoff vo(3 - stopper,
                               {make_psi_piece(pr, stopper == 1 ? eq.p2 : eq.p1,
                                               lo, xs),
                                make_cost_piece(lo_cost, opp, xs, hi)});
            return stopper == 1 ? std::pair{std::move(vs), std::move(vo)}
                                : std::pair{std::move(vo), std::move(vs)};
        }
        default:
            throw RegimeMismatch("no payoff construction for regime " +
                                 to_string(eq.regime));
    }
}

namespace {

// Second derivative of a piece formula by central differencing of its
// analytic first derivative; keeps the noise floor near 1e-10 on unit scale.
double second_deriv(const PayoffPiece& piece, double x) {
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    return (piece.df(x + h) - piece.df(x - h)) / (2.0 * h);
}

void verify_one(const GameSpec& game, int player, const PiecewisePayoff& v,
                double& ode_residual, bool& gen_sign_ok, double& obstacle_min,
                double& smooth_gap, double& kink) {
    const DiffusionSpec& spec = game.spec();
    const CostProfile& own_cost = game.G(player);
    ode_residual = 0.0;
    gen_sign_ok = true;
    smooth_gap = 0.0;
    kink = 0.0;

    for (const PayoffPiece& piece : v.pieces()) {
        if (!(piece.hi > piece.lo)) continue;
        const double margin = 1e-4 * std::max(1.0, piece.hi - piece.lo);
        const double a = piece.lo + margin, b = piece.hi - margin;
        if (!(b > a)) continue;
        if (piece.kind == PieceKind::linear_combination ||
            piece.kind == PieceKind::pure_psi) {
            for (double x : num::linspace(a, b, 256)) {
                const double val = piece.f(x);
                const double res = 0.5 * spec.sigma2(x) * second_deriv(piece, x) +
                                   spec.mu(x) * piece.df(x) -
                                   spec.discount(x) * val;
                ode_residual = std::max(
                    ode_residual, std::abs(res) / std::max(1.0, std::abs(val)));
            }
        } else if (piece.kind == PieceKind::cost_G) {
            const double x_hat = own_cost.x_hat();
            for (double x : num::linspace(a, b, 256)) {
                if (std::isfinite(x_hat) && std::abs(x - x_hat) <= 1e-4) continue;
                if (own_cost.gen(x) <= 0.0) gen_sign_ok = false;
            }
        }
    }

    obstacle_min = std::numeric_limits<double>::infinity();
    for (double x : classification_grid(spec, v.lo(), v.hi(), 2048))
        obstacle_min = std::min(obstacle_min, own_cost.value(x) - v(x));

    const auto& pieces = v.pieces();
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        const double knot = pieces[i].lo;
        const double h = 1e-4 * std::max(1.0, std::abs(knot));
        const double dm = num::one_sided_deriv(pieces[i - 1].f, knot, h, -1);
        const double dp = num::one_sided_deriv(pieces[i].f, knot, h, +1);
        const double gap = std::abs(dm - dp) /
                           std::max({1.0, std::abs(dm), std::abs(dp)});
        const bool fit = pieces[i - 1].kind == PieceKind::cost_G ||
                         pieces[i].kind == PieceKind::cost_G;
        (fit ? smooth_gap : kink) = std::max(fit ? smooth_gap : kink, gap);
    }
}

}  // namespace

bool ResidualReport::pass(double ode_tol, double smooth_tol,
                          double obstacle_tol) const {
    return ode_residual_1 < ode_tol && ode_residual_2 < ode_tol &&
           gen_sign_ok_1 && gen_sign_ok_2 && obstacle_min_1 >= -obstacle_tol &&
           obstacle_min_2 >= -obstacle_tol && smooth_gap_1 < smooth_tol &&
           smooth_gap_2 < smooth_tol;
}

ResidualReport verify_variational(const GameSpec& game, const EquilibriumResult& eq,
                                  const PiecewisePayoff& v1,
                                  const PiecewisePayoff& v2) {
    (void)eq;
    ResidualReport rep;
    verify_one(game, 1, v1, rep.ode_residual_1, rep.gen_sign_ok_1,
               rep.obstacle_min_1, rep.smooth_gap_1, rep.kink_1);
    verify_one(game, 2, v2, rep.ode_residual_2, rep.gen_sign_ok_2,
               rep.obstacle_min_2, rep.smooth_gap_2, rep.kink_2);
    return rep;
}

void write_payoff_csv(const std::string& path, const GameSpec& game,
                      const PiecewisePayoff& v1, const PiecewisePayoff& v2,
                      std::size_t n) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << "x,v1,v2,piece1,piece2\n";
    out.precision(17);
    const double lo = std::max(v1.lo(), v2.lo());
    const double hi = std::min(v1.hi(), v2.hi());
    for (double x : classification_grid(game.spec(), lo, hi, n)) {
        out << x << ',' << v1(x) << ',' << v2(x) << ','
            << to_string(v1.pieces()[v1.piece_index(x)].kind) << ','
            << to_string(v2.pieces()[v2.piece_index(x)].kind) << '\n';
    }
    if (!out) throw ValidationError("failed while writing: " + path);
}

}  // namespace dynkin
