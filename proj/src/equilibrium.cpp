#include "dynkin/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynkin/errors.hpp"
#include "dynkin/numeric.hpp"
#include "dynkin/single_player.hpp"

namespace dynkin {

namespace {

// ell_i with the touch point and the anchor given in x coordinates, avoiding
// any numerical inversion of F inside the root-finding loops.
double ell_x(const GameSpec& g, int player, double x_u, double x_v) {
    const HatFunction& hg = g.hatG(player);
    const HatFunction& hl = g.hatL(player);
    const TransformContext& ctx = g.ctx();
    return hg.value_at_x(x_u) - hl.value_at_x(x_v) -
           hg.deriv_at_x(x_u) * (ctx.F(x_u) - ctx.F(x_v));
}

// Player 1's reply: the residual is increasing on the convex side below the
// sign change, so march toward the lower end until it turns negative.
double reply_p1_x(const GameSpec& g, double x2) {
    const double lo = g.pair().range_lo();
    const double x_hat = g.G(1).x_hat();
    const auto res = [&g, x2](double x) { return ell_x(g, 1, x, x2); };
    const double f_hi = res(x_hat);
    if (!(f_hi > 0.0))
        throw BracketFailure("player 1 residual not positive at the sign change");
    for (int k = 1; k <= 60; ++k) {
        const double cand = lo + (x_hat - lo) * std::pow(0.5, k);
        const double fc = res(cand);
        if (fc < 0.0) return num::bisect_with_values(res, cand, fc, x_hat, f_hi);
    }
    throw BracketFailure(
        "player 1 residual has no sign change toward the lower endpoint");
}

// Player 2's reply: positive at the sign change, divergent to minus infinity
// above it, so a doubling expansion always brackets the root.
double reply_p2_x(const GameSpec& g, double x1) {
    const double hi = g.pair().range_hi();
    const double x_hat = g.G(2).x_hat();
    const auto res = [&g, x1](double x) { return ell_x(g, 2, x, x1); };
    if (!(res(x_hat) > 0.0))
        throw BracketFailure("player 2 residual not positive at the sign change");
    const double step = std::max(1e-3 * (hi - x_hat), 1e-9);
    const num::Bracket br = num::expand_up(res, x_hat, step, 64, hi);
    return num::bisect_with_values(res, br.lo, br.f_lo, br.hi, br.f_hi);
}

// The reduced one-variable residual: player 2's tangency condition evaluated
// against player 1's reply to the candidate threshold.
double reduced_residual(const GameSpec& g, double x2) {
    return ell_x(g, 2, x2, reply_p1_x(g, x2));
}

std::vector<double> multiplicity_scan(const GameSpec& g) {
    const TransformContext& ctx = g.ctx();
    const double y_lo = g.G(2).y_hat() * (1.0 + 1e-6);
    const double y_hi = ctx.y_max() * (1.0 - 1e-9);
    std::vector<double> roots;
    if (!(y_hi > y_lo)) return roots;
    const std::vector<double> ys = num::logspace(y_lo, y_hi, 512);
    double prev_x = 0.0;
    double prev_f = std::numeric_limits<double>::quiet_NaN();
    for (double y : ys) {
        double x = 0.0, f = std::numeric_limits<double>::quiet_NaN();
        try {
            x = ctx.F_inv(y);
            f = reduced_residual(g, x);
        } catch (const std::exception&) {
            prev_f = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        if (std::isfinite(prev_f) && std::isfinite(f) && (prev_f > 0.0) != (f > 0.0)) {
            const auto red = [&g](double t) { return reduced_residual(g, t); };
            try {
                const double r =
                    num::bisect_with_values(red, prev_x, prev_f, x, f);
                roots.push_back(ctx.F(r));
            } catch (const std::exception&) {
            }
        }
        prev_x = x;
        prev_f = f;
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) {
                                return std::abs(a - b) <=
                                       1e-8 * std::max({1.0, std::abs(a), std::abs(b)});
                            }),
                roots.end());
    return roots;
}

// Largest root of slope * y - Lhat_1(y) at or above x_floor; fallback_y when
// the grid sees no sign change. Decides the chord conditions of the
// boundary dichotomies.
double largest_chord_root(const GameSpec& g, double slope, double x_floor,
                          double fallback_y) {
    const TransformContext& ctx = g.ctx();
    const HatFunction& hl1 = g.hatL(1);
    const double lo = std::max(x_floor, g.pair().range_lo());
    const double hi = g.pair().range_hi();
    if (!(hi > lo)) return fallback_y;
    const auto chi = [&](double x) { return slope * ctx.F(x) - hl1.value_at_x(x); };
    const std::vector<double> xs = classification_grid(g.spec(), lo, hi, 1024);
    double best = std::numeric_limits<double>::quiet_NaN();
    double prev_x = xs.front(), prev_f = chi(xs.front());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double x = xs[i], f = chi(x);
        if (std::isfinite(prev_f) && std::isfinite(f) && (prev_f > 0.0) != (f > 0.0))
            best = num::bisect_with_values(chi, prev_x, prev_f, x, f);
        prev_x = x;
        prev_f = f;
    }
    return std::isnan(best) ? fallback_y : ctx.F(best);
}

// Is Lhat_1 bounded below toward the upper end of the state space? Probed on
// geometrically refining points; a tail that keeps falling past ten times the
// reference scale counts as divergent.
bool l1_bounded_below_at_hi(const GameSpec& g) {
    const HatFunction& hl1 = g.hatL(1);
    const double hi = g.pair().range_hi();
    const double ref = g.pair().x_ref();
    std::vector<double> v;
    for (int k = 0; k < 10; ++k)
        v.push_back(hl1.value_at_x(hi - (hi - ref) * std::pow(0.25, k)));
    const bool falling = v[9] < v[8] && v[8] < v[7] && v[7] < v[6];
    return !(falling && v[9] < -10.0 * (std::abs(v[0]) + 1.0));
}

// Tangent point of the line through the transformed origin on the falling
// branch of Ghat_1, between the lower end and the interior minimum.
double origin_tangent_point(const GameSpec& g, double stat_x) {
    const HatFunction& hg1 = g.hatG(1);
    const TransformContext& ctx = g.ctx();
    const double lo = g.pair().range_lo();
    const auto t_res = [&](double x) {
        return hg1.value_at_x(x) - ctx.F(x) * hg1.deriv_at_x(x);
    };
    const double f_stat = t_res(stat_x);
    if (!(f_stat < 0.0))
        throw BracketFailure("origin-tangent residual not negative at the minimum");
    for (int k = 1; k <= 60; ++k) {
        const double cand = lo + (stat_x - lo) * std::pow(0.5, k);
        const double fc = t_res(cand);
        if (fc > 0.0)
            return num::bisect_with_values(t_res, cand, fc, stat_x, f_stat);
    }
    throw BracketFailure(
        "origin-tangent residual has no sign change toward the lower endpoint");
}

void fill_free_auxiliaries(const GameSpec& g, EquilibriumResult& out) {
    if (std::isnan(out.x2_inf)) {
        try {
            const SinglePlayerSolution free2 = solve_single_player(
                g.spec(), g.ctx(), g.G(2), nullptr, StopSide::stop_above);
            out.x2_inf = free2.x_star;
            out.y2_inf = free2.y_star;
        } catch (const std::exception&) {
            return;
        }
    }
    try {
        out.y1_inf = g.ctx().F(reply_p1_x(g, out.x2_inf));
    } catch (const std::exception&) {
    }
}

void solve_interior_system(const GameSpec& g, EquilibriumResult& out) {
    const TransformContext& ctx = g.ctx();
    const double x_hat2 = g.G(2).x_hat();
    const double hi = g.pair().range_hi();
    const auto red = [&g](double x2) { return reduced_residual(g, x2); };
    const double f0 = red(x_hat2);
    if (!(f0 > 0.0))
        throw BracketFailure("reduced residual not positive at player 2's sign change");
    const double step = std::max(1e-3 * (hi - x_hat2), 1e-9);
    const num::Bracket br = num::expand_up(red, x_hat2, step, 64, hi);
    const double x2s = num::bisect_with_values(red, br.lo, br.f_lo, br.hi, br.f_hi);
    const double x1s = reply_p1_x(g, x2s);

    out.regime = Regime::interior_thresholds;
    out.x1_star = x1s;
    out.x2_star = x2s;
    out.y1_star = ctx.F(x1s);
    out.y2_star = ctx.F(x2s);
    out.residual_1 = std::abs(ell_x(g, 1, x1s, x2s));
    out.residual_2 = std::abs(ell_x(g, 2, x2s, x1s));
    const double x2_round = reply_p2_x(g, x1s);
    out.fixed_point_gap = std::abs(ctx.F(x2_round) - out.y2_star) /
                          std::max(1.0, std::abs(out.y2_star));
    out.m1 = g.hatG(1).deriv_at_x(x1s);
    out.q1 = g.hatL(1).value_at_x(x2s) - out.m1 * out.y2_star;
    out.m2 = g.hatG(2).deriv_at_x(x2s);
    out.q2 = g.hatL(2).value_at_x(x1s) - out.m2 * out.y1_star;
    if (out.strategy_note.empty())
        out.strategy_note =
            "player 1 stops at or below x1_star, player 2 at or above x2_star";
}

void run_interior(const GameSpec& g, EquilibriumResult& out) {
    solve_interior_system(g, out);
    out.uniqueness.scan_roots = multiplicity_scan(g);
    fill_free_auxiliaries(g, out);
    out.uniqueness = check_uniqueness(g, out);
}

void never_stop_fill(const GameSpec& g, EquilibriumResult& out,
                     const SinglePlayerSolution& free2) {
    out.regime = Regime::p1_never_stops;
    out.x2_star = free2.x_star;
    out.y2_star = free2.y_star;
    out.p1 = g.L(1).value(free2.x_star) / g.pair().psi(free2.x_star);
    out.p2 = g.G(2).value(free2.x_star) / g.pair().psi(free2.x_star);
    out.m2 = free2.p;
}

void entrance_dispatch(const GameSpec& g, EquilibriumResult& out) {
    const DerivLimit& d0 = g.G(1).hat_deriv_origin();
    if (d0.kind == LimitKind::minus_infinity) {
        out.detail =
            "entrance boundary with unbounded transformed slope at the origin; "
            "interior system applies";
        run_interior(g, out);
        return;
    }
    if (d0.kind == LimitKind::plus_infinity) {
        out.regime = Regime::not_found;
        out.detail =
            "transformed gain slope diverges upward at the lower end; no "
            "construction in the supported class applies";
        return;
    }
    SinglePlayerSolution free2;
    try {
        free2 = solve_single_player(g.spec(), g.ctx(), g.G(2), nullptr,
                                    StopSide::stop_above);
    } catch (const NoTangent& e) {
        out.regime = Regime::not_found;
        out.detail = std::string("player 2's free problem has no threshold: ") +
                     e.what();
        return;
    }
    out.x2_inf = free2.x_star;
    out.y2_inf = free2.y_star;
    const double chord = g.hatL(1).value_at_x(free2.x_star) / free2.y_star;
    if (chord <= d0.value) {
        never_stop_fill(g, out, free2);
        out.strategy_note =
            "player 1 never stops; player 2 stops at or above its free threshold";
        std::ostringstream os;
        os << "entrance dichotomy: opponent chord slope " << chord
           << " at the free threshold does not exceed the origin slope " << d0.value;
        out.detail = os.str();
        return;
    }
    const bool bounded = l1_bounded_below_at_hi(g);
    out.y_t = largest_chord_root(g, d0.value, g.pair().range_lo(), 0.0);
    const double y_hat2 = g.G(2).y_hat();
    if (chord < 0.0 && bounded && out.y_t <= y_hat2) {
        out.detail =
            "entrance dichotomy: interior system applies (chord slope above the "
            "origin slope, tail and crossing conditions hold)";
        run_interior(g, out);
        return;
    }
    out.regime = Regime::not_found;
    std::ostringstream os;
    os << "entrance dichotomy inconclusive: chord slope " << chord
       << " exceeds origin slope " << d0.value << " but ";
    if (!(chord < 0.0)) os << "the chord slope is nonnegative; ";
    if (!bounded) os << "the transformed opponent cost is unbounded below; ";
    if (!(out.y_t <= y_hat2))
        os << "the last chord crossing " << out.y_t << " lies above y_hat_2 "
           << y_hat2 << "; ";
    os << "no equilibrium construction in the supported class applies";
    out.detail = os.str();
}

void exit_dispatch(const GameSpec& g, EquilibriumResult& out) {
    if (g.G(2).lower_limit() < 0.0)
        throw ValidationError(
            "exit-boundary construction requires a nonnegative lower limit of "
            "G2/phi");
    const double a_g1 = g.G(1).lower_limit();
    if (a_g1 <= 0.0) {
        out.detail =
            "exit boundary with nonpositive lower limit of G1/phi; interior "
            "system applies";
        run_interior(g, out);
        return;
    }
    const std::optional<double> stat = g.G(1).stationary_x();
    if (!stat || !(g.hatG(1).value_at_x(*stat) < 0.0)) {
        out.regime = Regime::not_found;
        out.detail =
            "positive lower limit of G1/phi without a negative dip of the "
            "transform; no construction applies";
        return;
    }
    try {
        out.x_s = origin_tangent_point(g, *stat);
    } catch (const BracketFailure& e) {
        out.regime = Regime::not_found;
        out.detail = std::string("origin tangent not found: ") + e.what();
        return;
    }
    out.y_s = g.ctx().F(out.x_s);
    SinglePlayerSolution free2;
    try {
        free2 = solve_single_player(g.spec(), g.ctx(), g.G(2), nullptr,
                                    StopSide::stop_above);
    } catch (const NoTangent& e) {
        out.regime = Regime::not_found;
        out.detail = std::string("player 2's free problem has no threshold: ") +
                     e.what();
        return;
    }
    out.x2_inf = free2.x_star;
    out.y2_inf = free2.y_star;
    const double chord = g.hatL(1).value_at_x(free2.x_star) / free2.y_star;
    const double slope_s = g.hatG(1).deriv_at_x(out.x_s);
    if (slope_s > chord) {
        never_stop_fill(g, out, free2);
        out.strategy_note =
            "player 1 stops only at the exit time; player 2 stops at or above "
            "its free threshold";
        std::ostringstream os;
        os << "exit dichotomy: origin-tangent slope " << slope_s
           << " exceeds the opponent chord slope " << chord;
        out.detail = os.str();
        return;
    }
    out.yhat_t = largest_chord_root(g, slope_s, out.x_s, out.y_s);
    const bool bounded = l1_bounded_below_at_hi(g);
    const double y_hat2 = g.G(2).y_hat();
    if (out.yhat_t < y_hat2 && bounded) {
        run_interior(g, out);
        out.regime = Regime::exit_two_regime;
        out.p1 = g.G(1).value(out.x_s) / g.pair().psi(out.x_s);
        out.p2 = g.L(2).value(out.x_s) / g.pair().psi(out.x_s);
        out.strategy_note =
            "starts at or below x_s: player 1 stops on first reaching x_s (or at "
            "the exit time) and player 2 waits; starts above x_s: both play the "
            "interior thresholds";
        out.detail =
            "exit dichotomy: two-regime equilibrium (origin-tangent slope at or "
            "below the chord slope, tail and crossing conditions hold)";
        if (!(out.x_s < out.x1_star))
            out.detail += "; warning: tangent point not below player 1's "
                          "interior threshold";
        return;
    }
    out.regime = Regime::not_found;
    std::ostringstream os;
    os << "exit dichotomy inconclusive: origin-tangent slope " << slope_s
       << " at or below the chord slope " << chord << " but ";
    if (!(out.yhat_t < y_hat2))
        os << "the last chord crossing " << out.yhat_t << " is not below y_hat_2 "
           << y_hat2 << "; ";
    if (!bounded) os << "the transformed opponent cost is unbounded below; ";
    os << "no equilibrium construction in the supported class applies";
    out.detail = os.str();
}

void relaxed_dispatch(const GameSpec& g, EquilibriumResult& out) {
    const bool both_a1 = g.G(1).class_tag() == CostClass::A1;
    const StopSide side = both_a1 ? StopSide::stop_below : StopSide::stop_above;
    SinglePlayerSolution f1, f2;
    try {
        f1 = solve_single_player(g.spec(), g.ctx(), g.G(1), nullptr, side);
        f2 = solve_single_player(g.spec(), g.ctx(), g.G(2), nullptr, side);
    } catch (const NoTangent& e) {
        out.regime = Regime::not_found;
        out.detail = std::string("relaxed route: a free problem has no "
                                 "threshold: ") +
                     e.what();
        return;
    }
    out.x_prime_1 = f1.x_star;
    out.x_prime_2 = f2.x_star;
    int stopper;
    if (std::abs(f1.x_star - f2.x_star) < 1e-8) {
        out.regime = Regime::relaxed_both;
        stopper = 1;
    } else if (both_a1 ? (f1.x_star > f2.x_star) : (f1.x_star < f2.x_star)) {
        out.regime = Regime::relaxed_p1_stops;
        stopper = 1;
    } else {
        out.regime = Regime::relaxed_p2_stops;
        stopper = 2;
    }
    const SinglePlayerSolution& fs = stopper == 1 ? f1 : f2;
    const int other = 3 - stopper;
    if (stopper == 1) {
        out.x1_star = fs.x_star;
        out.y1_star = fs.y_star;
    } else {
        out.x2_star = fs.x_star;
        out.y2_star = fs.y_star;
    }
    if (both_a1) {
        (stopper == 1 ? out.m1 : out.m2) = 0.0;
        (stopper == 1 ? out.q1 : out.q2) = fs.q;
        (other == 1 ? out.m1 : out.m2) = 0.0;
        (other == 1 ? out.q1 : out.q2) = g.hatL(other).value_at_x(fs.x_star);
    } else {
        (stopper == 1 ? out.p1 : out.p2) = fs.p;
        (other == 1 ? out.p1 : out.p2) =
            g.L(other).value(fs.x_star) / g.pair().psi(fs.x_star);
    }
    std::ostringstream os;
    if (out.regime == Regime::relaxed_both) {
        os << "free optima coincide (|x'_1 - x'_2| < 1e-8); either player "
              "stopping at the common threshold while the other waits is an "
              "equilibrium; reporting the player-1 variant";
    } else {
        os << "player " << stopper << " stops at its free optimum "
           << (both_a1 ? "(at or below " : "(at or above ") << fs.x_star
           << "); the opponent never stops";
    }
    out.strategy_note = os.str();
    out.detail = both_a1
                     ? "relaxed route: both gain costs convex-then-concave in "
                       "transformed coordinates; free minima compared"
                     : "relaxed route: both gain costs concave-then-convex in "
                       "transformed coordinates; origin-tangent thresholds "
                       "compared";
}

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
        case Regime::interior_thresholds: return "interior_thresholds";
        case Regime::p1_never_stops: return "p1_never_stops";
        case Regime::p2_never_stops: return "p2_never_stops";
        case Regime::exit_two_regime: return "exit_two_regime";
        case Regime::relaxed_p1_stops: return "relaxed_p1_stops";
        case Regime::relaxed_p2_stops: return "relaxed_p2_stops";
        case Regime::relaxed_both: return "relaxed_both";
        default: return "not_found";
    }
}

std::string to_string(UniquenessStatus s) {
    switch (s) {
        case UniquenessStatus::certified_unique: return "certified_unique";
        case UniquenessStatus::multiple_found: return "multiple_found";
        default: return "not_certified";
    }
}

double ell(const GameSpec& game, int player, double u, double v) {
    if (!(u > 0.0) || !(v > 0.0))
        throw DomainError("transformed coordinates must be positive");
    const TransformContext& ctx = game.ctx();
    return ell_x(game, player, ctx.F_inv(u), ctx.F_inv(v));
}

double best_reply_p2(const GameSpec& game, double zeta) {
    if (!(zeta > 0.0))
        throw DomainError("transformed coordinates must be positive");
    const TransformContext& ctx = game.ctx();
    return ctx.F(reply_p2_x(game, ctx.F_inv(zeta)));
}

double best_reply_p1(const GameSpec& game, double zeta) {
    if (!(zeta > 0.0))
        throw DomainError("transformed coordinates must be positive");
    const TransformContext& ctx = game.ctx();
    return ctx.F(reply_p1_x(game, ctx.F_inv(zeta)));
}

EquilibriumResult solve_equilibrium(const GameSpec& game) {
    const AssumptionReport& rep = game.assumptions();
    EquilibriumResult out;
    switch (rep.route) {
        case SolveRoute::main_natural:
            out.detail = "natural lower boundary; interior system applies";
            run_interior(game, out);
            break;
        case SolveRoute::entrance:
            entrance_dispatch(game, out);
            break;
        case SolveRoute::exit:
            exit_dispatch(game, out);
            break;
        case SolveRoute::relaxed:
            relaxed_dispatch(game, out);
            break;
        default:
            throw NoRegimeApplies("no equilibrium construction applies: " +
                                  rep.detail);
    }
    return out;
}

UniquenessCertificate check_uniqueness(const GameSpec& game,
                                       const EquilibriumResult& eq) {
    UniquenessCertificate cert;
    cert.scan_roots = eq.uniqueness.scan_roots;
    if (eq.regime != Regime::interior_thresholds &&
        eq.regime != Regime::exit_two_regime) {
        cert.detail = "uniqueness certificate applies to interior-threshold "
                      "solutions only";
        return cert;
    }
    const TransformContext& ctx = game.ctx();
    cert.loss_classes_ok = game.L(1).class_tag() == CostClass::A1 &&
                           game.L(2).class_tag() == CostClass::A2;
    if (game.L(2).stationary_y())
        cert.loss_stationary_ok = *game.L(2).stationary_y() > game.G(1).y_hat();

    double x2i = eq.x2_inf;
    double y2i = eq.y2_inf;
    if (std::isnan(x2i)) {
        try {
            const SinglePlayerSolution free2 = solve_single_player(
                game.spec(), ctx, game.G(2), nullptr, StopSide::stop_above);
            x2i = free2.x_star;
            y2i = free2.y_star;
        } catch (const std::exception&) {
        }
    }
    if (!std::isnan(x2i)) {
        try {
            const double x1i = reply_p1_x(game, x2i);
            cert.slope_separation_ok =
                game.hatG(1).deriv_at_x(x1i) < game.hatL(1).deriv_at_x(x2i);
        } catch (const std::exception&) {
        }
    }

    // Empirical monotonicity of both reply maps on 50 log-spaced samples.
    cert.reply_monotone_ok = true;
    try {
        const double y_hat1 = game.G(1).y_hat();
        const double z_lo = std::max(ctx.y_min() * 1.0001, y_hat1 * 1e-5);
        double prev = std::numeric_limits<double>::infinity();
        for (double z : num::logspace(z_lo, y_hat1 * (1.0 - 1e-4), 50)) {
            const double y2 = ctx.F(reply_p2_x(game, ctx.F_inv(z)));
            if (!(y2 < prev)) {
                cert.reply_monotone_ok = false;
                break;
            }
            prev = y2;
        }
        const double y_hat2 = game.G(2).y_hat();
        if (cert.reply_monotone_ok && !std::isnan(y2i) &&
            y2i * (1.0 - 1e-6) > y_hat2 * (1.0 + 1e-4)) {
            prev = -std::numeric_limits<double>::infinity();
            for (double u : num::logspace(y_hat2 * (1.0 + 1e-4),
                                          y2i * (1.0 - 1e-6), 50)) {
                const double y1 = ctx.F(reply_p1_x(game, ctx.F_inv(u)));
                if (!(y1 > prev)) {
                    cert.reply_monotone_ok = false;
                    break;
                }
                prev = y1;
            }
        } else if (std::isnan(y2i)) {
            cert.reply_monotone_ok = false;
        }
    } catch (const std::exception&) {
        cert.reply_monotone_ok = false;
    }

    const bool hypotheses = cert.loss_classes_ok && cert.loss_stationary_ok &&
                            cert.slope_separation_ok;
    if (cert.scan_roots.size() > 1) {
        cert.status = UniquenessStatus::multiple_found;
        cert.detail = "the reduced equation has more than one root on the scan";
    } else if (hypotheses && cert.reply_monotone_ok && cert.scan_roots.size() == 1) {
        cert.status = UniquenessStatus::certified_unique;
        cert.detail = "all hypotheses hold, both reply maps are monotone on the "
                      "samples, and the scan found exactly one root";
    } else {
        cert.status = UniquenessStatus::not_certified;
        std::ostringstream os;
        os << "not certified:";
        if (!cert.loss_classes_ok) os << " opponent-stop costs not in A1/A2;";
        if (!cert.loss_stationary_ok)
            os << " stationary point of the transformed L2 not above y_hat_1;";
        if (!cert.slope_separation_ok) os << " slope separation fails;";
        if (!cert.reply_monotone_ok) os << " reply maps not certified monotone;";
        if (cert.scan_roots.size() != 1)
            os << " scan found " << cert.scan_roots.size() << " roots;";
        cert.detail = os.str();
    }
    return cert;
}

}  // namespace dynkin
