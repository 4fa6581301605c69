#include "dynkin/single_player.hpp"

#include <cmath>

#include "dynkin/errors.hpp"
#include "dynkin/numeric.hpp"

namespace dynkin {

std::string to_string(SingleCase c) {
    switch (c) {
        case SingleCase::tangent_threshold: return "tangent_threshold";
        case SingleCase::never_stop: return "never_stop";
        default: return "two_sided";
    }
}

SinglePlayerSolution solve_single_player(const GameSpec& game, int player, StopSide side,
                                         std::optional<double> x_opponent) {
    const CostProfile* L = x_opponent ? &game.L(player) : nullptr;
    return solve_single_player(game.spec(), game.ctx(), game.G(player), L, side,
                               x_opponent);
}

SinglePlayerSolution solve_single_player(const DiffusionSpec& spec,
                                         const TransformContext& ctx,
                                         const CostProfile& G, const CostProfile* L,
                                         StopSide side,
                                         std::optional<double> x_opponent) {
    const FundamentalPair& pair = ctx.pair();
    const double lo = pair.range_lo(), hi = pair.range_hi();
    HatFunction hg(ctx, G);
    SinglePlayerSolution out;

    // Tangency residual of the line anchored at (y_o, anchor_val): zero when
    // the line with slope Ghat'(x) through the anchor touches Ghat at x.
    const auto anchored = [&](double y_o, double anchor_val) {
        return [&hg, &ctx, y_o, anchor_val](double x) {
            return hg.value_at_x(x) - anchor_val - hg.deriv_at_x(x) * (ctx.F(x) - y_o);
        };
    };
    // Residual of the tangent through the transformed origin.
    const num::Fn origin_tangent = [&hg, &ctx](double x) {
        return hg.value_at_x(x) - ctx.F(x) * hg.deriv_at_x(x);
    };

    if (side == StopSide::stop_below) {
        if (!x_opponent) {
            // Free problem. The largest nonpositive convex minorant of the
            // transform follows it down to its minimum and continues flat, so
            // the stopping set is everything below the argmin.
            if (!G.stationary_x())
                throw NoTangent("transform has no interior stationary point; "
                                "never stopping is optimal for the free problem");
            const double xs = *G.stationary_x();
            const double level = hg.value_at_x(xs);
            if (!(level < 0.0))
                throw NoTangent("transform minimum is nonnegative; never stopping "
                                "is optimal for the free problem");
            out.case_tag = SingleCase::tangent_threshold;
            out.x_star = xs;
            out.y_star = ctx.F(xs);
            out.m = 0.0;
            out.q = level;
            out.value = PiecewisePayoff(
                0, {make_cost_piece(G, PieceKind::cost_G, lo, xs),
                    make_combo_piece(pair, 0.0, level, xs, hi)});
            return out;
        }

        if (!L) throw DomainError("constrained problem needs the opponent-stop cost");
        if (std::isnan(G.x_hat()))
            throw NoTangent("lower-side construction needs a gain cost with a "
                            "sign-change point");
        const double xo = *x_opponent;
        if (!(xo > G.x_hat() && xo < hi))
            throw DomainError("opponent threshold must lie above the sign change");
        const double yo = ctx.F(xo);
        const double lval = L->value(xo) / pair.phi(xo);
        const auto res = anchored(yo, lval);

        // Tangent below the sign change: the residual is increasing there, so
        // march toward the lower end until it turns negative.
        const double f_hi = res(G.x_hat());
        if (f_hi > 0.0) {
            for (int k = 1; k <= 60; ++k) {
                const double cand = lo + (G.x_hat() - lo) * std::pow(0.5, k);
                const double fc = res(cand);
                if (fc < 0.0) {
                    const double xs = num::bisect_with_values(res, cand, fc, G.x_hat(), f_hi);
                    out.case_tag = SingleCase::tangent_threshold;
                    out.x_star = xs;
                    out.y_star = ctx.F(xs);
                    out.m = hg.deriv_at_x(xs);
                    out.q = lval - out.m * yo;
                    out.value = PiecewisePayoff(
                        0, {make_cost_piece(G, PieceKind::cost_G, lo, xs),
                            make_combo_piece(pair, out.m, out.q, xs, xo),
                            make_cost_piece(*L, PieceKind::cost_L, xo, hi)});
                    return out;
                }
            }
        }

        // No tangent: try the chord from the transformed origin to the
        // opponent's point. When the obstacle stays above it, never stopping
        // is optimal and the chord is the value.
        const double chord = lval / yo;
        bool chord_below = true;
        for (double x : classification_grid(spec, lo, xo, 1024)) {
            const double gap = hg.value_at_x(x) - chord * ctx.F(x);
            if (gap < -1e-12 * (1.0 + std::abs(hg.value_at_x(x)))) {
                chord_below = false;
                break;
            }
        }
        if (chord_below) {
            out.case_tag = SingleCase::never_stop;
            out.p = chord;
            out.m = chord;
            out.value = PiecewisePayoff(0, {make_psi_piece(pair, chord, lo, xo),
                                            make_cost_piece(*L, PieceKind::cost_L, xo, hi)});
            return out;
        }

        // Exit-boundary geometry: positive transform limit at zero with a
        // negative dip admits the two-sided stopping set. The ray through the
        // origin is tangent at x1; the line through the opponent's point is
        // tangent at x2.
        if (G.lower_limit() > 0.0 && G.stationary_x() &&
            hg.value_at_x(*G.stationary_x()) < 0.0) {
            const double stat = *G.stationary_x();
            double probe = stat;
            double f_probe = 0.0;
            bool found = false;
            for (int k = 1; k <= 60; ++k) {
                probe = lo + (stat - lo) * std::pow(0.5, k);
                f_probe = origin_tangent(probe);
                if (f_probe > 0.0) {
                    found = true;
                    break;
                }
            }
            if (found && f_hi > 0.0) {
                const double x1 = num::bisect_with_values(
                    origin_tangent, probe, f_probe, stat, hg.value_at_x(stat));
                const double f1 = res(x1);
                if (f1 < 0.0) {
                    const double x2 = num::bisect_with_values(res, x1, f1, G.x_hat(), f_hi);
                    out.case_tag = SingleCase::two_sided;
                    out.x_star_1 = x1;
                    out.x_star_2 = x2;
                    out.y_star_1 = ctx.F(x1);
                    out.y_star_2 = ctx.F(x2);
                    out.p = hg.deriv_at_x(x1);
                    out.m = hg.deriv_at_x(x2);
                    out.q = lval - out.m * yo;
                    out.value = PiecewisePayoff(
                        0, {make_psi_piece(pair, out.p, lo, x1),
                            make_cost_piece(G, PieceKind::cost_G, x1, x2),
                            make_combo_piece(pair, out.m, out.q, x2, xo),
                            make_cost_piece(*L, PieceKind::cost_L, xo, hi)});
                    return out;
                }
            }
        }
        throw NoTangent("no convex-minorant construction applies on the lower side");
    }

    // stop_above
    if (std::isnan(G.x_hat()))
        throw NoTangent("upper-side construction needs a gain cost with a "
                        "sign-change point");
    const double step0 = std::max(1e-3 * (hi - G.x_hat()), 1e-9);

    if (!x_opponent) {
        // Free problem: tangent through the transformed origin, touching on
        // the convex decreasing branch beyond the sign change.
        const double f_start = origin_tangent(G.x_hat());
        if (!(f_start > 0.0))
            throw NoTangent("origin-tangent residual not positive at the sign change");
        const num::Bracket br = num::expand_up(origin_tangent, G.x_hat(), step0, 64, hi);
        const double xs = num::bisect_with_values(origin_tangent, br.lo, br.f_lo, br.hi,
                                                  br.f_hi);
        out.case_tag = SingleCase::tangent_threshold;
        out.x_star = xs;
        out.y_star = ctx.F(xs);
        out.p = hg.deriv_at_x(xs);
        out.m = out.p;
        out.q = 0.0;
        out.value = PiecewisePayoff(0, {make_psi_piece(pair, out.p, lo, xs),
                                        make_cost_piece(G, PieceKind::cost_G, xs, hi)});
        return out;
    }

    if (!L) throw DomainError("constrained problem needs the opponent-stop cost");
    const double xo = *x_opponent;
    if (!(xo < G.x_hat() && xo > lo))
        throw DomainError("opponent threshold must lie below the sign change");
    const double yo = ctx.F(xo);
    const double lval = L->value(xo) / pair.phi(xo);
    const auto res = anchored(yo, lval);
    const double f_start = res(G.x_hat());
    if (!(f_start > 0.0))
        throw NoTangent("anchored-tangent residual not positive at the sign change");
    const num::Bracket br = num::expand_up(res, G.x_hat(), step0, 64, hi);
    const double xs = num::bisect_with_values(res, br.lo, br.f_lo, br.hi, br.f_hi);
    out.case_tag = SingleCase::tangent_threshold;
    out.x_star = xs;
    out.y_star = ctx.F(xs);
    out.m = hg.deriv_at_x(xs);
    out.q = lval - out.m * yo;
    out.value = PiecewisePayoff(0, {make_cost_piece(*L, PieceKind::cost_L, lo, xo),
                                    make_combo_piece(pair, out.m, out.q, xo, xs),
                                    make_cost_piece(G, PieceKind::cost_G, xs, hi)});
    return out;
}

}  // namespace dynkin
