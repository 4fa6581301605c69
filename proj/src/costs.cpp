#include "dynkin/costs.hpp"

#include <algorithm>
#include <cmath>

#include "dynkin/errors.hpp"

namespace dynkin {

namespace {

double fd_step_at(const DiffusionSpec& spec, double x, double rel) {
    double h = rel * std::max(1.0, std::abs(x));
    if (std::isfinite(spec.x_lo)) h = std::min(h, 0.45 * (x - spec.x_lo));
    if (std::isfinite(spec.x_hi)) h = std::min(h, 0.45 * (spec.x_hi - x));
    return std::max(h, 1e-12);
}

/// Ten sample points marching geometrically from x_ref toward `edge`.
std::vector<double> refining_points(double x_ref, double edge) {
    std::vector<double> xs;
    for (int k = 1; k <= 10; ++k)
        xs.push_back(edge + (x_ref - edge) * std::pow(0.25, k));
    return xs;
}

struct LimitProbe {
    std::vector<double> samples;
    bool bounded = false;
    bool vanishes = false;
    double deepest = 0.0;
};

LimitProbe probe_limit(const std::function<double(double)>& f,
                       const std::vector<double>& xs) {
    LimitProbe p;
    double head = 0.0, all = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = f(xs[i]);
        p.samples.push_back(v);
        if (!std::isfinite(v)) return p;  // bounded stays false
        all = std::max(all, std::abs(v));
        if (i < 5) head = std::max(head, std::abs(v));
    }
    p.deepest = p.samples.back();
    double tail = 0.0;
    for (std::size_t i = 5; i < p.samples.size(); ++i)
        tail = std::max(tail, std::abs(p.samples[i]));
    p.bounded = tail <= 2.0 * head + 1e-9;
    p.vanishes = std::abs(p.deepest) <= std::max(1e-7, 1e-4 * all);
    return p;
}

DerivLimit probe_deriv_limit(const std::function<double(double)>& f,
                             const std::vector<double>& xs) {
    std::vector<double> v;
    for (double x : xs) v.push_back(f(x));
    const std::size_t n = v.size();
    DerivLimit out;
    const bool growing = std::abs(v[n - 1]) > std::abs(v[n - 2]) &&
                         std::abs(v[n - 2]) > std::abs(v[n - 3]) &&
                         std::abs(v[n - 1]) > 10.0 * (std::abs(v[0]) + 1.0);
    if (growing || !std::isfinite(v[n - 1])) {
        out.kind = v[n - 1] < 0 ? LimitKind::minus_infinity : LimitKind::plus_infinity;
        return out;
    }
    out.kind = LimitKind::finite;
    out.value = v[n - 1];
    return out;
}

}  // namespace

std::vector<double> classification_grid(const DiffusionSpec& spec, double lo, double hi,
                                        std::size_t n) {
    std::vector<double> xs;
    if (std::isfinite(spec.x_lo)) {
        xs = num::logspace(lo - spec.x_lo, hi - spec.x_lo, n);
        for (double& v : xs) v += spec.x_lo;
    } else if (std::isfinite(spec.x_hi)) {
        xs = num::logspace(spec.x_hi - hi, spec.x_hi - lo, n);
        for (double& v : xs) v = spec.x_hi - v;
        std::reverse(xs.begin(), xs.end());
    } else {
        xs = num::linspace(lo, hi, n);
    }
    return xs;
}

std::string to_string(CostClass c) {
    switch (c) {
        case CostClass::A: return "A";
        case CostClass::A1: return "A1";
        case CostClass::A2: return "A2";
        default: return "none";
    }
}

CostInput CostInput::analytic(std::function<double(double)> v,
                              std::function<double(double)> d,
                              std::function<double(double)> d2) {
    return CostInput{std::move(v), std::move(d), std::move(d2)};
}

CostInput CostInput::numeric(std::function<double(double)> v) {
    return CostInput{std::move(v), nullptr, nullptr};
}

double generator_apply(const DiffusionSpec& spec, const CostProfile& H, double x) {
    if (!(x > spec.x_lo && x < spec.x_hi))
        throw DomainError("generator_apply: x outside the state interval");
    return 0.5 * spec.sigma2(x) * H.deriv2(x) + spec.mu(x) * H.deriv(x) -
           spec.discount(x) * H.value(x);
}

/// Friend of CostProfile; fills the private fields during classification.
class Classifier {
public:
    static CostProfile run(const DiffusionSpec& spec, const TransformContext& ctx,
                           const CostInput& input, const ClassifyOptions& opts) {
        CostProfile p;
        p.h_val_ = input.value;
        if (!p.h_val_) throw DomainError("cost input has no value function");
        if (input.deriv) {
            p.h_d1_ = input.deriv;
        } else {
            const auto v = input.value;
            const double rel = opts.fd_step;
            p.h_d1_ = [v, rel, spec](double x) {
                const double h = fd_step_at(spec, x, rel);
                return (v(x + h) - v(x - h)) / (2.0 * h);
            };
        }
        if (input.deriv2) {
            p.h_d2_ = input.deriv2;
        } else if (input.deriv) {
            const auto d = input.deriv;
            const double rel = opts.fd_step;
            p.h_d2_ = [d, rel, spec](double x) {
                const double h = fd_step_at(spec, x, rel);
                return (d(x + h) - d(x - h)) / (2.0 * h);
            };
        } else {
            const auto v = input.value;
            const double rel = opts.fd_step;
            p.h_d2_ = [v, rel, spec](double x) {
                const double h = fd_step_at(spec, x, rel);
                return (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h);
            };
        }
        {
            const auto val = p.h_val_;
            const auto d1 = p.h_d1_;
            const auto d2 = p.h_d2_;
            p.gen_ = [spec, val, d1, d2](double x) {
                return 0.5 * spec.sigma2(x) * d2(x) + spec.mu(x) * d1(x) -
                       spec.discount(x) * val(x);
            };
        }

        const FundamentalPair& pair = ctx.pair();
        const std::vector<double> grid =
            classification_grid(spec, pair.range_lo(), pair.range_hi(), opts.grid_n);

        // Sign pattern of h on the certification grid.
        int changes = 0;
        int first_sign = 0, prev_sign = 0;
        double change_a = 0.0, change_b = 0.0, f_a = 0.0, f_b = 0.0;
        double prev_x = grid.front(), prev_val = 0.0;
        for (double x : grid) {
            const double hv = p.gen_(x);
            const int s = std::abs(hv) <= opts.sign_tol ? 0 : (hv > 0 ? 1 : -1);
            if (s != 0) {
                if (first_sign == 0) first_sign = s;
                if (prev_sign != 0 && s != prev_sign) {
                    ++changes;
                    change_a = prev_x;
                    change_b = x;
                    f_a = prev_val;
                    f_b = hv;
                }
                prev_sign = s;
                prev_x = x;
                prev_val = hv;
            }
        }
        p.diag_.sign_changes = changes;

        // Base-class limits and integrability.
        const auto toward_lo = refining_points(spec.x_ref, pair.range_lo());
        const auto toward_hi = refining_points(spec.x_ref, pair.range_hi());
        const auto val = p.h_val_;
        const LimitProbe lo_probe = probe_limit(
            [&](double x) { return val(x) / pair.phi(x); }, toward_lo);
        const LimitProbe hi_probe = probe_limit(
            [&](double x) { return val(x) / pair.psi(x); }, toward_hi);
        p.diag_.lower_bounded = lo_probe.bounded;
        p.diag_.upper_vanishes = hi_probe.vanishes;
        p.diag_.upper_bounded = hi_probe.bounded;
        p.diag_.upper_ratio = hi_probe.deepest;
        p.a_h_ = lo_probe.bounded ? lo_probe.deepest : 0.0;

        const auto gen = p.gen_;
        const ResolventProbe res = resolvent_probe(
            spec, pair, [gen](double x) { return std::abs(gen(x)); }, spec.x_ref, 1e-7);
        p.diag_.resolvent_ok = res.converged && !res.divergent;

        const bool base_ok =
            lo_probe.bounded && hi_probe.vanishes && p.diag_.resolvent_ok;
        if (!base_ok) {
            p.class_ = CostClass::none;
            p.diag_.note = !lo_probe.bounded  ? "H/phi unbounded toward the lower endpoint"
                           : !hi_probe.vanishes ? "H/psi does not vanish toward the upper endpoint"
                                                : "resolvent of |h| did not converge";
        } else if (changes == 0) {
            p.class_ = CostClass::A;
            if (prev_sign == 0) p.diag_.note = "h within sign tolerance everywhere";
        } else if (changes == 1) {
            p.class_ = first_sign > 0 ? CostClass::A1 : CostClass::A2;
            p.x_hat_ = num::bisect_with_values(gen, change_a, f_a, change_b, f_b);
            p.y_hat_ = ctx.F(p.x_hat_);
        } else {
            p.class_ = CostClass::none;
            p.diag_.note = "h changes sign more than once on the certification grid";
        }

        // Transformed derivative toward y = 0+ (drives the regime dispatch).
        const auto hat_d = [&](double x) {
            return (p.h_d1_(x) * pair.phi(x) - val(x) * pair.phi_deriv(x)) /
                   (pair.wronskian() * pair.scale_density(x));
        };
        p.origin_ = probe_deriv_limit(hat_d, toward_lo);

        // Stationary point of the transform on (0, y_hat): the global minimum
        // for A1 (convex there), the global maximum for A2 (concave there).
        // It exists iff the transformed slope flips sign before x_hat.
        if (p.class_ == CostClass::A1 || p.class_ == CostClass::A2) {
            const int deep_sign = p.class_ == CostClass::A1 ? -1 : +1;
            const double at_hat = hat_d(p.x_hat_);
            if ((deep_sign < 0 && at_hat > 0.0) || (deep_sign > 0 && at_hat < 0.0)) {
                double lo_x = p.x_hat_;
                for (int k = 1; k <= 60; ++k) {
                    const double cand =
                        pair.range_lo() + (p.x_hat_ - pair.range_lo()) * std::pow(0.5, k);
                    const double v = hat_d(cand);
                    if ((deep_sign < 0 && v < 0.0) || (deep_sign > 0 && v > 0.0)) {
                        lo_x = cand;
                        break;
                    }
                }
                if (lo_x < p.x_hat_) {
                    const double sx = num::bisect(hat_d, lo_x, p.x_hat_);
                    p.stat_x_ = sx;
                    p.stat_y_ = ctx.F(sx);
                }
            }
        }
        return p;
    }
};

CostProfile classify_cost(const DiffusionSpec& spec, const TransformContext& ctx,
                          const CostInput& input, const ClassifyOptions& opts) {
    return Classifier::run(spec, ctx, input, opts);
}

HatFunction::HatFunction(const TransformContext& ctx, CostProfile profile)
    : ctx_(&ctx), profile_(std::move(profile)) {}

double HatFunction::value(double y) const { return value_at_x(ctx_->F_inv(y)); }

double HatFunction::deriv(double y) const { return deriv_at_x(ctx_->F_inv(y)); }

double HatFunction::value_at_x(double x) const {
    return profile_.value(x) / ctx_->pair().phi(x);
}

double HatFunction::deriv_at_x(double x) const {
    const FundamentalPair& pair = ctx_->pair();
    return (profile_.deriv(x) * pair.phi(x) - profile_.value(x) * pair.phi_deriv(x)) /
           (pair.wronskian() * pair.scale_density(x));
}

double HatFunction::second_at_x(double x) const {
    const FundamentalPair& pair = ctx_->pair();
    const double phi = pair.phi(x);
    const double sp = pair.scale_density(x);
    const double w = pair.wronskian();
    return 2.0 * profile_.gen(x) * phi * phi * phi /
           (ctx_->spec().sigma2(x) * sp * sp * w * w);
}

double HatFunction::deriv_integral_at_x(double x) const {
    const FundamentalPair& pair = ctx_->pair();
    const auto integrand = [this, &pair](double t) {
        return pair.phi(t) * profile_.gen(t) * pair.speed_density(t);
    };
    const num::ImproperResult tail =
        num::integrate_improper(integrand, x, pair.range_hi(), 1e-10);
    if (tail.looks_divergent())
        throw IntegralDivergence("transformed-derivative tail integral diverges");
    if (!tail.converged)
        throw NonConvergentIntegral("transformed-derivative tail integral stalled");
    return -tail.value / pair.wronskian();
}

}  // namespace dynkin
