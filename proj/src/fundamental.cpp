#include "dynkin/fundamental.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint/integrate/integrate_times.hpp>
#include <boost/numeric/odeint/stepper/dense_output_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>

#include "dynkin/errors.hpp"

namespace dynkin {

namespace {

using State = std::array<double, 2>;

struct OdeRhs {
    const DiffusionSpec* spec;
    void operator()(const State& u, State& du, double x) const {
        const double s2 = spec->sigma2(x);
        du[0] = u[1];
        du[1] = 2.0 * (spec->discount(x) * u[0] - spec->mu(x) * u[1]) / s2;
    }
};

// Characteristic roots of (1/2) sigma^2 s^2 + mu s - r = 0: the local
// exponential growth rates of the increasing (+) and decreasing (-) solutions.
double char_root(const DiffusionSpec& spec, double x, int sign) {
    const double s2 = spec.sigma2(x);
    const double mu = spec.mu(x);
    const double disc = std::sqrt(mu * mu + 2.0 * s2 * spec.discount(x));
    return (-mu + (sign >= 0 ? disc : -disc)) / s2;
}

// e-folding rate of F = psi/phi (sum of both solutions' rates).
double f_rate(const DiffusionSpec& spec, double x) {
    const double s2 = spec.sigma2(x);
    const double mu = spec.mu(x);
    return 2.0 * std::sqrt(mu * mu + 2.0 * s2 * spec.discount(x)) / s2;
}

// Walk from `from` in direction dir until the accumulated F e-folds reach the
// budget (or a distance cap, for processes whose rate decays too fast).
double march_efolds(const DiffusionSpec& spec, double from, int dir, double efolds) {
    const double cap = 1e7 * (1.0 + std::abs(from));
    double x = from;
    double acc = 0.0;
    while (acc < efolds) {
        const double rate = std::max(f_rate(spec, x), 1e-12);
        const double step = 0.25 / rate;
        x += dir * step;
        acc += rate * step;
        if (std::abs(x - from) > cap) break;
    }
    return x;
}

std::vector<double> build_grid(const DiffusionSpec& spec, double lo, double hi,
                               std::size_t n) {
    std::vector<double> nodes;
    if (std::isfinite(spec.x_lo)) {
        nodes = num::logspace(lo - spec.x_lo, hi - spec.x_lo, n);
        for (double& v : nodes) v += spec.x_lo;
    } else if (std::isfinite(spec.x_hi)) {
        nodes = num::logspace(spec.x_hi - hi, spec.x_hi - lo, n);
        for (double& v : nodes) v = spec.x_hi - v;
        std::reverse(nodes.begin(), nodes.end());
    } else {
        nodes = num::linspace(lo, hi, n);
    }
    // Snap the nearest node onto x_ref so normalisation is exact at a node.
    auto it = std::min_element(nodes.begin(), nodes.end(), [&](double a, double b) {
        return std::abs(a - spec.x_ref) < std::abs(b - spec.x_ref);
    });
    *it = spec.x_ref;
    return nodes;
}

struct Solved {
    std::vector<double> val, der;
};

Solved integrate_over(const DiffusionSpec& spec, const std::vector<double>& nodes,
                      double start, const State& ic, bool ascending,
                      const FundamentalOptions& opts) {
    namespace ode = boost::numeric::odeint;
    std::vector<double> times;
    times.reserve(nodes.size() + 1);
    if (ascending) {
        times.push_back(start);
        times.insert(times.end(), nodes.begin(), nodes.end());
    } else {
        times.push_back(start);
        times.insert(times.end(), nodes.rbegin(), nodes.rend());
    }

    Solved out;
    out.val.reserve(nodes.size());
    out.der.reserve(nodes.size());
    State u = ic;
    bool first = true;
    auto stepper = ode::make_dense_output(opts.ode_abs_tol, opts.ode_rel_tol,
                                          ode::runge_kutta_dopri5<State>());
    const double dt0 = (ascending ? 1.0 : -1.0) * 1e-6 *
                       std::max(1.0, std::abs(times.back() - times.front()));
    ode::integrate_times(stepper, OdeRhs{&spec}, u, times.begin(), times.end(), dt0,
                         [&](const State& s, double) {
                             if (first) {
                                 first = false;  // skip the truncation point itself
                                 return;
                             }
                             out.val.push_back(s[0]);
                             out.der.push_back(s[1]);
                         });
    if (!ascending) {
        std::reverse(out.val.begin(), out.val.end());
        std::reverse(out.der.begin(), out.der.end());
    }
    for (double v : out.val)
        if (!std::isfinite(v) || std::abs(v) > 1e290)
            throw SolveFailure("fundamental solution overflowed the working window; "
                               "narrow the window or rescale the problem");
    return out;
}

void normalize_at(Solved& s, std::size_t ref_idx) {
    const double scale = s.val[ref_idx];
    if (!(std::abs(scale) > 0.0) || !std::isfinite(scale))
        throw SolveFailure("fundamental solution vanished at the reference point");
    for (double& v : s.val) v /= scale;
    for (double& v : s.der) v /= scale;
}

double probe_change(const Solved& a, const Solved& b, std::size_t stride) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.val.size(); i += stride) {
        const double denom = std::max({std::abs(a.val[i]), std::abs(b.val[i]), 1e-280});
        worst = std::max(worst, std::abs(a.val[i] - b.val[i]) / denom);
    }
    return worst;
}

}  // namespace

double FundamentalPair::speed_density(double x) const {
    return 2.0 / (sigma2_(x) * sdens_(x));
}

FundamentalPair solve_fundamental(const DiffusionSpec& spec, const FundamentalOptions& opts) {
    spec.validate();
    FundamentalPair pair;
    pair.x_ref_ = spec.x_ref;
    {
        const auto sigma = spec.sigma;
        pair.sigma2_ = [sigma](double x) {
            const double s = sigma(x);
            return s * s;
        };
    }

    const bool closed_ok = !opts.force_numerical && spec.discount.is_constant() &&
                           (spec.preset == ProcessPreset::bm || spec.preset == ProcessPreset::gbm);

    // Working window: wide enough that psi and phi each decay ~25 e-folds
    // toward their vanishing endpoint, so truncation tails are far below the
    // quadrature tolerances used downstream.
    const double efolds_core = 50.0;
    double core_lo, core_hi;
    if (std::isfinite(spec.x_lo))
        core_lo = spec.x_lo + 1e-7 * (spec.x_ref - spec.x_lo);
    else
        core_lo = march_efolds(spec, spec.x_ref, -1, efolds_core);
    if (std::isfinite(spec.x_hi))
        core_hi = spec.x_hi - 1e-7 * (spec.x_hi - spec.x_ref);
    else
        core_hi = march_efolds(spec, spec.x_ref, +1, efolds_core);
    if (std::isfinite(opts.window_lo)) core_lo = opts.window_lo;
    if (std::isfinite(opts.window_hi)) core_hi = opts.window_hi;
    if (!(core_lo < spec.x_ref && spec.x_ref < core_hi))
        throw DomainError("working window must contain x_ref");
    pair.range_lo_ = core_lo;
    pair.range_hi_ = core_hi;

    if (closed_ok) {
        pair.kind_ = PairKind::closed_form;
        const double r = spec.discount.constant_value();
        const double x0 = spec.x_ref;
        if (spec.preset == ProcessPreset::bm) {
            const double mu = spec.p_drift, s2 = spec.p_vol * spec.p_vol;
            const double disc = std::sqrt(mu * mu + 2.0 * s2 * r);
            const double bp = (-mu + disc) / s2, bm = (-mu - disc) / s2;
            pair.psi_ = [bp, x0](double x) { return std::exp(bp * (x - x0)); };
            pair.dpsi_ = [bp, x0](double x) { return bp * std::exp(bp * (x - x0)); };
            pair.phi_ = [bm, x0](double x) { return std::exp(bm * (x - x0)); };
            pair.dphi_ = [bm, x0](double x) { return bm * std::exp(bm * (x - x0)); };
            pair.w_ = bp - bm;
            pair.f_inv_closed_ = [bp, bm, x0](double y) { return x0 + std::log(y) / (bp - bm); };
        } else {
            const double mu = spec.p_drift, s2 = spec.p_vol * spec.p_vol;
            // roots of (1/2) s2 b(b-1) + mu b - r = 0
            const double half = 0.5 - mu / s2;
            const double disc = std::sqrt(half * half + 2.0 * r / s2);
            const double bp = half + disc, bm = half - disc;
            pair.psi_ = [bp, x0](double x) { return std::pow(x / x0, bp); };
            pair.dpsi_ = [bp, x0](double x) { return bp / x0 * std::pow(x / x0, bp - 1.0); };
            pair.phi_ = [bm, x0](double x) { return std::pow(x / x0, bm); };
            pair.dphi_ = [bm, x0](double x) { return bm / x0 * std::pow(x / x0, bm - 1.0); };
            pair.w_ = (bp - bm) / x0;
            pair.f_inv_closed_ = [bp, bm, x0](double y) {
                return x0 * std::pow(y, 1.0 / (bp - bm));
            };
        }
        pair.sdens_ = scale_density_fn(spec);
        return pair;
    }

    // --- numerical branch -----------------------------------------------

    pair.kind_ = PairKind::numerical;
    const std::vector<double> nodes = build_grid(spec, core_lo, core_hi, opts.grid_n);
    const std::size_t ref_idx = static_cast<std::size_t>(
        std::find(nodes.begin(), nodes.end(), spec.x_ref) - nodes.begin());
    const std::size_t stride = std::max<std::size_t>(1, nodes.size() / 64);

    // Truncation schedules. Finite endpoints: close the remaining gap by 4x
    // per refinement. Infinite: push the window out by a doubling number of
    // F e-folds. Contamination from the unwanted solution decays only like a
    // power of the truncation for scale-family processes, so an additive push
    // would gain less per refinement as k grows; doubling keeps the gain at
    // least geometric in both the exponential and the power-law case.
    const auto trunc_lo = [&](int k) {
        if (std::isfinite(spec.x_lo))
            return spec.x_lo + (core_lo - spec.x_lo) * std::pow(0.25, k + 1);
        return core_lo - (10.0 * std::pow(2.0, k)) / std::max(f_rate(spec, core_lo), 1e-12);
    };
    const auto trunc_hi = [&](int k) {
        if (std::isfinite(spec.x_hi))
            return spec.x_hi - (spec.x_hi - core_hi) * std::pow(0.25, k + 1);
        return core_hi + (10.0 * std::pow(2.0, k)) / std::max(f_rate(spec, core_hi), 1e-12);
    };

    const auto ic_psi = [&](double a) -> State {
        if (!std::isfinite(spec.x_lo)) return {1.0, char_root(spec, a, +1)};
        if (spec.boundary_lo == BoundaryClass::entrance_not_exit) return {1.0, 0.0};
        if (spec.boundary_lo == BoundaryClass::exit_not_entrance)
            return {a - spec.x_lo, 1.0};  // psi has a finite positive slope at exit
        return {0.0, 1.0};  // finite natural endpoint: psi vanishes
    };
    const auto ic_phi = [&](double b) -> State {
        if (!std::isfinite(spec.x_hi)) return {1.0, char_root(spec, b, -1)};
        return {0.0, -1.0};  // finite natural upper endpoint: phi vanishes
    };

    Solved psi_cur, phi_cur, psi_prev, phi_prev;
    NumericalDiagnostics diag;
    diag.window_lo = core_lo;
    diag.window_hi = core_hi;
    bool stable = false;
    for (int k = 0; k < opts.max_refinements; ++k) {
        const double a = trunc_lo(k), b = trunc_hi(k);
        psi_cur = integrate_over(spec, nodes, a, ic_psi(a), true, opts);
        phi_cur = integrate_over(spec, nodes, b, ic_phi(b), false, opts);
        normalize_at(psi_cur, ref_idx);
        normalize_at(phi_cur, ref_idx);
        diag.refinements = k + 1;
        diag.trunc_lo = a;
        diag.trunc_hi = b;
        if (k > 0) {
            const double change = std::max(probe_change(psi_cur, psi_prev, stride),
                                           probe_change(phi_cur, phi_prev, stride));
#ifdef DYNKIN_TRACE_REFINE
            std::fprintf(stderr, "refine k=%d a=%g b=%g dpsi=%g dphi=%g\n", k, a, b,
                         probe_change(psi_cur, psi_prev, stride),
                         probe_change(phi_cur, phi_prev, stride));
#endif
            diag.achieved_change = change;
            if (change < opts.stabilization_tol) {
                stable = true;
                break;
            }
        }
        psi_prev = psi_cur;
        phi_prev = phi_cur;
    }
    if (!stable) {
        char change_text[32];
        std::snprintf(change_text, sizeof(change_text), "%.3e", diag.achieved_change);
        throw SolveFailure(std::string("endpoint truncation refinement did not stabilise "
                                       "(last change ") +
                           change_text + ")");
    }

    // Monotonicity up to roundoff: where a solution is nearly flat (psi near
    // an entrance boundary) adjacent nodes can tie in double precision, so
    // only genuine decreases beyond a few ulps are treated as failures.
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double slack_psi = 8.0 * std::numeric_limits<double>::epsilon() *
                                 std::abs(psi_cur.val[i]);
        const double slack_phi = 8.0 * std::numeric_limits<double>::epsilon() *
                                 std::abs(phi_cur.val[i]);
        if (!(psi_cur.val[i] >= psi_cur.val[i - 1] - slack_psi))
            throw SolveFailure("increasing solution lost monotonicity on the grid");
        if (!(phi_cur.val[i] <= phi_cur.val[i - 1] + slack_phi))
            throw SolveFailure("decreasing solution lost monotonicity on the grid");
    }

    // Scale density: closed form for presets, else a cumulative integral of
    // -2 mu / sigma^2 anchored at x_ref, stored with exact node derivatives.
    if (spec.preset != ProcessPreset::custom) {
        pair.sdens_ = scale_density_fn(spec);
    } else {
        const auto integrand = [&spec](double t) {
            return 2.0 * spec.mu(t) / spec.sigma2(t);
        };
        std::vector<double> logs(nodes.size(), 0.0), dlogs(nodes.size());
        for (std::size_t i = ref_idx; i + 1 < nodes.size(); ++i)
            logs[i + 1] = logs[i] - num::integrate(integrand, nodes[i], nodes[i + 1], 1e-13);
        for (std::size_t i = ref_idx; i > 0; --i)
            logs[i - 1] = logs[i] + num::integrate(integrand, nodes[i - 1], nodes[i], 1e-13);
        for (std::size_t i = 0; i < nodes.size(); ++i) dlogs[i] = -integrand(nodes[i]);
        auto interp = std::make_shared<num::HermiteInterp>(nodes, std::move(logs),
                                                           std::move(dlogs));
        pair.sdens_ = [interp](double x) { return std::exp(interp->eval(x)); };
    }

    auto psi_i = std::make_shared<num::HermiteInterp>(nodes, psi_cur.val, psi_cur.der, true);
    auto phi_i = std::make_shared<num::HermiteInterp>(nodes, phi_cur.val, phi_cur.der, true);
    pair.psi_ = [psi_i](double x) { return psi_i->eval(x); };
    pair.dpsi_ = [psi_i](double x) { return psi_i->eval_deriv(x); };
    pair.phi_ = [phi_i](double x) { return phi_i->eval(x); };
    pair.dphi_ = [phi_i](double x) { return phi_i->eval_deriv(x); };

    // Wronskian at the reference node (both solutions are 1 there, S' = 1),
    // with the spread over the grid kept as a diagnostic.
    const double w_ref = psi_cur.der[ref_idx] - phi_cur.der[ref_idx];
    double spread = 0.0;
    for (std::size_t i = 0; i < nodes.size(); i += stride) {
        const double w_i = (psi_cur.der[i] * phi_cur.val[i] - phi_cur.der[i] * psi_cur.val[i]) /
                           pair.sdens_(nodes[i]);
        spread = std::max(spread, std::abs(w_i - w_ref) / std::abs(w_ref));
    }
    diag.wronskian_spread = spread;
    if (!(w_ref > 0.0))
        throw SolveFailure("Wronskian is not positive; solutions are not independent");
    pair.w_ = w_ref;
    pair.diag_ = diag;
    return pair;
}

double laplace_hitting(const FundamentalPair& pair, double x, double y) {
    if (x == y) return 1.0;
    if (x < y) return pair.psi(x) / pair.psi(y);
    return pair.phi(x) / pair.phi(y);
}

TransformContext::TransformContext(const DiffusionSpec& spec, const FundamentalPair& pair)
    : spec_(&spec), pair_(&pair) {
    y_min_ = F(pair.range_lo());
    y_max_ = F(pair.range_hi());
}

double TransformContext::F(double x) const { return pair_->psi(x) / pair_->phi(x); }

double TransformContext::F_deriv(double x) const {
    const double phi = pair_->phi(x);
    return pair_->wronskian() * pair_->scale_density(x) / (phi * phi);
}

double TransformContext::F_inv(double y) const {
    if (pair_->closed_F_inv()) return pair_->closed_F_inv()(y);
    if (!(y >= y_min_ && y <= y_max_))
        throw DomainError("F_inv: y = " + std::to_string(y) + " outside transform range");
    if (y == y_min_) return pair_->range_lo();
    if (y == y_max_) return pair_->range_hi();
    const num::Fn g = [&](double x) { return F(x) - y; };
    num::RootOptions ro;
    ro.x_abs_tol = 1e-14;
    ro.x_rel_tol = 1e-14;
    return num::bisect(g, pair_->range_lo(), pair_->range_hi(), ro);
}

ResolventProbe resolvent_probe(const DiffusionSpec& spec, const FundamentalPair& pair,
                               const std::function<double(double)>& f, double x,
                               double rel_tol) {
    const num::Fn lo_integrand = [&](double t) {
        return pair.psi(t) * f(t) * pair.speed_density(t);
    };
    const num::Fn hi_integrand = [&](double t) {
        return pair.phi(t) * f(t) * pair.speed_density(t);
    };
    // Closed-form pairs evaluate everywhere, so their truncations refine
    // toward the true endpoints and divergence far out is still caught. Grid
    // pairs stop at the working window; the window is sized so the omitted
    // tails are below the quadrature tolerance for admissible f.
    const bool closed = pair.kind() == PairKind::closed_form;
    const double toward_lo = closed ? spec.x_lo : pair.range_lo();
    const double toward_hi = closed ? spec.x_hi : pair.range_hi();
    const num::ImproperResult lo = num::integrate_improper(lo_integrand, x, toward_lo, rel_tol);
    const num::ImproperResult hi = num::integrate_improper(hi_integrand, x, toward_hi, rel_tol);
    ResolventProbe out;
    out.divergent = lo.looks_divergent() || hi.looks_divergent();
    out.converged = lo.converged && hi.converged;
    out.value = (pair.phi(x) * lo.value + pair.psi(x) * hi.value) / pair.wronskian();
    return out;
}

double resolvent_eval(const DiffusionSpec& spec, const FundamentalPair& pair,
                      const std::function<double(double)>& f, double x, double rel_tol) {
    const ResolventProbe p = resolvent_probe(spec, pair, f, x, rel_tol);
    if (p.divergent) throw IntegralDivergence("resolvent integral diverges at x = " +
                                              std::to_string(x));
    if (!p.converged)
        throw NonConvergentIntegral("resolvent integral did not stabilise at x = " +
                                    std::to_string(x));
    return p.value;
}

}  // namespace dynkin
