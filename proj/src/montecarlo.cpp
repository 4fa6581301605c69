#include "dynkin/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "dynkin/errors.hpp"
#include "dynkin/numeric.hpp"

namespace dynkin {

namespace {

constexpr std::size_t kBlock = 1024;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// One stream per path, seeded by scrambling (seed, path index) so streams of
/// neighbouring paths do not overlap as shifted copies of each other.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path)
        : state_(mix64(seed ^ (0x9E3779B97F4A7C15ull * (path + 1)))) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = ((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = (next_u64() >> 11) * 0x1.0p-53;        // [0, 1)
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

    double uniform() { return ((next_u64() >> 11) + 0.5) * 0x1.0p-53; }  // (0, 1)

private:
    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct StepModel {
    const DiffusionSpec* spec = nullptr;
    double dt = 0.0;
    double sqdt = 0.0;
    bool const_rate = true;
    double step_factor = 1.0;  // exp(-r dt) when the rate is constant
    double lo_clamp = 0.0;
    double hi_clamp = 0.0;
    bool exit_lo = false;
    double floor = 0.0;
};

StepModel make_model(const DiffusionSpec& spec, const FundamentalPair& pair,
                     const PathConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("montecarlo: dt must be positive", 0, 0);
    if (cfg.n_paths == 0) throw ConfigError("montecarlo: n_paths must be positive", 0, 0);
    if (!(cfg.discount_floor > 0.0) || !(cfg.discount_floor < 1.0))
        throw ConfigError("montecarlo: discount_floor must lie strictly between 0 and 1", 0, 0);
    if (!(cfg.boundary_pad >= 0.0))
        throw ConfigError("montecarlo: boundary_pad must be non-negative", 0, 0);
    StepModel m;
    m.spec = &spec;
    m.dt = cfg.dt;
    m.sqdt = std::sqrt(cfg.dt);
    m.const_rate = spec.discount.is_constant();
    if (m.const_rate) m.step_factor = std::exp(-spec.discount.constant_value() * cfg.dt);
    double lo = pair.range_lo();
    double hi = pair.range_hi();
    if (std::isfinite(spec.x_lo)) lo = std::max(lo, spec.x_lo + cfg.boundary_pad);
    if (std::isfinite(spec.x_hi)) hi = std::min(hi, spec.x_hi - cfg.boundary_pad);
    if (!(lo < hi))
        throw ConfigError("montecarlo: boundary_pad leaves an empty state window", 0, 0);
    m.lo_clamp = lo;
    m.hi_clamp = hi;
    m.exit_lo = spec.boundary_lo == BoundaryClass::exit_not_entrance;
    m.floor = cfg.discount_floor;
    return m;
}

/// What one Euler step saw, kept so callers can resolve barrier crossings.
/// The same pair of uniforms serves every barrier tested against the step;
/// since the bridge crossing probability is monotone in the barrier level,
/// one draw gives a consistent joint decision (a deeper barrier is never
/// crossed without every shallower one on the same side).
struct StepDraws {
    double x_from = 0.0;
    double x_to = 0.0;
    double var = 0.0;   // sigma(x_from)^2 * dt, the bridge variance
    double u_dn = 1.0;  // uniform for barriers below the path
    double u_up = 1.0;  // uniform for barriers above the path
};

/// First-passage test for one barrier against the last step. A step ending
/// at or beyond the barrier certainly crossed; otherwise the Brownian bridge
/// between the endpoints may still have touched it, with probability
/// exp(-2 (x_from - z)(x_to - z) / var). Sampling that event removes the
/// O(sqrt(dt)) late-detection bias of endpoint-only monitoring.
bool bridge_crossed(const StepDraws& s, bool from_above, double z) {
    if (from_above) {
        if (s.x_to <= z || s.x_from <= z) return true;
        if (!(s.var > 0.0)) return false;
        return s.u_dn < std::exp(-2.0 * (s.x_from - z) * (s.x_to - z) / s.var);
    }
    if (s.x_to >= z || s.x_from >= z) return true;
    if (!(s.var > 0.0)) return false;
    return s.u_up < std::exp(-2.0 * (z - s.x_from) * (z - s.x_to) / s.var);
}

bool strategy_crossed(const StepDraws& s, const Strategy& t) {
    return !t.never && bridge_crossed(s, t.from_above, t.threshold);
}

/// One Euler-Maruyama step. Draws (normal, down uniform, up uniform) in a
/// fixed order so coupled estimators consume the stream identically, updates
/// x and the running discount in place, and records the step in `sd`.
/// Crossing resolution is the caller's job: player stops take priority over
/// absorption at an exit boundary, which is consistent with the continuous
/// path hitting the shallower level first.
void advance(const StepModel& m, NormalStream& g, double& x, double& disc, bool& clamped,
             StepDraws& sd) {
    const double z = g.next();
    sd.u_dn = g.uniform();
    sd.u_up = g.uniform();
    const double sig = m.spec->sigma(x);
    sd.x_from = x;
    sd.var = sig * sig * m.dt;
    double xn = x + m.spec->mu(x) * m.dt + sig * m.sqdt * z;
    if (xn <= m.lo_clamp) {
        if (!m.exit_lo) clamped = true;
        xn = m.lo_clamp;
    } else if (xn >= m.hi_clamp) {
        xn = m.hi_clamp;
        clamped = true;
    }
    if (m.const_rate) {
        disc *= m.step_factor;
    } else {
        disc *= std::exp(-0.5 * (m.spec->discount(x) + m.spec->discount(xn)) * m.dt);
    }
    sd.x_to = xn;
    x = xn;
}

/// Runs per_path(path_index, accumulator) over all paths, accumulating into a
/// fixed table of `width` doubles per 1024-path block. Blocks are handed to
/// workers atomically but each block's slot is private, so the table contents
/// do not depend on the number of threads.
template <class Fn>
std::vector<double> run_blocks(std::size_t n_paths, unsigned threads, std::size_t width,
                               const Fn& per_path) {
    const std::size_t n_blocks = (n_paths + kBlock - 1) / kBlock;
    std::vector<double> table(n_blocks * width, 0.0);
    auto do_block = [&](std::size_t b) {
        double* acc = table.data() + b * width;
        const std::size_t stop = std::min(n_paths, (b + 1) * kBlock);
        for (std::size_t p = b * kBlock; p < stop; ++p) per_path(p, acc);
    };
    if (threads <= 1 || n_blocks == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) do_block(b);
        return table;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mx;
    std::exception_ptr first_error;
    auto worker = [&]() {
        try {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= n_blocks) return;
                do_block(b);
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(mx);
            if (!first_error) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
    pool.reserve(n_workers);
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return table;
}

/// Combines one column across blocks in index order with pairwise summation,
/// so totals are identical no matter how blocks were scheduled.
double column_total(const std::vector<double>& table, std::size_t width, std::size_t col) {
    const std::size_t n_blocks = table.size() / width;
    std::vector<double> v(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) v[b] = table[b * width + col];
    return num::pairwise_sum(v);
}

PayoffEstimate finish(double sum, double sumsq, std::size_t n, double truncated,
                      double clamped) {
    PayoffEstimate e;
    const double dn = static_cast<double>(n);
    e.mean = sum / dn;
    double var = 0.0;
    if (n > 1) var = std::max(0.0, (sumsq - dn * e.mean * e.mean) / (dn - 1.0));
    e.standard_error = std::sqrt(var / dn);
    e.n_effective = n;
    e.fraction_truncated = truncated / dn;
    e.fraction_clamped = clamped / dn;
    return e;
}

void pair_path(const StepModel& m, const GameSpec& game, const StrategyPair& s, double x0,
               std::uint64_t seed, std::size_t pid, double* acc) {
    NormalStream g(seed, pid);
    double x = std::clamp(x0, m.lo_clamp, m.hi_clamp);
    double disc = 1.0;
    bool clamped = x != x0;
    bool truncated = false;
    double p1 = 0.0;
    double p2 = 0.0;
    // player 2 is checked first throughout: simultaneous stops resolve in
    // their favour. A start inside a stopping region pays at the start state
    // (exactly, with no discounting); later stops pay at the threshold the
    // continuous path reached.
    if (s.tau2.triggers(x)) {
        p1 = game.L(1).value(x);
        p2 = game.G(2).value(x);
    } else if (s.tau1.triggers(x)) {
        p1 = game.G(1).value(x);
        p2 = game.L(2).value(x);
    } else {
        StepDraws sd;
        for (;;) {
            if (disc < m.floor) {
                truncated = true;
                break;
            }
            advance(m, g, x, disc, clamped, sd);
            if (strategy_crossed(sd, s.tau2)) {
                p1 = disc * game.L(1).value(s.tau2.threshold);
                p2 = disc * game.G(2).value(s.tau2.threshold);
                break;
            }
            if (strategy_crossed(sd, s.tau1)) {
                p1 = disc * game.G(1).value(s.tau1.threshold);
                p2 = disc * game.L(2).value(s.tau1.threshold);
                break;
            }
            // absorbed at the exit boundary: the game ends worthless
            if (m.exit_lo && bridge_crossed(sd, true, m.lo_clamp)) break;
        }
    }
    acc[0] += p1;
    acc[1] += p1 * p1;
    acc[2] += p2;
    acc[3] += p2 * p2;
    acc[4] += truncated ? 1.0 : 0.0;
    acc[5] += clamped ? 1.0 : 0.0;
}

struct DeviationScan {
    int deviator = 1;
    bool from_above = true;          // orientation shared by all candidates
    std::vector<double> thresholds;  // sorted in first-crossing order
    Strategy opp;
};

bool crossed(bool from_above, double x, double z) { return from_above ? x <= z : x >= z; }

void deviation_path(const StepModel& m, const GameSpec& game, const DeviationScan& scan,
                    double x0, std::uint64_t seed, std::size_t pid, double* acc) {
    NormalStream g(seed, pid);
    const std::size_t n_thr = scan.thresholds.size();
    std::vector<double> vals(n_thr + 1, 0.0);  // last slot is the never rule
    double x = std::clamp(x0, m.lo_clamp, m.hi_clamp);
    double disc = 1.0;
    bool clamped = x != x0;
    bool truncated = false;
    std::size_t ptr = 0;
    const CostProfile& own_g = game.G(scan.deviator);
    const CostProfile& own_l = game.L(scan.deviator);
    // resolve stops already active at the start state (exact, paid at x0)
    bool done = false;
    {
        const bool opp_hit = scan.opp.triggers(x);
        if (scan.deviator != 2 && opp_hit) {
            for (std::size_t k = ptr; k <= n_thr; ++k) vals[k] = own_l.value(x);
            done = true;
        }
        while (!done && ptr < n_thr && crossed(scan.from_above, x, scan.thresholds[ptr])) {
            vals[ptr] = own_g.value(x);
            ++ptr;
        }
        if (!done && opp_hit) {
            for (std::size_t k = ptr; k <= n_thr; ++k) vals[k] = own_l.value(x);
            done = true;
        }
    }
    StepDraws sd;
    while (!done) {
        // with a passive opponent the never rule is exactly zero, so the path
        // is done once every threshold candidate has been crossed
        if (scan.opp.never && ptr == n_thr) break;
        if (disc < m.floor) {
            truncated = true;
            break;
        }
        advance(m, g, x, disc, clamped, sd);
        const bool opp_hit = strategy_crossed(sd, scan.opp);
        if (scan.deviator == 2) {
            // the deviator is player 2, so its candidate stops claim ties
            while (ptr < n_thr && bridge_crossed(sd, scan.from_above, scan.thresholds[ptr])) {
                vals[ptr] = disc * own_g.value(scan.thresholds[ptr]);
                ++ptr;
            }
            if (opp_hit) {
                const double v = disc * own_l.value(scan.opp.threshold);
                for (std::size_t k = ptr; k <= n_thr; ++k) vals[k] = v;
                break;
            }
        } else {
            if (opp_hit) {
                const double v = disc * own_l.value(scan.opp.threshold);
                for (std::size_t k = ptr; k <= n_thr; ++k) vals[k] = v;
                break;
            }
            while (ptr < n_thr && bridge_crossed(sd, scan.from_above, scan.thresholds[ptr])) {
                vals[ptr] = disc * own_g.value(scan.thresholds[ptr]);
                ++ptr;
            }
        }
        // absorption pays zero, so candidates still open keep their zeros
        if (m.exit_lo && bridge_crossed(sd, true, m.lo_clamp)) break;
    }
    for (std::size_t k = 0; k <= n_thr; ++k) {
        acc[2 * k] += vals[k];
        acc[2 * k + 1] += vals[k] * vals[k];
    }
    acc[2 * (n_thr + 1)] += truncated ? 1.0 : 0.0;
    acc[2 * (n_thr + 1) + 1] += clamped ? 1.0 : 0.0;
}

/// Alternative thresholds for one deviator: `grid` points on each side of the
/// solved threshold, capped toward the window edges and the opponent's rule.
/// A player whose solved rule never stops gets 2*grid probes spread between
/// the window edge and the natural cap instead.
std::vector<double> deviation_candidates(const Strategy& own, const Strategy& opp,
                                         double lo, double hi, std::size_t grid,
                                         double x0) {
    std::vector<double> zs;
    if (grid == 0) return zs;
    if (own.never) {
        double a = lo;
        double b = hi;
        if (!opp.never) {
            if (opp.from_above) a = std::max(a, opp.threshold);
            else b = std::min(b, opp.threshold);
        } else {
            const double mid = std::clamp(x0, lo, hi);
            a = std::max(a, mid - 0.75 * (mid - lo));
            b = std::min(b, mid + 0.75 * (hi - mid));
        }
        const std::size_t n = 2 * grid;
        zs.reserve(n);
        for (std::size_t k = 1; k <= n; ++k)
            zs.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(n + 1));
        return zs;
    }
    const double z = own.threshold;
    double half_lo = 0.5 * (z - lo);
    double half_hi = 0.5 * (hi - z);
    if (!opp.never) {
        const double gap = std::abs(opp.threshold - z);
        if (opp.threshold > z) half_hi = std::min(half_hi, 0.9 * gap);
        else half_lo = std::min(half_lo, 0.9 * gap);
    }
    zs.reserve(2 * grid);
    for (std::size_t k = grid; k >= 1; --k)
        zs.push_back(z - half_lo * static_cast<double>(k) / static_cast<double>(grid));
    for (std::size_t k = 1; k <= grid; ++k)
        zs.push_back(z + half_hi * static_cast<double>(k) / static_cast<double>(grid));
    return zs;
}

}  // namespace

StrategyPair equilibrium_strategies(const GameSpec& game, const EquilibriumResult& eq,
                                    double x0) {
    switch (eq.regime) {
        case Regime::interior_thresholds:
            return {Strategy::stop_below(eq.x1_star), Strategy::stop_above(eq.x2_star)};
        case Regime::exit_two_regime:
            if (x0 <= eq.x_s) return {Strategy::stop_above(eq.x_s), Strategy::none()};
            return {Strategy::stop_below(eq.x1_star), Strategy::stop_above(eq.x2_star)};
        case Regime::p1_never_stops:
            return {Strategy::none(), Strategy::stop_above(eq.x2_star)};
        case Regime::p2_never_stops:
            return {Strategy::stop_below(eq.x1_star), Strategy::none()};
        case Regime::relaxed_p1_stops:
        case Regime::relaxed_p2_stops:
        case Regime::relaxed_both: {
            const bool below = game.G(1).class_tag() == CostClass::A1;
            const int stopper = eq.regime == Regime::relaxed_p2_stops ? 2 : 1;
            const double z = stopper == 1 ? eq.x1_star : eq.x2_star;
            const Strategy rule = below ? Strategy::stop_below(z) : Strategy::stop_above(z);
            if (stopper == 1) return {rule, Strategy::none()};
            return {Strategy::none(), rule};
        }
        default:
            throw RegimeMismatch("no strategy profile for regime " + to_string(eq.regime));
    }
}

std::pair<PayoffEstimate, PayoffEstimate> estimate_payoff_pair(const GameSpec& game,
                                                               const StrategyPair& strat,
                                                               double x0,
                                                               const PathConfig& cfg) {
    const StepModel m = make_model(game.spec(), game.pair(), cfg);
    if (strat.tau1.never && strat.tau2.never) {
        // nobody ever stops: the discounted cost is identically zero
        PayoffEstimate e;
        e.n_effective = cfg.n_paths;
        e.fraction_truncated = 1.0;
        return {e, e};
    }
    if (!strat.tau1.never && !strat.tau2.never && strat.tau1.from_above &&
        !strat.tau2.from_above && !(strat.tau1.threshold < strat.tau2.threshold)) {
        throw DomainError("player 1's threshold must lie below player 2's");
    }
    const auto table =
        run_blocks(cfg.n_paths, cfg.threads, 6, [&](std::size_t p, double* acc) {
            pair_path(m, game, strat, x0, cfg.seed, p, acc);
        });
    const double trunc = column_total(table, 6, 4);
    const double clamp = column_total(table, 6, 5);
    return {finish(column_total(table, 6, 0), column_total(table, 6, 1), cfg.n_paths, trunc,
                   clamp),
            finish(column_total(table, 6, 2), column_total(table, 6, 3), cfg.n_paths, trunc,
                   clamp)};
}

PayoffEstimate estimate_payoff(const GameSpec& game, const StrategyPair& strat, double x0,
                               const PathConfig& cfg, int player) {
    if (player != 1 && player != 2) throw DomainError("player index must be 1 or 2");
    const auto both = estimate_payoff_pair(game, strat, x0, cfg);
    return player == 1 ? both.first : both.second;
}

PayoffEstimate estimate_discounted_hitting(const DiffusionSpec& spec,
                                           const FundamentalPair& pair, double x0,
                                           double target, const PathConfig& cfg) {
    const StepModel m = make_model(spec, pair, cfg);
    const double z = std::clamp(target, m.lo_clamp, m.hi_clamp);
    const double start = std::clamp(x0, m.lo_clamp, m.hi_clamp);
    const bool up = z >= start;
    const auto table =
        run_blocks(cfg.n_paths, cfg.threads, 4, [&](std::size_t p, double* acc) {
            NormalStream g(cfg.seed, p);
            double x = start;
            double disc = 1.0;
            bool clamped = start != x0;
            bool truncated = false;
            double val = 0.0;
            if (up ? x >= z : x <= z) {
                val = 1.0;
            } else {
                StepDraws sd;
                for (;;) {
                    if (disc < m.floor) {
                        truncated = true;
                        break;
                    }
                    advance(m, g, x, disc, clamped, sd);
                    if (bridge_crossed(sd, !up, z)) {
                        val = disc;
                        break;
                    }
                    if (m.exit_lo && bridge_crossed(sd, true, m.lo_clamp)) break;
                }
            }
            acc[0] += val;
            acc[1] += val * val;
            acc[2] += truncated ? 1.0 : 0.0;
            acc[3] += clamped ? 1.0 : 0.0;
        });
    return finish(column_total(table, 4, 0), column_total(table, 4, 1), cfg.n_paths,
                  column_total(table, 4, 2), column_total(table, 4, 3));
}

DeviationReport nash_deviation_test(const GameSpec& game, const EquilibriumResult& eq,
                                    double x0, const PathConfig& cfg, std::size_t grid_size,
                                    int player) {
    const StepModel m = make_model(game.spec(), game.pair(), cfg);
    const StrategyPair strat = equilibrium_strategies(game, eq, x0);
    const auto base = estimate_payoff_pair(game, strat, x0, cfg);
    DeviationReport rep;
    rep.eq_value_1 = base.first.mean;
    rep.eq_se_1 = base.first.standard_error;
    rep.eq_value_2 = base.second.mean;
    rep.eq_se_2 = base.second.standard_error;
    const bool relaxed_route = game.assumptions().route == SolveRoute::relaxed;
    const bool relaxed_below = relaxed_route && game.G(1).class_tag() == CostClass::A1;

    for (int d = 1; d <= 2; ++d) {
        if (player != 0 && player != d) continue;
        const Strategy own = d == 1 ? strat.tau1 : strat.tau2;
        const Strategy opp = d == 1 ? strat.tau2 : strat.tau1;
        DeviationScan scan;
        scan.deviator = d;
        scan.opp = opp;
        if (!own.never) scan.from_above = own.from_above;
        else if (relaxed_route) scan.from_above = relaxed_below;
        else scan.from_above = d == 1;
        std::vector<double> cand =
            deviation_candidates(own, opp, m.lo_clamp, m.hi_clamp, grid_size, x0);
        scan.thresholds = cand;
        if (scan.from_above) {
            std::sort(scan.thresholds.begin(), scan.thresholds.end(), std::greater<>());
        } else {
            std::sort(scan.thresholds.begin(), scan.thresholds.end());
        }
        const std::size_t n_thr = scan.thresholds.size();
        const std::size_t width = 2 * (n_thr + 1) + 2;
        const auto table =
            run_blocks(cfg.n_paths, cfg.threads, width, [&](std::size_t p, double* acc) {
                deviation_path(m, game, scan, x0, cfg.seed, p, acc);
            });
        const double eq_v = d == 1 ? rep.eq_value_1 : rep.eq_value_2;
        const double eq_se = d == 1 ? rep.eq_se_1 : rep.eq_se_2;
        // report threshold candidates in ascending order, then the never rule
        std::vector<std::size_t> order(n_thr);
        for (std::size_t k = 0; k < n_thr; ++k)
            order[k] = scan.from_above ? n_thr - 1 - k : k;
        for (std::size_t k = 0; k <= n_thr; ++k) {
            const std::size_t slot = k < n_thr ? order[k] : n_thr;
            const PayoffEstimate est =
                finish(column_total(table, width, 2 * slot),
                       column_total(table, width, 2 * slot + 1), cfg.n_paths, 0.0, 0.0);
            DeviationCase c;
            c.player = d;
            c.never = k == n_thr;
            c.threshold = c.never ? 0.0 : scan.thresholds[slot];
            c.estimate = est.mean;
            c.standard_error = est.standard_error;
            const double band =
                3.0 * std::sqrt(est.standard_error * est.standard_error + eq_se * eq_se);
            c.ok = c.estimate >= eq_v - band;
            rep.pass = rep.pass && c.ok;
            rep.cases.push_back(c);
        }
    }
    return rep;
}

MartingaleReport martingale_check(const GameSpec& game, const EquilibriumResult& eq,
                                  const PiecewisePayoff& v1, const PiecewisePayoff& v2,
                                  double x0, const PathConfig& cfg,
                                  std::vector<double> checkpoints) {
    const StepModel m = make_model(game.spec(), game.pair(), cfg);
    if (checkpoints.empty()) throw DomainError("martingale check needs at least one checkpoint");
    std::sort(checkpoints.begin(), checkpoints.end());
    if (!(checkpoints.front() > 0.0)) throw DomainError("checkpoint times must be positive");
    const std::size_t n_cp = checkpoints.size();
    std::vector<std::size_t> steps(n_cp);
    for (std::size_t j = 0; j < n_cp; ++j) {
        steps[j] = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(checkpoints[j] / cfg.dt)));
    }
    const StrategyPair strat = equilibrium_strategies(game, eq, x0);
    const FundamentalPair& pair = game.pair();
    const double x0c = std::clamp(x0, m.lo_clamp, m.hi_clamp);

    MartingaleReport rep;
    rep.v1_x0 = v1(x0c);
    rep.v2_x0 = v2(x0c);
    rep.phi_x0 = pair.phi(x0c);

    // per checkpoint: (sum, sumsq) for v1, v2, sub1, sub2, phi
    const std::size_t width = 10 * n_cp + 1;
    const auto table =
        run_blocks(cfg.n_paths, cfg.threads, width, [&](std::size_t p, double* acc) {
            NormalStream g(cfg.seed, p);
            double x = x0c;
            double disc = 1.0;
            bool clamped = x0c != x0;
            bool full_stopped = false, sub1_stopped = false, sub2_stopped = false;
            double f1 = 0.0, f2 = 0.0, s1 = 0.0, s2 = 0.0;
            std::size_t cp = 0;
            auto record = [&](double a, double b, double c, double d, double e) {
                double* slot = acc + 10 * cp;
                slot[0] += a;
                slot[1] += a * a;
                slot[2] += b;
                slot[3] += b * b;
                slot[4] += c;
                slot[5] += c * c;
                slot[6] += d;
                slot[7] += d * d;
                slot[8] += e;
                slot[9] += e * e;
            };
            // stops already active at the start state pay at that state
            {
                const bool t2 = strat.tau2.triggers(x);
                const bool t1 = strat.tau1.triggers(x);
                if (t1 || t2) {
                    full_stopped = true;
                    f1 = v1(x);
                    f2 = v2(x);
                }
                if (t2) {
                    sub1_stopped = true;
                    s1 = v1(x);
                }
                if (t1) {
                    sub2_stopped = true;
                    s2 = v2(x);
                }
            }
            StepDraws sd;
            for (std::size_t s = 0;; ++s) {
                while (cp < n_cp && s == steps[cp]) {
                    record(full_stopped ? f1 : disc * v1(x), full_stopped ? f2 : disc * v2(x),
                           sub1_stopped ? s1 : disc * v1(x), sub2_stopped ? s2 : disc * v2(x),
                           disc * pair.phi(x));
                    ++cp;
                }
                if (cp == n_cp) break;
                advance(m, g, x, disc, clamped, sd);
                const bool t2 = strategy_crossed(sd, strat.tau2);
                const bool t1 = strategy_crossed(sd, strat.tau1);
                if (!full_stopped && (t1 || t2)) {
                    full_stopped = true;
                    const double xs = t2 ? strat.tau2.threshold : strat.tau1.threshold;
                    f1 = disc * v1(xs);
                    f2 = disc * v2(xs);
                }
                if (!sub1_stopped && t2) {
                    sub1_stopped = true;
                    s1 = disc * v1(strat.tau2.threshold);
                }
                if (!sub2_stopped && t1) {
                    sub2_stopped = true;
                    s2 = disc * v2(strat.tau1.threshold);
                }
                if (m.exit_lo && bridge_crossed(sd, true, m.lo_clamp)) {
                    // absorbed: freeze every process at the boundary state
                    if (!full_stopped) {
                        f1 = disc * v1(m.lo_clamp);
                        f2 = disc * v2(m.lo_clamp);
                    }
                    if (!sub1_stopped) s1 = disc * v1(m.lo_clamp);
                    if (!sub2_stopped) s2 = disc * v2(m.lo_clamp);
                    const double pv = disc * pair.phi(m.lo_clamp);
                    for (; cp < n_cp; ++cp) record(f1, f2, s1, s2, pv);
                    break;
                }
            }
            acc[10 * n_cp] += clamped ? 1.0 : 0.0;
        });

    const auto stat = [&](std::size_t col) {
        return finish(column_total(table, width, col), column_total(table, width, col + 1),
                      cfg.n_paths, 0.0, 0.0);
    };
    rep.checkpoints.resize(n_cp);
    for (std::size_t j = 0; j < n_cp; ++j) {
        MartingaleCheckpoint& c = rep.checkpoints[j];
        c.t = static_cast<double>(steps[j]) * cfg.dt;
        const auto m1 = stat(10 * j + 0);
        const auto m2 = stat(10 * j + 2);
        const auto u1 = stat(10 * j + 4);
        const auto u2 = stat(10 * j + 6);
        const auto ph = stat(10 * j + 8);
        c.mean_1 = m1.mean;
        c.se_1 = m1.standard_error;
        c.mean_2 = m2.mean;
        c.se_2 = m2.standard_error;
        c.sub_mean_1 = u1.mean;
        c.sub_se_1 = u1.standard_error;
        c.sub_mean_2 = u2.mean;
        c.sub_se_2 = u2.standard_error;
        c.phi_mean = ph.mean;
        c.phi_se = ph.standard_error;
        if (std::abs(c.mean_1 - rep.v1_x0) > 3.0 * c.se_1) rep.martingale_ok = false;
        if (std::abs(c.mean_2 - rep.v2_x0) > 3.0 * c.se_2) rep.martingale_ok = false;
        if (game.spec().boundary_lo == BoundaryClass::entrance_not_exit) {
            // phi explodes at an entrance boundary and the discounted phi
            // process is a strict supermartingale (Bessel(3) makes 1/X the
            // classic strict local martingale), so equality cannot hold;
            // assert the downward drift instead.
            const double prev_phi = j == 0 ? rep.phi_x0 : rep.checkpoints[j - 1].phi_mean;
            const double prev_phi_se = j == 0 ? 0.0 : rep.checkpoints[j - 1].phi_se;
            if (c.phi_mean >
                prev_phi + 3.0 * std::sqrt(c.phi_se * c.phi_se + prev_phi_se * prev_phi_se))
                rep.phi_ok = false;
        } else if (std::abs(c.phi_mean - rep.phi_x0) > 3.0 * c.phi_se) {
            rep.phi_ok = false;
        }
        const double prev_1 = j == 0 ? rep.v1_x0 : rep.checkpoints[j - 1].sub_mean_1;
        const double prev_se_1 = j == 0 ? 0.0 : rep.checkpoints[j - 1].sub_se_1;
        const double prev_2 = j == 0 ? rep.v2_x0 : rep.checkpoints[j - 1].sub_mean_2;
        const double prev_se_2 = j == 0 ? 0.0 : rep.checkpoints[j - 1].sub_se_2;
        if (c.sub_mean_1 <
            prev_1 - 3.0 * std::sqrt(c.sub_se_1 * c.sub_se_1 + prev_se_1 * prev_se_1))
            rep.submartingale_ok = false;
        if (c.sub_mean_2 <
            prev_2 - 3.0 * std::sqrt(c.sub_se_2 * c.sub_se_2 + prev_se_2 * prev_se_2))
            rep.submartingale_ok = false;
    }
    return rep;
}

}  // namespace dynkin
