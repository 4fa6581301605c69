#include "dynkin/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dynkin/errors.hpp"

namespace dynkin::num {

namespace {

bool opposite_sign(double fa, double fb) {
    return (fa <= 0.0 && fb >= 0.0) || (fa >= 0.0 && fb <= 0.0);
}

}  // namespace

double bisect_with_values(const Fn& f, double a, double fa, double b, double fb,
                          const RootOptions& opts) {
    if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!opposite_sign(fa, fb))
        throw BracketFailure("bisect: no sign change on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    for (int it = 0; it < opts.max_iter; ++it) {
        const double m = 0.5 * (a + b);
        if (b - a < opts.x_abs_tol + opts.x_rel_tol * std::abs(m)) return m;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (opposite_sign(fa, fm)) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

double bisect(const Fn& f, double a, double b, const RootOptions& opts) {
    return bisect_with_values(f, a, f(a), b, f(b), opts);
}

Bracket expand_up(const Fn& f, double start, double initial_step, int max_doublings,
                  double hard_cap) {
    double lo = start;
    double f_lo = f(lo);
    if (f_lo == 0.0) return {lo, lo, 0.0, 0.0};
    double step = initial_step;
    for (int k = 0; k < max_doublings; ++k) {
        double hi = lo + step;
        if (hard_cap != 0.0 && hi > hard_cap) hi = hard_cap;
        const double f_hi = f(hi);
        if (opposite_sign(f_lo, f_hi)) return {lo, hi, f_lo, f_hi};
        lo = hi;
        f_lo = f_hi;
        step *= 2.0;
        if (hard_cap != 0.0 && lo >= hard_cap) break;
    }
    throw BracketFailure("expand_up: no sign change within budget from " +
                         std::to_string(start));
}

Bracket expand_down(const Fn& f, double start, double initial_step, int max_doublings,
                    double hard_floor) {
    double hi = start;
    double f_hi = f(hi);
    if (f_hi == 0.0) return {hi, hi, 0.0, 0.0};
    double step = initial_step;
    for (int k = 0; k < max_doublings; ++k) {
        double lo = hi - step;
        if (hard_floor != 0.0 && lo < hard_floor) lo = hard_floor;
        const double f_lo = f(lo);
        if (opposite_sign(f_lo, f_hi)) return {lo, hi, f_lo, f_hi};
        hi = lo;
        f_hi = f_lo;
        step *= 2.0;
        if (hard_floor != 0.0 && hi <= hard_floor) break;
    }
    throw BracketFailure("expand_down: no sign change within budget from " +
                         std::to_string(start));
}

bool ImproperResult::looks_divergent() const {
    if (converged) return false;
    if (!std::isfinite(value) || std::abs(value) > 1e250) return true;
    // Increments that fail to decay under geometric refinement indicate at
    // least logarithmic divergence.
    return std::abs(last_increment) >= 0.9 * std::abs(prev_increment) &&
           std::abs(last_increment) > 0.0;
}

double integrate(const Fn& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double error = 0.0;
    return GK::integrate(f, a, b, 15, rel_tol, &error);
}

ImproperResult integrate_improper(const Fn& f, double anchor, double toward,
                                  double rel_tol, int max_refine) {
    // Returns the integral over the interval between anchor and toward in
    // standard left-to-right orientation.
    ImproperResult res;
    if (anchor == toward) {
        res.converged = true;
        return res;
    }
    const bool infinite = std::isinf(toward);
    const bool upward = toward > anchor;

    // Truncation points approach `toward` geometrically: for an infinite
    // endpoint the window doubles, for a finite one the gap shrinks by 4x.
    double prev_cut = anchor;
    double total = 0.0;
    double gap = infinite ? std::max(1.0, std::abs(anchor)) : std::abs(toward - anchor);
    int below_tol_streak = 0;
    for (int k = 0; k < max_refine; ++k) {
        double cut;
        if (infinite) {
            gap *= 2.0;
            cut = upward ? anchor + gap : anchor - gap;
        } else {
            gap *= 0.25;
            cut = upward ? toward - gap : toward + gap;
        }
        const double piece = upward ? integrate(f, prev_cut, cut, rel_tol)
                                    : integrate(f, cut, prev_cut, rel_tol);
        total += piece;
        prev_cut = cut;
        res.refinements = k + 1;
        res.prev_increment = res.last_increment;
        res.last_increment = piece;
        const double scale = std::max(1.0, std::abs(total));
        if (std::abs(piece) < rel_tol * scale) {
            if (++below_tol_streak >= 2) {
                res.value = total;
                res.converged = true;
                return res;
            }
        } else {
            below_tol_streak = 0;
        }
        if (!std::isfinite(total) || std::abs(total) > 1e290) {
            res.value = total;
            res.converged = false;
            return res;
        }
    }
    res.value = total;
    res.converged = false;
    return res;
}

HermiteInterp::HermiteInterp(std::vector<double> x, std::vector<double> y,
                             std::vector<double> dy, bool enforce_monotone)
    : xs_(std::move(x)), ys_(std::move(y)), ds_(std::move(dy)) {
    if (xs_.size() < 2 || xs_.size() != ys_.size() || xs_.size() != ds_.size())
        throw DomainError("HermiteInterp: need matching vectors with >= 2 nodes");
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (!(xs_[i] > xs_[i - 1]))
            throw DomainError("HermiteInterp: grid not strictly increasing");
    if (enforce_monotone) {
        // Fritsch-Carlson: on each monotone cell keep (d_i, d_{i+1}) within
        // 3x the secant slope. Exact ODE derivatives normally satisfy this;
        // the clamp only acts on cells polluted by roundoff.
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
            const double secant = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
            if (secant == 0.0) continue;
            for (std::size_t j : {i, i + 1}) {
                const double ratio = ds_[j] / secant;
                if (ratio < 0.0)
                    ds_[j] = 0.0;
                else if (ratio > 3.0)
                    ds_[j] = 3.0 * secant;
            }
        }
    }
}

std::size_t HermiteInterp::cell(double x) const {
    if (x < xs_.front() || x > xs_.back())
        throw DomainError("HermiteInterp: query " + std::to_string(x) +
                          " outside [" + std::to_string(xs_.front()) + ", " +
                          std::to_string(xs_.back()) + "]");
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    if (i == 0) return 0;
    if (i >= xs_.size()) return xs_.size() - 2;
    return i - 1;
}

double HermiteInterp::eval(double x) const {
    const std::size_t i = cell(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * ys_[i] + h * h10 * ds_[i] + h01 * ys_[i + 1] + h * h11 * ds_[i + 1];
}

double HermiteInterp::eval_deriv(double x) const {
    const std::size_t i = cell(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    const double dh00 = (6 * t2 - 6 * t) / h;
    const double dh10 = 3 * t2 - 4 * t + 1;
    const double dh01 = (-6 * t2 + 6 * t) / h;
    const double dh11 = 3 * t2 - 2 * t;
    return dh00 * ys_[i] + dh10 * ds_[i] + dh01 * ys_[i + 1] + dh11 * ds_[i + 1];
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n < 2) throw DomainError("linspace: need n >= 2");
    std::vector<double> out(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + h * static_cast<double>(i);
    out.back() = b;
    return out;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    if (!(a > 0.0 && b > a)) throw DomainError("logspace: need 0 < a < b");
    std::vector<double> out = linspace(std::log(a), std::log(b), n);
    for (double& v : out) v = std::exp(v);
    out.front() = a;
    out.back() = b;
    return out;
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double v : xs) s += v;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

void Accumulator::collapse_into(std::vector<double>& stack, double value,
                                std::size_t index) {
    // Binary-counter pairwise summation: level k of the stack holds the sum of
    // a completed block of 2^k pushes. Addition order depends only on indices.
    std::size_t n = index;
    while (n & 1u) {
        value += stack.back();
        stack.pop_back();
        n >>= 1;
    }
    stack.push_back(value);
}

void Accumulator::push(double x) {
    collapse_into(sum_stack_, x, n_);
    collapse_into(sumsq_stack_, x * x, n_);
    ++n_;
}

double Accumulator::mean() const {
    if (n_ == 0) return 0.0;
    return pairwise_sum(sum_stack_) / static_cast<double>(n_);
}

double Accumulator::variance() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double s = pairwise_sum(sum_stack_);
    const double q = pairwise_sum(sumsq_stack_);
    const double v = (q - s * s / n) / (n - 1.0);
    return std::max(0.0, v);
}

double Accumulator::std_error() const {
    if (n_ < 2) return std::numeric_limits<double>::infinity();
    return std::sqrt(variance() / static_cast<double>(n_));
}

double one_sided_deriv(const Fn& f, double x, double h, int direction) {
    const double s = direction >= 0 ? 1.0 : -1.0;
    const double f0 = f(x);
    const double d1 = (f(x + s * h) - f0) / (s * h);
    const double d2 = (f(x + s * 0.5 * h) - f0) / (s * 0.5 * h);
    return 2.0 * d2 - d1;  // Richardson: cancels the O(h) term
}

}  // namespace dynkin::num
