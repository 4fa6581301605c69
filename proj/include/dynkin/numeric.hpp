#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dynkin::num {

using Fn = std::function<double(double)>;

struct RootOptions {
    double x_abs_tol = 1e-13;
    double x_rel_tol = 1e-13;
    int max_iter = 200;
};

/// Plain bisection on [a, b]; requires f(a) and f(b) of opposite (weak) sign.
/// Derivative-free on purpose: residuals we solve on can have one-sided
/// infinite slopes where Newton-type steps would escape the bracket.
double bisect(const Fn& f, double a, double b, const RootOptions& opts = {});

/// Like bisect but takes precomputed endpoint values (saves two evals in scans).
double bisect_with_values(const Fn& f, double a, double fa, double b, double fb,
                          const RootOptions& opts = {});

struct Bracket {
    double lo, hi;
    double f_lo, f_hi;
};

/// Expand upward from `start`: probes start + step, start + 2*step, ... with the
/// step doubling each time, until the sign of f differs from f(start). Throws
/// BracketFailure after `max_doublings`.
Bracket expand_up(const Fn& f, double start, double initial_step, int max_doublings = 64,
                  double hard_cap = 0.0);

/// Mirror image of expand_up: probes downward with doubling steps.
Bracket expand_down(const Fn& f, double start, double initial_step, int max_doublings = 64,
                    double hard_floor = 0.0);

/// Adaptive Gauss-Kronrod integral over a finite interval.
double integrate(const Fn& f, double a, double b, double rel_tol = 1e-12);

struct ImproperResult {
    double value = 0.0;
    bool converged = false;
    double last_increment = 0.0;
    double prev_increment = 0.0;
    int refinements = 0;

    /// Heuristic used by callers that must distinguish a genuinely divergent
    /// integral from one that merely exhausted the refinement budget.
    bool looks_divergent() const;
};

/// Integral with a singular or infinite endpoint, computed on a refining
/// truncation sequence. `toward` is the problematic endpoint (may be +-inf);
/// `anchor` the safe one. Convergence = two consecutive increments below tol;
/// divergence is reported with converged = false rather than thrown, so the
/// caller can decide whether a diverging integral is an error or an answer.
ImproperResult integrate_improper(const Fn& f, double anchor, double toward,
                                  double rel_tol = 1e-9, int max_refine = 48);

/// Cubic Hermite interpolant on a strictly increasing grid with node values
/// and node derivatives. When `enforce_monotone` is set, node derivatives are
/// clamped to the Fritsch-Carlson region of the local secants so the evaluated
/// curve cannot overshoot between nodes.
class HermiteInterp {
public:
    HermiteInterp() = default;
    HermiteInterp(std::vector<double> x, std::vector<double> y, std::vector<double> dy,
                  bool enforce_monotone = false);

    double eval(double x) const;
    double eval_deriv(double x) const;

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }
    std::size_t size() const { return xs_.size(); }
    const std::vector<double>& nodes() const { return xs_; }
    const std::vector<double>& values() const { return ys_; }
    const std::vector<double>& derivs() const { return ds_; }

private:
    std::size_t cell(double x) const;
    std::vector<double> xs_, ys_, ds_;
};

/// n points, uniformly spaced, first = a, last = b.
std::vector<double> linspace(double a, double b, std::size_t n);

/// n points with uniform spacing in log(x); requires 0 < a < b.
std::vector<double> logspace(double a, double b, std::size_t n);

/// Sum in pairwise (tree) order; error grows like O(log n) rather than O(n).
double pairwise_sum(std::span<const double> xs);

/// Streaming mean/variance accumulator with pairwise-summed compensation.
/// Deterministic for a fixed push order.
class Accumulator {
public:
    void push(double x);
    std::size_t count() const { return n_; }
    double mean() const;
    double variance() const;  // unbiased
    double std_error() const;

private:
    void collapse_into(std::vector<double>& stack, double value, std::size_t index);
    std::vector<double> sum_stack_, sumsq_stack_;
    std::size_t n_ = 0;
};

/// Richardson-extrapolated one-sided first derivative: f'(x) from the side
/// sign(direction), steps h and h/2. Error O(h^2) for C^3 integrands.
double one_sided_deriv(const Fn& f, double x, double h, int direction);

}  // namespace dynkin::num
