#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>

#include "dynkin/diffusion.hpp"
#include "dynkin/numeric.hpp"

namespace dynkin {

enum class PairKind { closed_form, numerical };

struct FundamentalOptions {
    std::size_t grid_n = 4096;
    double ode_rel_tol = 1e-12;
    double ode_abs_tol = 1e-14;
    /// Endpoint truncation is refined until the normalised solutions move by
    /// less than this (sup over a probe grid, relative).
    double stabilization_tol = 1e-9;
    int max_refinements = 7;
    /// Working window override; NaN means choose automatically from the
    /// local e-folding rate of the ODE.
    double window_lo = std::numeric_limits<double>::quiet_NaN();
    double window_hi = std::numeric_limits<double>::quiet_NaN();
    /// Route presets through the ODE branch even when closed forms exist.
    bool force_numerical = false;
};

struct NumericalDiagnostics {
    double window_lo = 0.0, window_hi = 0.0;    // storage grid ends
    double trunc_lo = 0.0, trunc_hi = 0.0;      // final integration truncations
    int refinements = 0;
    double achieved_change = 0.0;               // last sup-rel change on probes
    double wronskian_spread = 0.0;              // max relative deviation on grid
};

/// The increasing (psi) and decreasing (phi) solutions of
///   (1/2) sigma^2 u'' + mu u' = r u
/// normalised to psi(x_ref) = phi(x_ref) = 1, together with the scale and
/// speed densities and the (constant) Wronskian
///   W = (psi' phi - phi' psi) / S'.
class FundamentalPair {
public:
    double psi(double x) const { return psi_(x); }
    double psi_deriv(double x) const { return dpsi_(x); }
    double phi(double x) const { return phi_(x); }
    double phi_deriv(double x) const { return dphi_(x); }
    double scale_density(double x) const { return sdens_(x); }
    double speed_density(double x) const;
    double wronskian() const { return w_; }

    PairKind kind() const { return kind_; }
    /// Evaluable x-range. Closed-form pairs accept any interior point; grids
    /// throw DomainError outside this range.
    double range_lo() const { return range_lo_; }
    double range_hi() const { return range_hi_; }
    double x_ref() const { return x_ref_; }

    const std::optional<NumericalDiagnostics>& diagnostics() const { return diag_; }

    // Closed-form transform shortcuts when the preset admits them.
    const std::function<double(double)>& closed_F_inv() const { return f_inv_closed_; }

    friend FundamentalPair solve_fundamental(const DiffusionSpec&, const FundamentalOptions&);

private:
    std::function<double(double)> psi_, dpsi_, phi_, dphi_, sdens_, sigma2_;
    std::function<double(double)> f_inv_closed_;  // empty unless closed form
    double w_ = 0.0;
    PairKind kind_ = PairKind::closed_form;
    double range_lo_ = 0.0, range_hi_ = 0.0;
    double x_ref_ = 0.0;
    std::optional<NumericalDiagnostics> diag_;
};

/// Builds the fundamental pair: closed forms for the constant-rate bm/gbm
/// presets, otherwise integration of the ODE inward from refined endpoint
/// truncations with the direction of integration chosen so the wanted
/// solution is the dominant one.
FundamentalPair solve_fundamental(const DiffusionSpec& spec,
                                  const FundamentalOptions& opts = {});

/// E_x[e^{-r tau(y)}]: psi(x)/psi(y) from below, phi(x)/phi(y) from above.
double laplace_hitting(const FundamentalPair& pair, double x, double y);

/// Strictly increasing coordinate change F = psi/phi and its inverse, with
/// F' = W S' / phi^2 evaluated from the identity rather than differenced.
class TransformContext {
public:
    TransformContext(const DiffusionSpec& spec, const FundamentalPair& pair);

    double F(double x) const;
    double F_deriv(double x) const;
    double F_inv(double y) const;

    double y_min() const { return y_min_; }
    double y_max() const { return y_max_; }

    const DiffusionSpec& spec() const { return *spec_; }
    const FundamentalPair& pair() const { return *pair_; }

private:
    const DiffusionSpec* spec_;
    const FundamentalPair* pair_;
    double y_min_ = 0.0, y_max_ = 0.0;
};

struct ResolventProbe {
    double value = 0.0;
    bool converged = false;
    bool divergent = false;
};

/// int f(y) G_r(x, y) m'(y) dy over the whole interval, written with the
/// Green kernel split at x. For closed-form pairs the truncations refine
/// toward the true endpoints; grid pairs stop at the working window, whose
/// tails are below tolerance for f dominated by the fundamental solutions.
/// Non-throwing variant reports convergence instead.
ResolventProbe resolvent_probe(const DiffusionSpec& spec, const FundamentalPair& pair,
                               const std::function<double(double)>& f, double x,
                               double rel_tol = 1e-9);

/// Throwing variant: IntegralDivergence when the refinement diverges,
/// NonConvergentIntegral when it stalls.
double resolvent_eval(const DiffusionSpec& spec, const FundamentalPair& pair,
                      const std::function<double(double)>& f, double x,
                      double rel_tol = 1e-9);

}  // namespace dynkin
