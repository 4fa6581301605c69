#pragma once

#include <functional>
#include <optional>
#include <string>

namespace dynkin {

/// Singular boundary behaviour at one end of the state interval. Regular
/// (attainable and enterable) endpoints are outside scope and rejected.
enum class BoundaryClass { natural, entrance_not_exit, exit_not_entrance };

std::string to_string(BoundaryClass c);
std::optional<BoundaryClass> boundary_class_from_string(const std::string& s);

enum class ProcessPreset { bm, gbm, bessel, besq, custom };

std::string to_string(ProcessPreset p);

/// Discount rate: a positive constant or a bounded, positive function of the
/// state. Non-constant discounting forces the numerical solution branch.
class DiscountModel {
public:
    static DiscountModel constant(double r);
    static DiscountModel function(std::function<double(double)> r);

    bool is_constant() const { return constant_.has_value(); }
    double constant_value() const;  // throws DomainError when non-constant
    double operator()(double x) const;

private:
    std::optional<double> constant_;
    std::function<double(double)> fn_;
};

/// One-dimensional regular diffusion dX = mu dt + sigma dB on the open
/// interval (x_lo, x_hi), plus the discounting used for all payoffs.
/// `x_ref` is an interior reference point: the increasing/decreasing solutions
/// and the scale density are all normalised to 1 there.
struct DiffusionSpec {
    ProcessPreset preset = ProcessPreset::custom;
    std::function<double(double)> mu;
    std::function<double(double)> sigma;
    DiscountModel discount = DiscountModel::constant(0.5);
    double x_lo = 0.0;
    double x_hi = 0.0;  // either may be infinite
    BoundaryClass boundary_lo = BoundaryClass::natural;
    BoundaryClass boundary_hi = BoundaryClass::natural;  // upper must stay natural
    double x_ref = 0.0;

    // Preset parameters, kept so closed-form branches can be exact.
    double p_drift = 0.0;  // bm/gbm drift coefficient
    double p_vol = 1.0;    // bm/gbm volatility coefficient
    double p_dim = 0.0;    // bessel/besq dimension

    double sigma2(double x) const;

    /// Structural checks: interval sane, x_ref interior, sigma positive on a
    /// probe grid, discount positive. Throws DomainError.
    void validate() const;
};

DiffusionSpec make_bm(double drift, double vol, double r, double x_ref = 0.0);
DiffusionSpec make_gbm(double drift, double vol, double r, double x_ref = 1.0);
DiffusionSpec make_bessel(double dim, double r, double x_ref = 1.0);
DiffusionSpec make_besq(double dim, double r, double x_ref = 1.0);
DiffusionSpec make_custom(std::function<double(double)> mu, std::function<double(double)> sigma,
                          DiscountModel discount, double x_lo, double x_hi,
                          BoundaryClass boundary_lo, BoundaryClass boundary_hi, double x_ref);

/// Density of the scale function, exp(-int_{x_ref}^x 2 mu / sigma^2), in
/// closed form for presets and by adaptive quadrature otherwise.
std::function<double(double)> scale_density_fn(const DiffusionSpec& spec);

/// Feller-test verdict for one endpoint. `attainable` mirrors the exit-test
/// integral being finite, `enterable` the entrance-test integral.
struct EndpointReport {
    double endpoint = 0.0;
    BoundaryClass declared = BoundaryClass::natural;
    bool attainable = false;
    bool enterable = false;
    bool regular = false;  // both tests finite: outside supported scope
    std::optional<BoundaryClass> inferred;  // empty when regular
    bool matches_declaration = false;
    double exit_integral = 0.0;      // +inf recorded as HUGE_VAL
    double entrance_integral = 0.0;
    std::string note;
};

struct BoundaryReport {
    EndpointReport lower;
    EndpointReport upper;
    bool all_match() const { return lower.matches_declaration && upper.matches_declaration; }
};

/// Classifies both endpoints by numerically refining the two Feller-test
/// integrals toward each boundary. Declared classes are advisory input: a
/// mismatch is reported, not thrown. Throws NonConvergentIntegral only when a
/// refinement sequence neither stabilises nor diverges cleanly.
BoundaryReport classify_boundary(const DiffusionSpec& spec);

}  // namespace dynkin
