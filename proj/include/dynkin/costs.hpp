#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dynkin/fundamental.hpp"

namespace dynkin {

/// Classification of a stopping cost by the sign pattern of h = (L - r)H:
///   A   membership in the base class (limits + integrability) only,
///   A1  h positive near the lower end with a single sign change,
///   A2  the mirror image,
///   none  any requirement failed (see diagnostics).
enum class CostClass { A, A1, A2, none };
std::string to_string(CostClass c);

/// A cost arrives as a value function plus optional analytic derivatives.
/// Missing derivatives are replaced by central differences; classification is
/// then only as trustworthy as the finite-difference noise floor.
struct CostInput {
    std::function<double(double)> value;
    std::function<double(double)> deriv;   // optional
    std::function<double(double)> deriv2;  // optional

    static CostInput analytic(std::function<double(double)> v,
                              std::function<double(double)> d,
                              std::function<double(double)> d2);
    static CostInput numeric(std::function<double(double)> v);
};

enum class LimitKind { minus_infinity, finite, plus_infinity };

struct DerivLimit {
    LimitKind kind = LimitKind::finite;
    double value = 0.0;  // meaningful only when kind == finite
};

struct ClassDiagnostics {
    int sign_changes = 0;
    bool upper_vanishes = false;   // H/psi -> 0 toward the upper end
    bool upper_bounded = false;    // H/psi stays bounded toward the upper end
    bool lower_bounded = false;    // H/phi bounded toward the lower end
    bool resolvent_ok = false;     // resolvent of |h| converges at x_ref
    double upper_ratio = 0.0;      // deepest H/psi sample
    std::string note;
};

/// A classified stopping cost: the function, its generator image, the class
/// tag, and the distinguished points used by the equilibrium construction.
class CostProfile {
public:
    double value(double x) const { return h_val_(x); }
    double deriv(double x) const { return h_d1_(x); }
    double deriv2(double x) const { return h_d2_(x); }
    /// h(x) = (1/2) sigma^2 H'' + mu H' - r H.
    double gen(double x) const { return gen_(x); }

    CostClass class_tag() const { return class_; }
    /// Sign-change point of h (NaN unless A1/A2) and its image under F.
    double x_hat() const { return x_hat_; }
    double y_hat() const { return y_hat_; }
    /// Stationary point of the transformed function on (0, y_hat), when the
    /// derivative changes sign there: a minimum for A1, a maximum for A2.
    std::optional<double> stationary_y() const { return stat_y_; }
    std::optional<double> stationary_x() const { return stat_x_; }
    /// Limit of H/phi at the lower endpoint (zero under the strict class).
    double lower_limit() const { return a_h_; }
    /// Behaviour of the transformed derivative toward y = 0+.
    const DerivLimit& hat_deriv_origin() const { return origin_; }

    const ClassDiagnostics& diagnostics() const { return diag_; }

    friend class Classifier;

private:
    std::function<double(double)> h_val_, h_d1_, h_d2_, gen_;
    CostClass class_ = CostClass::none;
    double x_hat_ = std::numeric_limits<double>::quiet_NaN();
    double y_hat_ = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> stat_y_, stat_x_;
    double a_h_ = 0.0;
    DerivLimit origin_;
    ClassDiagnostics diag_;
};

/// (1/2) sigma^2(x) H''(x) + mu(x) H'(x) - r(x) H(x).
double generator_apply(const DiffusionSpec& spec, const CostProfile& H, double x);

struct ClassifyOptions {
    std::size_t grid_n = 4096;
    /// |h| below this counts as zero in the sign-pattern scan.
    double sign_tol = 1e-7;
    /// Relative step for finite-difference fallbacks.
    double fd_step = 1e-5;
};

/// Sampling grid used for sign certification and grid checks: log-spaced in
/// the distance to a finite (hence possibly singular) endpoint, uniform on
/// the whole line.
std::vector<double> classification_grid(const DiffusionSpec& spec, double lo, double hi,
                                        std::size_t n);

CostProfile classify_cost(const DiffusionSpec& spec, const TransformContext& ctx,
                          const CostInput& input, const ClassifyOptions& opts = {});

/// The transformed cost y -> (H/phi)(F_inv(y)) with derivatives evaluated
/// through the identities rather than by differencing. The *_at_x entry
/// points skip the numerical inversion; solvers that already track the
/// x-coordinate should prefer them.
class HatFunction {
public:
    HatFunction() = default;
    HatFunction(const TransformContext& ctx, CostProfile profile);

    double value(double y) const;
    double deriv(double y) const;

    double value_at_x(double x) const;
    /// (H' phi - H phi') / (W S'), the chain-rule form of d/dy.
    double deriv_at_x(double x) const;
    /// 2 h phi^3 / (sigma^2 S'^2 W^2): a positive multiple of h, so its sign
    /// is the convexity of the transformed function.
    double second_at_x(double x) const;
    /// Independent route for the first derivative via the tail integral
    /// -(1/W) int_x^{hi} phi h m'; agrees with deriv_at_x when the tail
    /// boundary term vanishes (class membership guarantees it).
    double deriv_integral_at_x(double x) const;

    const CostProfile& profile() const { return profile_; }
    const TransformContext& ctx() const { return *ctx_; }

private:
    const TransformContext* ctx_ = nullptr;
    CostProfile profile_;
};

}  // namespace dynkin
