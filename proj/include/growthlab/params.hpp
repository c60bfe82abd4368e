#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace growthlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hard parameter rejection: nonfinite input, sigma == 1, sigma == beta,
// or a base invariant violated where the caller required a usable set.
struct ValidationError : Error {
    using Error::Error;
};

// Structural parameters of the two-sector model. All rates are per unit time.
struct EconomyParams {
    double sigma = 2.0;   // inverse intertemporal elasticity, > 0, != 1, != beta
    double rho   = 0.05;  // discount rate, > 0
    double beta  = 0.33;  // physical-capital share in goods production, in (0,1)
    double gamma = 1.0;   // goods-sector productivity, > 0
    double delta = 0.11;  // education-sector productivity, > 0
    double pi    = 0.04;  // depreciation-like drain on physical capital, >= 0
};

// Relative slack applied to every admissibility comparison so boundary
// cases fail deterministically instead of flipping on rounding.
inline constexpr double kComparisonSlack = 1e-12;

// Derived steady-state quantities. eta is the decay rate of the first
// quadrature kernel and also the balanced consumption/capital ratio.
struct SteadyState {
    double z_star;   // long-run value of z = hu/k
    double u_star;   // long-run share of labor in goods production
    double g_star;   // common growth rate of c, k, h
    double eta;      // (delta+pi-pi*beta)/beta - (delta-rho)/sigma
    double r_g;      // (delta*sigma-delta+rho)/sigma, second kernel decay rate
    double a_rate;   // (1-beta)*(delta+pi)/beta, relaxation rate of z
};

struct ConstraintCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
};

enum class Family { Bgp, TwoIntegral, OneIntegral };

const char* family_name(Family f);

struct FamilyAdmissibility {
    Family family;
    bool satisfied = false;
    std::vector<ConstraintCheck> violated;  // empty iff satisfied
};

// Throws ValidationError on nonfinite input or sigma == 1 / sigma == beta
// (within kComparisonSlack). Returns the remaining base-invariant breaches
// without throwing; an empty vector means the set is usable.
std::vector<ConstraintCheck> check_base(const EconomyParams& p);

// check_base + throw when any base invariant fails.
void require_valid(const EconomyParams& p);

// Per-family admissibility. Base breaches are folded into every family's
// violation list. Order: Bgp, TwoIntegral, OneIntegral.
std::vector<FamilyAdmissibility> validate_params(const EconomyParams& p);

// Requires a base-valid p. u_star outside (0,1] is reported by the caller,
// not rejected here.
SteadyState steady_state(const EconomyParams& p);

// The single sigma consistent with the one-integral reduction given
// (beta, rho, delta, pi): beta*(rho+pi) / (2*pi*beta - delta + delta*beta - pi).
// Empty when the denominator is not positive.
std::optional<double> restricted_sigma(const EconomyParams& p);

// |sigma - restricted_sigma| <= tol, false when no restricted value exists.
bool on_restricted_manifold(const EconomyParams& p, double tol = 1e-9);

}  // namespace growthlab
