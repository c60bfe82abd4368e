#pragma once

#include <optional>

#include "growthlab/params.hpp"
#include "growthlab/zpath.hpp"

namespace growthlab {

// Requested family is not admissible for these parameters.
struct AdmissibilityError : Error {
    using Error::Error;
};

// Denominator of the u0 consistency equation vanished.
struct SingularBracket : Error {
    using Error::Error;
};

// Consistency equation produced u0 <= 0; economically unusable start.
struct NegativeU0 : Error {
    using Error::Error;
};

// A formula denominator left its valid domain during evaluation.
struct EvaluationDomainError : Error {
    using Error::Error;
};

// One sample of a solution path. lambda and mu are the shadow prices of k
// and h; z = h*u/k.
struct Point {
    double t = 0.0;
    double c = 0.0;
    double k = 0.0;
    double h = 0.0;
    double u = 0.0;
    double z = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
};

struct PinnedInitials {
    double k0 = 0.0;
    double z0 = 0.0;
    double c0 = 0.0;
    double u0 = 0.0;
    double h0 = 0.0;               // z0*k0/u0
    double c1 = 0.0;               // mu(0); also the conserved value of the first integral
    double f_inf = 0.0;            // cached improper limit of F (quadrature families)
    double g_inf = 0.0;            // cached improper limit of G (one-integral family only)
    double c0_override_distance = 0.0;  // |c0_requested - c0_pinned| when a hint was given
};

struct SolutionFamily {
    Family tag = Family::Bgp;
    EconomyParams params;
    SteadyState steady;
    ZPath zp;          // z0 = z_star for the balanced family
    PinnedInitials pinned;
};

// Balanced family: z = z_star, u = u_star, every stock grows at g_star.
// c0 = eta * k0; requires Bgp admissibility.
SolutionFamily pin_bgp(const EconomyParams& p, double k0);

// Solves the u0 consistency equation
//   D = (u0/k0) [sigma c0 z0^{beta-1} - (rho+pi-pi*sigma) k0 z0^{beta-1}
//                + beta gamma (1-sigma) k0],
// D = gamma (1-beta)(rho-delta+delta*sigma)/delta, for u0 at a given c0.
// Throws SingularBracket / NegativeU0.
double solve_u0_consistency(const EconomyParams& p, double k0, double z0, double c0);

// Transversality pins c0 = k0 z0^{(sigma-beta)/sigma} / F_inf; u0 then comes
// from the consistency equation. A c0 hint is overridden, with the distance
// recorded. Requires TwoIntegral admissibility.
SolutionFamily pin_two_integral(const EconomyParams& p, double k0, double z0,
                                std::optional<double> c0_hint = std::nullopt,
                                double quad_rel_tol = 1e-11);

// Same c0; u0 = a_rate * F_inf / (delta (G_inf - F_inf)). Requires
// OneIntegral admissibility and G_inf > F_inf.
SolutionFamily pin_one_integral(const EconomyParams& p, double k0, double z0,
                                double quad_rel_tol = 1e-11);

Point eval_bgp(const SolutionFamily& fam, double t);

// Quadrature families. The common factor exp(-eta t) of numerator and
// denominator of u, and of k, is cancelled analytically (scaled-tail form),
// so evaluation stays finite at any horizon.
Point eval_two_integral(const SolutionFamily& fam, double t, double quad_rel_tol = 1e-11);
Point eval_one_integral(const SolutionFamily& fam, double t, double quad_rel_tol = 1e-11);

// Dispatcher on fam.tag.
Point eval(const SolutionFamily& fam, double t, double quad_rel_tol = 1e-11);

// Balanced-path variant recovered from the first integral alone: c, k, z stay
// on the balanced path while
//   u(t) = q / (a2 q e^{-q t} - delta),  q = (delta - rho - delta*sigma)/sigma,
// and h = z_star k / u. a2 = 0 reproduces eval_bgp; a2 != 0 keeps the flow
// equations satisfied but breaks the mu*h transversality product (its limit
// is a2 * c1 * z_star * k0). Negative control for the transversality check.
Point eval_bgp_one_constant(const SolutionFamily& fam, double t, double a2);

}  // namespace growthlab
