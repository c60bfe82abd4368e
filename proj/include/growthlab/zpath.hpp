#pragma once

#include "growthlab/params.hpp"
#include "growthlab/quadrature.hpp"

namespace growthlab {

// Bracket of the z closed form lost positivity (only reachable through
// overflow-scale inputs; the analytic bracket is positive for t >= 0).
struct DegenerateBracket : Error {
    using Error::Error;
};

// Improper-integral limits came out non-increasing (G_inf <= F_inf) or
// nonpositive, so the one-integral pinning has no usable denominator.
struct DegenerateLimits : Error {
    using Error::Error;
};

// Closed-form path of z = hu/k started from z0, plus the two decaying
// kernels integrated along it:
//   F(t) = int_0^t z(s)^p exp(-eta s) ds,   p = (sigma-beta)/sigma
//   G(t) = int_0^t z(s)^p exp(-r_g s) ds
// z relaxes to z_star at rate a_rate, so both integrands settle to constants
// times their exponential and the improper limits exist whenever the decay
// rate is positive.
struct ZPath {
    EconomyParams params;
    SteadyState steady;
    double z0 = 0.0;
    double p_exp = 0.0;  // (sigma-beta)/sigma
};

// Requires base-valid params and z0 > 0.
ZPath make_zpath(const EconomyParams& p, double z0);

// Monotone path from z0 to z_star; exact solution of
// dz/dt = z ((delta+pi)/beta - gamma z^{1-beta}).
double z_at(const ZPath& zp, double t);

// Kernel value z(t)^p * exp(-rate*t).
double kernel_at(const ZPath& zp, double rate, double t);

QuadratureResult big_f(const ZPath& zp, double t, double rel_tol = 1e-11);
QuadratureResult big_g(const ZPath& zp, double t, double rel_tol = 1e-11);

// Time T at which both |z(T)/z_star - 1| <= z_tol and exp(-rate*T) <= e_tol.
double truncation_time(const ZPath& zp, double rate, double z_tol = 1e-12,
                       double e_tol = 1e-10);

// Improper limits: quadrature to the truncation time plus the analytic tail
// z_star^p exp(-rate T)/rate. truncation_override > 0 replaces the computed
// horizon (used by the horizon-doubling stability check).
QuadratureResult big_f_infinity(const ZPath& zp, double rel_tol = 1e-11,
                                double truncation_override = 0.0);
QuadratureResult big_g_infinity(const ZPath& zp, double rel_tol = 1e-11,
                                double truncation_override = 0.0);

// Scaled tails, finite at every t and free of the K - F(t) cancellation:
//   f_tail(t) = exp(eta t) (F_inf - F(t)) = int_0^inf z(t+s)^p exp(-eta s) ds
//   g_tail(t) = exp(r_g t) (G_inf - G(t))
// The closed-form families consume these instead of forming the difference.
QuadratureResult f_tail(const ZPath& zp, double t, double rel_tol = 1e-11);
QuadratureResult g_tail(const ZPath& zp, double t, double rel_tol = 1e-11);

}  // namespace growthlab
