#include "growthlab/closed_form.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace growthlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void require_admissible(const EconomyParams& p, Family f) {
    for (const FamilyAdmissibility& adm : validate_params(p)) {
        if (adm.family != f) continue;
        if (adm.satisfied) return;
        std::string msg = std::string(family_name(f)) + " family not admissible:";
        for (const ConstraintCheck& c : adm.violated) msg += " " + c.name;
        throw AdmissibilityError(msg);
    }
    throw Error("require_admissible: family missing from validation list");
}

void require_positive_initial(const char* who, double k0) {
    if (!std::isfinite(k0) || !(k0 > 0.0))
        throw ValidationError(std::string(who) +
                              ": k0 must be finite and positive");
}

// mu(0); conserved value of gamma(1-beta)/delta c^{-sigma} z^{-beta}
// e^{-(rho-delta)t} along every family.
double mu0_of(const EconomyParams& p, double c0, double z0) {
    return (1.0 - p.beta) * p.gamma / p.delta * std::pow(c0, -p.sigma) *
           std::pow(z0, -p.beta);
}

double consistency_scale(const EconomyParams& p, double k0, double z0,
                         double c0) {
    const double zb = std::pow(z0, p.beta - 1.0);
    return std::abs(p.sigma * c0 * zb) +
           std::abs((p.rho + p.pi - p.pi * p.sigma) * k0 * zb) +
           std::abs(p.beta * p.gamma * (1.0 - p.sigma) * k0);
}

// Shared skeleton of the quadrature families: z, the scaled F tail, and the
// c, k, lambda, mu components, which coincide across the two pinnings.
struct QuadCore {
    double z, phi, c, k, lambda, mu;
};

QuadCore quad_core(const SolutionFamily& fam, double t, double quad_rel_tol) {
    const EconomyParams& p = fam.params;
    QuadCore out;
    out.z = z_at(fam.zp, t);
    out.phi = f_tail(fam.zp, t, quad_rel_tol).value;
    const double growth = std::exp(fam.steady.g_star * t);
    const double b_over_s = p.beta / p.sigma;
    out.c = fam.pinned.c0 * std::pow(fam.pinned.z0 / out.z, b_over_s) * growth;
    out.k = fam.pinned.c0 * std::pow(fam.pinned.z0, b_over_s) * out.phi /
            out.z * growth;
    out.mu = fam.pinned.c1 * std::exp((p.rho - p.delta) * t);
    out.lambda = p.delta / ((1.0 - p.beta) * p.gamma) * out.mu *
                 std::pow(out.z, p.beta);
    return out;
}

Point assemble(const SolutionFamily& fam, double t, const QuadCore& core,
               double u, const char* who) {
    if (!std::isfinite(u) || !(u > 0.0))
        throw EvaluationDomainError(std::string(who) +
                                    ": labor share left (0, inf) at t = " +
                                    std::to_string(t));
    Point pt;
    pt.t = t;
    pt.c = core.c;
    pt.k = core.k;
    pt.u = u;
    pt.z = core.z;
    pt.lambda = core.lambda;
    pt.mu = core.mu;
    pt.h = core.z * core.k / u;
    return pt;
}

}  // namespace

SolutionFamily pin_bgp(const EconomyParams& p, double k0) {
    require_positive_initial("pin_bgp", k0);
    require_admissible(p, Family::Bgp);
    SolutionFamily fam;
    fam.tag = Family::Bgp;
    fam.params = p;
    fam.steady = steady_state(p);
    fam.zp = make_zpath(p, fam.steady.z_star);
    fam.pinned.k0 = k0;
    fam.pinned.z0 = fam.steady.z_star;
    fam.pinned.c0 = fam.steady.eta * k0;
    fam.pinned.u0 = fam.steady.u_star;
    fam.pinned.h0 = fam.steady.z_star * k0 / fam.steady.u_star;
    fam.pinned.c1 = mu0_of(p, fam.pinned.c0, fam.pinned.z0);
    fam.pinned.f_inf = kNan;
    fam.pinned.g_inf = kNan;
    return fam;
}

double solve_u0_consistency(const EconomyParams& p, double k0, double z0,
                            double c0) {
    const double zb = std::pow(z0, p.beta - 1.0);
    const double bracket = p.sigma * c0 * zb -
                           (p.rho + p.pi - p.pi * p.sigma) * k0 * zb +
                           p.beta * p.gamma * (1.0 - p.sigma) * k0;
    const double scale = consistency_scale(p, k0, z0, c0);
    if (std::abs(bracket) <= 1e-12 * scale)
        throw SingularBracket(
            "solve_u0_consistency: bracket vanished, u0 undetermined");
    const double d_const = p.gamma * (1.0 - p.beta) *
                           (p.rho - p.delta + p.delta * p.sigma) / p.delta;
    const double u0 = d_const * k0 / bracket;
    if (!(u0 > 0.0))
        throw NegativeU0("solve_u0_consistency: u0 = " + std::to_string(u0) +
                         " is not positive");
    return u0;
}

SolutionFamily pin_two_integral(const EconomyParams& p, double k0, double z0,
                                std::optional<double> c0_hint,
                                double quad_rel_tol) {
    require_positive_initial("pin_two_integral", k0);
    require_admissible(p, Family::TwoIntegral);
    SolutionFamily fam;
    fam.tag = Family::TwoIntegral;
    fam.params = p;
    fam.steady = steady_state(p);
    fam.zp = make_zpath(p, z0);
    fam.pinned.k0 = k0;
    fam.pinned.z0 = z0;
    fam.pinned.f_inf = big_f_infinity(fam.zp, quad_rel_tol).value;
    fam.pinned.g_inf = kNan;
    fam.pinned.c0 = k0 * std::pow(z0, fam.zp.p_exp) / fam.pinned.f_inf;
    if (c0_hint)
        fam.pinned.c0_override_distance = std::abs(*c0_hint - fam.pinned.c0);
    fam.pinned.u0 = solve_u0_consistency(p, k0, z0, fam.pinned.c0);
    fam.pinned.h0 = z0 * k0 / fam.pinned.u0;
    fam.pinned.c1 = mu0_of(p, fam.pinned.c0, z0);
    return fam;
}

SolutionFamily pin_one_integral(const EconomyParams& p, double k0, double z0,
                                double quad_rel_tol) {
    require_positive_initial("pin_one_integral", k0);
    require_admissible(p, Family::OneIntegral);
    SolutionFamily fam;
    fam.tag = Family::OneIntegral;
    fam.params = p;
    fam.steady = steady_state(p);
    fam.zp = make_zpath(p, z0);
    fam.pinned.k0 = k0;
    fam.pinned.z0 = z0;
    fam.pinned.f_inf = big_f_infinity(fam.zp, quad_rel_tol).value;
    fam.pinned.g_inf = big_g_infinity(fam.zp, quad_rel_tol).value;
    if (!(fam.pinned.g_inf > fam.pinned.f_inf) || !(fam.pinned.f_inf > 0.0))
        throw DegenerateLimits(
            "pin_one_integral: improper limits do not satisfy "
            "0 < F_inf < G_inf");
    fam.pinned.c0 = k0 * std::pow(z0, fam.zp.p_exp) / fam.pinned.f_inf;
    fam.pinned.u0 = fam.steady.a_rate * fam.pinned.f_inf /
                    (p.delta * (fam.pinned.g_inf - fam.pinned.f_inf));
    fam.pinned.h0 = z0 * k0 / fam.pinned.u0;
    fam.pinned.c1 = mu0_of(p, fam.pinned.c0, z0);
    return fam;
}

Point eval_bgp(const SolutionFamily& fam, double t) {
    const EconomyParams& p = fam.params;
    const double growth = std::exp(fam.steady.g_star * t);
    Point pt;
    pt.t = t;
    pt.c = fam.pinned.c0 * growth;
    pt.k = fam.pinned.k0 * growth;
    pt.h = fam.pinned.h0 * growth;
    pt.u = fam.steady.u_star;
    pt.z = fam.steady.z_star;
    pt.mu = fam.pinned.c1 * std::exp((p.rho - p.delta) * t);
    pt.lambda = p.delta / ((1.0 - p.beta) * p.gamma) * pt.mu *
                std::pow(pt.z, p.beta);
    return pt;
}

Point eval_two_integral(const SolutionFamily& fam, double t,
                        double quad_rel_tol) {
    const EconomyParams& p = fam.params;
    const QuadCore core = quad_core(fam, t, quad_rel_tol);
    const double d_const = p.gamma * (1.0 - p.beta) *
                           (p.rho - p.delta + p.delta * p.sigma) / p.delta;
    const double drain = p.rho + p.pi - p.pi * p.sigma;
    // u = D Phi / [ (beta gamma (1-sigma) - drain z^{beta-1}) Phi
    //              + sigma z^{beta - beta/sigma} ]; the common e^{-eta t}
    // of the unscaled numerator and denominator is already cancelled.
    const double den =
        (p.beta * p.gamma * (1.0 - p.sigma) -
         drain * std::pow(core.z, p.beta - 1.0)) *
            core.phi +
        p.sigma * std::pow(core.z, p.beta - p.beta / p.sigma);
    if (den == 0.0)
        throw EvaluationDomainError(
            "eval_two_integral: labor-share denominator vanished at t = " +
            std::to_string(t));
    const double u = d_const * core.phi / den;
    return assemble(fam, t, core, u, "eval_two_integral");
}

Point eval_one_integral(const SolutionFamily& fam, double t,
                        double quad_rel_tol) {
    const EconomyParams& p = fam.params;
    const QuadCore core = quad_core(fam, t, quad_rel_tol);
    const double psi = g_tail(fam.zp, t, quad_rel_tol).value;
    if (!(psi > core.phi))
        throw EvaluationDomainError(
            "eval_one_integral: scaled tails lost the G > F ordering at t = " +
            std::to_string(t));
    const double u =
        fam.steady.a_rate * core.phi / (p.delta * (psi - core.phi));
    return assemble(fam, t, core, u, "eval_one_integral");
}

Point eval(const SolutionFamily& fam, double t, double quad_rel_tol) {
    switch (fam.tag) {
        case Family::Bgp:
            return eval_bgp(fam, t);
        case Family::TwoIntegral:
            return eval_two_integral(fam, t, quad_rel_tol);
        case Family::OneIntegral:
            return eval_one_integral(fam, t, quad_rel_tol);
    }
    throw Error("eval: unknown family tag");
}

Point eval_bgp_one_constant(const SolutionFamily& fam, double t, double a2) {
    const EconomyParams& p = fam.params;
    Point pt = eval_bgp(fam, t);
    const double q = (p.delta - p.rho - p.delta * p.sigma) / p.sigma;
    const double den = a2 * q * std::exp(-q * t) - p.delta;
    if (!(den < 0.0))
        throw EvaluationDomainError(
            "eval_bgp_one_constant: u denominator reached zero at t = " +
            std::to_string(t));
    pt.u = q / den;
    pt.h = fam.steady.z_star * pt.k / pt.u;
    return pt;
}

}  // namespace growthlab
