#include "growthlab/zpath.hpp"

#include <algorithm>
#include <cmath>

namespace growthlab {

namespace {

// w = z^{1-beta} satisfies the logistic equation w' = a w - (1-beta) gamma w^2
// with a = a_rate, so the bracket below is the exact denominator of w(t)/w0.
double bracket_at(const ZPath& zp, double t) {
    const double om_beta = 1.0 - zp.params.beta;
    const double w0 = std::pow(zp.z0, om_beta);
    const double wstar = std::pow(zp.steady.z_star, om_beta);
    return w0 + (wstar - w0) * std::exp(-zp.steady.a_rate * t);
}

double relaxation_gap(const ZPath& zp, double t) {
    return std::abs(z_at(zp, t) / zp.steady.z_star - 1.0);
}

QuadratureResult improper(const ZPath& zp, double rate, double rel_tol,
                          double truncation_override, const char* label) {
    if (!(rate > 0.0))
        throw DegenerateLimits(std::string(label) +
                               ": kernel decay rate is not positive, improper "
                               "integral diverges");
    double horizon = truncation_override > 0.0 ? truncation_override
                                               : truncation_time(zp, rate);
    QuadratureOptions opts;
    opts.rel_tol = rel_tol;
    QuadratureResult head = integrate(
        [&](double s) { return kernel_at(zp, rate, s); }, 0.0, horizon, opts);
    // Beyond the horizon z is flat at z_star to within the truncation
    // tolerance, so the tail is exponential with a known prefactor.
    const double tail = std::pow(zp.steady.z_star, zp.p_exp) *
                        std::exp(-rate * horizon) / rate;
    QuadratureResult out;
    out.value = head.value + tail;
    out.abs_error = head.abs_error +
                    tail * std::abs(zp.p_exp) * relaxation_gap(zp, horizon);
    out.evaluations = head.evaluations + 1;
    return out;
}

// Remaining integral from t onward, evaluated in the shifted variable so no
// K - F(t) cancellation ever forms: int_0^inf z(t+s)^p exp(-rate s) ds.
QuadratureResult shifted_tail(const ZPath& zp, double rate, double t,
                              double rel_tol, const char* label) {
    if (!(rate > 0.0))
        throw DegenerateLimits(std::string(label) +
                               ": kernel decay rate is not positive, improper "
                               "integral diverges");
    if (!std::isfinite(t))
        throw ValidationError(std::string(label) + ": t must be finite");
    const double full = truncation_time(zp, rate);
    const double e_span = std::log(1e10) / rate;
    const double horizon = std::max({e_span, full - t, 1.0});
    QuadratureOptions opts;
    opts.rel_tol = rel_tol;
    QuadratureResult head = integrate(
        [&](double s) {
            return std::pow(z_at(zp, t + s), zp.p_exp) * std::exp(-rate * s);
        },
        0.0, horizon, opts);
    const double tail = std::pow(zp.steady.z_star, zp.p_exp) *
                        std::exp(-rate * horizon) / rate;
    QuadratureResult out;
    out.value = head.value + tail;
    out.abs_error =
        head.abs_error +
        tail * std::abs(zp.p_exp) * relaxation_gap(zp, t + horizon);
    out.evaluations = head.evaluations + 1;
    return out;
}

}  // namespace

ZPath make_zpath(const EconomyParams& p, double z0) {
    require_valid(p);
    if (!std::isfinite(z0) || !(z0 > 0.0))
        throw ValidationError("make_zpath: z0 must be finite and positive");
    ZPath zp;
    zp.params = p;
    zp.steady = steady_state(p);
    zp.z0 = z0;
    zp.p_exp = (p.sigma - p.beta) / p.sigma;
    return zp;
}

double z_at(const ZPath& zp, double t) {
    const double om_beta = 1.0 - zp.params.beta;
    const double br = bracket_at(zp, t);
    if (!(br > 0.0))
        throw DegenerateBracket("z_at: bracket lost positivity at t = " +
                                std::to_string(t));
    return zp.steady.z_star * zp.z0 / std::pow(br, 1.0 / om_beta);
}

double kernel_at(const ZPath& zp, double rate, double t) {
    return std::pow(z_at(zp, t), zp.p_exp) * std::exp(-rate * t);
}

QuadratureResult big_f(const ZPath& zp, double t, double rel_tol) {
    QuadratureOptions opts;
    opts.rel_tol = rel_tol;
    return integrate(
        [&](double s) { return kernel_at(zp, zp.steady.eta, s); }, 0.0, t,
        opts);
}

QuadratureResult big_g(const ZPath& zp, double t, double rel_tol) {
    QuadratureOptions opts;
    opts.rel_tol = rel_tol;
    return integrate(
        [&](double s) { return kernel_at(zp, zp.steady.r_g, s); }, 0.0, t,
        opts);
}

double truncation_time(const ZPath& zp, double rate, double z_tol,
                       double e_tol) {
    if (!(rate > 0.0))
        throw ValidationError("truncation_time: rate must be positive");
    if (!(z_tol > 0.0) || !(e_tol > 0.0))
        throw ValidationError("truncation_time: tolerances must be positive");
    const double a = zp.steady.a_rate;
    const double om_beta = 1.0 - zp.params.beta;
    const double w_ratio =
        std::pow(zp.z0 / zp.steady.z_star, om_beta);
    const double gap0 = std::abs(w_ratio - 1.0);
    // |z/z_star - 1| decays like gap0 * e^{-a t} up to a bounded prefactor;
    // two extra e-foldings of margin, then verify against the exact path.
    double t_z = 0.0;
    if (gap0 > z_tol)
        t_z = std::log(gap0 / (om_beta * z_tol)) / a + 2.0 / a;
    t_z = std::max(t_z, 0.0);
    for (int i = 0; i < 200 && relaxation_gap(zp, t_z) > z_tol; ++i)
        t_z = std::max(t_z, 1.0) * 2.0;
    double t_e = 0.0;
    if (e_tol < 1.0) t_e = std::log(1.0 / e_tol) / rate;
    return std::max(t_z, t_e);
}

QuadratureResult big_f_infinity(const ZPath& zp, double rel_tol,
                                double truncation_override) {
    return improper(zp, zp.steady.eta, rel_tol, truncation_override,
                    "big_f_infinity");
}

QuadratureResult big_g_infinity(const ZPath& zp, double rel_tol,
                                double truncation_override) {
    return improper(zp, zp.steady.r_g, rel_tol, truncation_override,
                    "big_g_infinity");
}

QuadratureResult f_tail(const ZPath& zp, double t, double rel_tol) {
    return shifted_tail(zp, zp.steady.eta, t, rel_tol, "f_tail");
}

QuadratureResult g_tail(const ZPath& zp, double t, double rel_tol) {
    return shifted_tail(zp, zp.steady.r_g, t, rel_tol, "g_tail");
}

}  // namespace growthlab
