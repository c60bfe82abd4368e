#include "growthlab/params.hpp"

#include <cmath>
#include <sstream>

namespace growthlab {

namespace {

bool finite(double x) { return std::isfinite(x); }

// strict x > y with relative slack so boundary cases fail deterministically
bool gt(double x, double y) {
    double scale = std::max({std::fabs(x), std::fabs(y), 1.0});
    return x > y + kComparisonSlack * scale;
}

bool near(double x, double y) {
    double scale = std::max({std::fabs(x), std::fabs(y), 1.0});
    return std::fabs(x - y) <= kComparisonSlack * scale;
}

void push_if(std::vector<ConstraintCheck>& out, bool ok, const char* name, double lhs,
             double rhs) {
    if (!ok) out.push_back({name, lhs, rhs});
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::Bgp: return "bgp";
        case Family::TwoIntegral: return "two-integral";
        case Family::OneIntegral: return "one-integral";
    }
    return "?";
}

std::vector<ConstraintCheck> check_base(const EconomyParams& p) {
    for (double v : {p.sigma, p.rho, p.beta, p.gamma, p.delta, p.pi})
        if (!finite(v)) throw ValidationError("nonfinite parameter value");
    if (near(p.sigma, 1.0))
        throw ValidationError("sigma == 1 is outside the model (log utility limit)");
    if (near(p.sigma, p.beta))
        throw ValidationError("sigma == beta degenerates the kernel exponent");

    std::vector<ConstraintCheck> bad;
    push_if(bad, gt(p.sigma, 0.0), "sigma_positive", p.sigma, 0.0);
    push_if(bad, gt(p.rho, 0.0), "rho_positive", p.rho, 0.0);
    push_if(bad, gt(p.beta, 0.0) && gt(1.0, p.beta), "beta_in_unit_interval", p.beta, 0.0);
    push_if(bad, gt(p.gamma, 0.0), "gamma_positive", p.gamma, 0.0);
    push_if(bad, gt(p.delta, 0.0), "delta_positive", p.delta, 0.0);
    push_if(bad, p.pi >= 0.0, "pi_nonnegative", p.pi, 0.0);
    return bad;
}

void require_valid(const EconomyParams& p) {
    auto bad = check_base(p);
    if (bad.empty()) return;
    std::ostringstream os;
    os << "invalid parameters:";
    for (const auto& b : bad) os << " " << b.name;
    throw ValidationError(os.str());
}

SteadyState steady_state(const EconomyParams& p) {
    require_valid(p);
    SteadyState ss;
    ss.z_star = std::pow(p.beta * p.gamma / (p.delta + p.pi), 1.0 / (p.beta - 1.0));
    ss.u_star = (p.rho - p.delta + p.delta * p.sigma) / (p.delta * p.sigma);
    ss.g_star = (p.delta - p.rho) / p.sigma;
    ss.eta = (p.delta + p.pi - p.pi * p.beta) / p.beta - (p.delta - p.rho) / p.sigma;
    ss.r_g = (p.delta * p.sigma - p.delta + p.rho) / p.sigma;
    ss.a_rate = (1.0 - p.beta) * (p.delta + p.pi) / p.beta;
    return ss;
}

std::vector<FamilyAdmissibility> validate_params(const EconomyParams& p) {
    auto base = check_base(p);

    std::vector<FamilyAdmissibility> out(3);
    out[0].family = Family::Bgp;
    out[1].family = Family::TwoIntegral;
    out[2].family = Family::OneIntegral;
    for (auto& a : out) a.violated = base;

    if (base.empty()) {
        // eta doubles as the balanced consumption/capital ratio, so its
        // positivity covers the ratio condition
        double eta = (p.delta + p.pi - p.pi * p.beta) / p.beta - (p.delta - p.rho) / p.sigma;
        double cap = p.rho + p.delta * p.sigma;

        push_if(out[0].violated, gt(cap, p.delta), "delta_lt_rho_plus_delta_sigma",
                p.delta, cap);
        push_if(out[0].violated, gt(eta, 0.0), "consumption_ratio_positive", eta, 0.0);

        for (int i : {1, 2}) {
            push_if(out[i].violated, gt(p.delta, p.rho), "rho_lt_delta", p.rho, p.delta);
            push_if(out[i].violated, gt(cap, p.delta), "delta_lt_rho_plus_delta_sigma",
                    p.delta, cap);
            push_if(out[i].violated, gt(eta, 0.0), "eta_positive", eta, 0.0);
        }
    }
    for (auto& a : out) a.satisfied = a.violated.empty();
    return out;
}

std::optional<double> restricted_sigma(const EconomyParams& p) {
    double den = 2.0 * p.pi * p.beta - p.delta + p.delta * p.beta - p.pi;
    if (den <= 0.0) return std::nullopt;
    return p.beta * (p.rho + p.pi) / den;
}

bool on_restricted_manifold(const EconomyParams& p, double tol) {
    auto r = restricted_sigma(p);
    return r.has_value() && std::fabs(p.sigma - *r) <= tol;
}

}  // namespace growthlab
