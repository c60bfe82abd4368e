#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "growthlab/closed_form.hpp"
#include "growthlab/dynamics.hpp"

namespace growthlab {

// Differencing error dominates the residual estimate; the reported numbers
// would measure the step size, not the model.
struct GridTooCoarse : Error {
    using Error::Error;
};

// Conserved combinations along any solution of the flow:
//   I1 = gamma(1-beta)/delta * c^{-sigma} z^{-beta} e^{-(rho-delta)t}
//   I2 = c^{-sigma} e^{-rho t}/(1-sigma) * [ (rho+pi-pi*sigma) k - sigma c
//        - beta gamma (1-sigma) z^{1-beta} k
//        + (1-beta) gamma (rho-delta+delta*sigma)/delta * z^{-beta} h ]
// I2 requires sigma != 1 (already a hard parameter error).
double eval_i1(const EconomyParams& p, const Point& pt);
double eval_i2(const EconomyParams& p, const Point& pt);

// Magnitude scale of the I2 bracket, for judging drift when I2(0) ~ 0
// (transversal paths have I2 = 0 identically).
double i2_scale(const EconomyParams& p, const Point& pt);

struct DriftReport {
    double i1_initial = 0.0;
    double i1_max_rel = 0.0;     // max |I1(t)-I1(0)| / |I1(0)|
    double i2_initial = 0.0;
    double i2_max_abs = 0.0;
    double i2_max_rel = 0.0;     // denominator max(|I2(0)|, 1e-9 * scale)
    double i2_scale0 = 0.0;
};

DriftReport integral_drift(const Trajectory& traj);

struct EquationResidual {
    std::string equation;   // "c", "k", "h", "u", "lambda", "mu"
    double max_rel = 0.0;
    double at_t = 0.0;
};

struct ResidualReport {
    std::vector<EquationResidual> equations;
    double max_rel = 0.0;
    double step = 0.0;
    bool differencing_dominated = false;  // trajectory path only; never thrown
};

// Central-difference derivatives of each variable against the flow field,
// normalized by max(|rhs|, scale_floor * |state|). The closed-form version
// differences analytic evaluations with the given step and cross-checks a
// halved step (Richardson); disagreement beyond a factor of two on a
// significant residual throws GridTooCoarse. The trajectory version uses
// interior grid triples.
ResidualReport residuals(const SolutionFamily& fam, const std::vector<double>& grid,
                         double step = 1e-4, double quad_rel_tol = 1e-13);
ResidualReport residuals(const Trajectory& traj);

struct TransversalitySample {
    double t = 0.0;
    double lambda_k = 0.0;  // e^{-rho t} lambda k
    double mu_h = 0.0;      // e^{-rho t} mu h
};

struct TransversalityReport {
    std::vector<TransversalitySample> samples;
    bool lambda_k_decreasing = false;
    bool mu_h_decreasing = false;
    double epsilon_lambda_k = 0.0;  // final value must fall below this
    double epsilon_mu_h = 0.0;
    bool lambda_k_pass = false;
    bool mu_h_pass = false;
    bool pass = false;
};

// Discounted shadow-value products along any evaluator t -> Point. Pass per
// product: strictly decreasing across checkpoints and final below epsilon.
// epsilon <= 0 selects the default: decay_ratio * first checkpoint value.
TransversalityReport check_transversality(
    const std::function<Point(double)>& at, const std::vector<double>& checkpoints,
    double rho, double epsilon_abs = 0.0, double decay_ratio = 0.1);

struct FamilyComparison {
    std::vector<double> times;
    std::vector<double> rel_gap_c, rel_gap_k, rel_gap_lambda, rel_gap_mu;
    std::vector<double> abs_gap_u, abs_gap_h;
    double max_rel_c = 0.0, max_rel_k = 0.0, max_rel_lambda = 0.0, max_rel_mu = 0.0;
    double max_abs_u = 0.0, max_abs_h = 0.0;
    double terminal_u_gap = 0.0;
    double midpoint_u_gap = 0.0;      // gap at the grid point nearest T/2
    double terminal_u_star_gap_two = 0.0;  // |u(T) - u_star| per family
    double terminal_u_star_gap_one = 0.0;
};

// Pins both quadrature families from identical (k0, z0) and tabulates the
// gaps. c, k, lambda, mu gaps are relative; u, h gaps absolute.
FamilyComparison compare_families(const EconomyParams& p, double k0, double z0,
                                  const std::vector<double>& grid,
                                  double quad_rel_tol = 1e-11);

struct ConvergenceSample {
    double horizon = 0.0;
    double slope_log_c = 0.0, slope_log_k = 0.0, slope_log_h = 0.0;
    double slope_log_u = 0.0, slope_log_lambda = 0.0, slope_log_mu = 0.0;
    double gap_c = 0.0, gap_k = 0.0, gap_h = 0.0;  // |slope - g_star|
    double gap_u_slope = 0.0;                      // |slope_log_u|
    double gap_u_level = 0.0;                      // |u(T) - u_star|
};

struct ConvergenceReport {
    std::vector<ConvergenceSample> samples;  // one per horizon, increasing
    bool shrinking = false;                  // every gap non-increasing in T
};

// Central-difference log-slopes at each horizon, step 1e-4 * max(1, T).
ConvergenceReport convergence_report(const SolutionFamily& fam,
                                     const std::vector<double>& horizons,
                                     double quad_rel_tol = 1e-12);

struct VerifyThresholds {
    double i1_drift = 1e-9;        // relative, closed-form families
    double i2_drift = 1e-9;        // against bracket scale
    double residual = 1e-6;
    double growth_gap = 1e-4;
    double u_terminal_gap = 1e-4;
};

struct VerificationReport {
    std::string family;
    DriftReport drift;
    ResidualReport residual;
    TransversalityReport transversality;
    ConvergenceReport convergence;
    std::optional<FamilyComparison> comparison;
    VerifyThresholds thresholds;
    bool drift_pass = false;
    bool residual_pass = false;
    bool convergence_pass = false;
    bool pass = false;
};

// Runs drift, residual, transversality and convergence checks on one pinned
// family over [0, t_max].
VerificationReport verification_report(const SolutionFamily& fam, double t_max,
                                       int steps, const VerifyThresholds& th = {},
                                       double quad_rel_tol = 1e-11);

std::string report_to_json(const VerificationReport& rep);

}  // namespace growthlab
