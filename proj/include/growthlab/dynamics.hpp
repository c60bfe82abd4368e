#pragma once

#include <string>
#include <vector>

#include "growthlab/closed_form.hpp"
#include "growthlab/ode.hpp"
#include "growthlab/params.hpp"

namespace growthlab {

// A state component left the representable positive range during integration.
struct NonpositiveState : Error {
    using Error::Error;
};

struct PrimalState {
    double c = 0.0;
    double k = 0.0;
    double h = 0.0;
    double u = 0.0;
};

struct CostateState {
    double k = 0.0;
    double h = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
};

// Flow field in the controls-eliminated form; autonomous.
PrimalState rhs_primal(const EconomyParams& p, const PrimalState& s);

// Flow field in shadow-price form. c and u are recovered pointwise from
// lambda = c^{-sigma} and the first-order condition for u.
CostateState rhs_costate(const EconomyParams& p, const CostateState& s);

CostateState to_costate(const EconomyParams& p, const PrimalState& s);
PrimalState to_primal(const EconomyParams& p, const CostateState& s);

// Full sample (z, lambda, mu derived) at time t.
Point point_from_primal(const EconomyParams& p, double t, const PrimalState& s);

struct IntegratorStats {
    long attempted = 0;
    long accepted = 0;
    long rejected = 0;
    bool u_exceeded_one = false;
    double first_u_excursion = -1.0;  // earliest grid/step time with u > 1
};

struct IntegrateOptions {
    double tol = 1e-10;          // rel and abs tolerance on the log state
    double initial_step = 1e-3;
    double max_step = 0.0;       // 0 -> t_max/10
};

// Sampled path plus dense data from the accepted steps.
struct Trajectory {
    EconomyParams params;
    std::vector<Point> points;   // exactly at the requested grid times
    std::string provenance;      // "bgp", "two-integral", "one-integral", "numeric"
    IntegratorStats stats;

    std::vector<double> dense_t;                  // accepted step boundaries
    std::vector<std::array<double, 4>> dense_y;   // log state at boundaries
    std::vector<std::array<double, 4>> dense_f;   // log-state derivative

    // Cubic Hermite in log space between accepted steps.
    Point sample(double t) const;
};

// Integrates the primal system in log coordinates (positivity is structural)
// with an embedded 5(4) pair, landing exactly on every grid time. grid must
// be strictly increasing and start at 0. u > 1 excursions are flagged, not
// clamped.
Trajectory integrate(const EconomyParams& p, const PrimalState& s0,
                     const std::vector<double>& grid, const IntegrateOptions& opts = {});

// Evaluates a closed-form family on a grid into the same container.
Trajectory tabulate(const SolutionFamily& fam, const std::vector<double>& grid,
                    double quad_rel_tol = 1e-11);

// n+1 equally spaced points on [0, t_max].
std::vector<double> uniform_grid(double t_max, int n);

}  // namespace growthlab
