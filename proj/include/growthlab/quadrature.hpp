#pragma once

#include <functional>

#include "growthlab/params.hpp"

namespace growthlab {

struct QuadratureNonConvergence : Error {
    using Error::Error;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;   // accumulated interval estimates, not a bound proof
    long evaluations = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;     // absolute floor, useful when the value may be ~0
    int max_depth = 40;
};

// Adaptive Gauss-Kronrod 7/15 with recursive bisection. Error per interval is
// |K15 - G7|; an interval is accepted once its estimate fits the share of the
// budget proportional to its length. Throws QuadratureNonConvergence when the
// depth limit is hit on an unconverged interval or the final total misses the
// requested tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

}  // namespace growthlab
