#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "growthlab/params.hpp"

namespace growthlab {

// Adaptive step fell below the underflow floor.
struct StepUnderflow : Error {
    using Error::Error;
};

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double initial_step = 1e-3;
    double max_step = 0.0;          // 0 -> span/10
    double underflow_factor = 1e-14;  // h < factor*max(1,|t|) aborts
    bool adaptive = true;
    double fixed_step = 0.0;        // stepped exactly when !adaptive
};

struct OdeStats {
    long attempted = 0;
    long accepted = 0;
    long rejected = 0;
};

// Dormand-Prince 5(4) embedded pair. on_step(t0, y0, f0, t1, y1, f1) fires
// once per accepted step; f values support Hermite dense output. The final
// step is clamped to land exactly on t1.
template <std::size_t N, class Rhs, class Sink>
OdeStats dopri5(Rhs&& rhs, double t0, std::array<double, N> y, double t1,
                const OdeOptions& opts, Sink&& on_step) {
    using V = std::array<double, N>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // y5 - y4 error weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats stats;
    const double span = t1 - t0;
    if (span <= 0.0) return stats;
    const double hmax = opts.max_step > 0.0 ? opts.max_step : span / 10.0;
    double h = opts.adaptive ? std::min(opts.initial_step, hmax) : opts.fixed_step;
    if (h <= 0.0) h = span / 100.0;

    double t = t0;
    V f = rhs(t, y);
    V k2, k3, k4, k5, k6, ynew, fnew, yerr;

    while (t < t1) {
        // Forcing t = t1 on the final step stops rounding residue from ever
        // leaving a sub-ulp step behind (which would read as an underflow).
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (!last && opts.adaptive &&
            h < opts.underflow_factor * std::max(1.0, std::fabs(t)))
            throw StepUnderflow("step size underflow at t = " + std::to_string(t));
        ++stats.attempted;

        V tmp;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * f[i];
        k2 = rhs(t + c2 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * f[i] + a32 * k2[i]);
        k3 = rhs(t + c3 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * f[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(t + c4 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * f[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(t + c5 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * f[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                 a65 * k5[i]);
        k6 = rhs(t + h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * f[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                  b6 * k6[i]);
        fnew = rhs(t + h, ynew);  // FSAL
        for (std::size_t i = 0; i < N; ++i)
            yerr[i] = h * (e1 * f[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                           e6 * k6[i] + e7 * fnew[i]);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sc = opts.abs_tol +
                        opts.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            double r = yerr[i] / sc;
            err += r * r;
        }
        err = std::sqrt(err / N);

        if (!opts.adaptive || err <= 1.0) {
            ++stats.accepted;
            const double tend = last ? t1 : t + h;
            on_step(t, y, f, tend, ynew, fnew);
            t = tend;
            y = ynew;
            f = fnew;
        } else {
            ++stats.rejected;
        }
        if (opts.adaptive) {
            double fac;
            if (std::isnan(err))
                fac = 0.2;  // poisoned stages: retreat, never expand
            else if (err > 0.0)
                fac = 0.9 * std::pow(err, -0.2);
            else
                fac = 5.0;
            h = std::min(hmax, h * std::min(5.0, std::max(0.2, fac)));
        }
    }
    return stats;
}

}  // namespace growthlab
