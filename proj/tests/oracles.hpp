#pragma once

// Test-side oracles, deliberately independent of the library's numerics:
// adaptive Simpson for quadrature cross-checks, fixed-step RK4 for ODE
// cross-checks, and reference values computed with an external
// high-precision tool and frozen here.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "growthlab/params.hpp"

namespace oracles {

inline growthlab::EconomyParams canonical() {
    return {2.0, 0.05, 0.33, 1.0, 0.11, 0.04};
}

// Canonical set, z0 = 0.5 z_star, k0 = 1 unless noted.
namespace frozen {
inline constexpr double z_star = 0.30826297961521832;
inline constexpr double u_star = 0.72727272727272727;
inline constexpr double g_star = 0.03;
inline constexpr double eta = 0.38454545454545455;
inline constexpr double r_g = 0.08;
inline constexpr double a_rate = 0.30454545454545455;
inline constexpr double z_at_10 = 0.29576410905710757;
inline constexpr double big_f_5 = 0.56679094411066164;
inline constexpr double big_g_5 = 1.1082638414103111;
inline constexpr double f_inf = 0.69751012135431652;
inline constexpr double g_inf = 4.1476267496632900;
inline constexpr double c0_two = 0.30084222031770577;
inline constexpr double u0_two = 0.55972689369640211;
inline constexpr double h0_two = 0.27536909793584196;
inline constexpr double c1_two = 124.73846426347225;
inline constexpr double c0_bgp = 0.38454545454545455;  // eta * k0
inline constexpr double h0_bgp = 0.42386159697092520;  // z_star / u_star
inline constexpr double c1_bgp = 60.735512481109579;
inline constexpr double restricted_sigma_example = 5.25;  // beta=.6 rho=.05 pi=.3 delta=.05
}  // namespace frozen

// Adaptive Simpson with Richardson correction.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

// Classic RK4 with n fixed steps on dy/dt = f(t, y).
template <std::size_t N>
std::array<double, N> rk4(
    const std::function<std::array<double, N>(double, const std::array<double, N>&)>& f,
    double t0, std::array<double, N> y, double t1, int n) {
    double h = (t1 - t0) / n;
    for (int i = 0; i < n; ++i) {
        double t = t0 + i * h;
        auto k1 = f(t, y);
        std::array<double, N> tmp;
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        auto k2 = f(t + 0.5 * h, tmp);
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        auto k3 = f(t + 0.5 * h, tmp);
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + h * k3[j];
        auto k4 = f(t + h, tmp);
        for (std::size_t j = 0; j < N; ++j)
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return y;
}

inline double rel_gap(double a, double b) {
    double scale = std::max(std::fabs(a), std::fabs(b));
    return scale > 0.0 ? std::fabs(a - b) / scale : 0.0;
}

}  // namespace oracles
