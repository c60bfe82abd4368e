#include "growthlab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace growthlab {

namespace {

// exp overflows past ~709; anything beyond 690 in log space means a state
// component has effectively left (0, inf).
constexpr double kLogLimit = 690.0;

double zc(const EconomyParams& p, double z) {
    return std::pow(z, 1.0 - p.beta);
}

void check_positive_state(const char* who, const PrimalState& s) {
    const double vals[] = {s.c, s.k, s.h, s.u};
    const char* names[] = {"c", "k", "h", "u"};
    for (int i = 0; i < 4; ++i)
        if (!std::isfinite(vals[i]) || !(vals[i] > 0.0))
            throw NonpositiveState(std::string(who) + ": " + names[i] +
                                   " must be finite and positive");
}

std::array<double, 4> log_rhs(const EconomyParams& p,
                              const std::array<double, 4>& y) {
    for (double v : y)
        if (!std::isfinite(v) || std::fabs(v) > kLogLimit)
            throw NonpositiveState(
                "integrate: log state left the representable range");
    const double lz = y[2] + y[3] - y[1];           // log z = log h + log u - log k
    const double zpow = std::exp((1.0 - p.beta) * lz);
    const double c_over_k = std::exp(y[0] - y[1]);
    const double u = std::exp(y[3]);
    const double a = (1.0 - p.beta) * (p.delta + p.pi) / p.beta;
    std::array<double, 4> f;
    f[0] = (p.beta * p.gamma * zpow - (p.rho + p.pi)) / p.sigma;
    f[1] = p.gamma * zpow - p.pi - c_over_k;
    f[2] = p.delta * (1.0 - u);
    f[3] = a - c_over_k + p.delta * u;
    // A collapsing stock shows up as a log-rate far beyond any economic time
    // scale long before the log itself leaves range; treat it as loss of
    // positivity rather than letting the step size underflow at the blowup.
    for (double v : f)
        if (!std::isfinite(v) || std::fabs(v) > 1e10)
            throw NonpositiveState(
                "integrate: a state component is collapsing toward zero or "
                "diverging");
    return f;
}

double hermite(double s, double hseg, double y0, double f0, double y1,
               double f1) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * hseg * f0 +
           (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * hseg * f1;
}

}  // namespace

PrimalState rhs_primal(const EconomyParams& p, const PrimalState& s) {
    check_positive_state("rhs_primal", s);
    const double z = s.h * s.u / s.k;
    const double zpow = zc(p, z);
    const double a = (1.0 - p.beta) * (p.delta + p.pi) / p.beta;
    PrimalState d;
    d.c = s.c * (p.beta * p.gamma * zpow - (p.rho + p.pi)) / p.sigma;
    d.k = s.k * (p.gamma * zpow - p.pi) - s.c;
    d.h = p.delta * (1.0 - s.u) * s.h;
    d.u = s.u * (a - s.c / s.k + p.delta * s.u);
    return d;
}

CostateState rhs_costate(const EconomyParams& p, const CostateState& s) {
    if (!(s.k > 0.0) || !(s.h > 0.0) || !(s.lambda > 0.0) || !(s.mu > 0.0))
        throw NonpositiveState("rhs_costate: state must be positive");
    const double c = std::pow(s.lambda, -1.0 / p.sigma);
    const double u = std::pow(p.gamma * (1.0 - p.beta) *
                                  std::pow(s.k / s.h, p.beta) * s.lambda /
                                  (p.delta * s.mu),
                              1.0 / p.beta);
    const double hu = s.h * u;
    CostateState d;
    d.k = p.gamma * std::pow(s.k, p.beta) * std::pow(hu, 1.0 - p.beta) -
          p.pi * s.k - c;
    d.h = p.delta * (1.0 - u) * s.h;
    d.lambda =
        s.lambda * (p.rho + p.pi -
                    p.beta * p.gamma * zc(p, hu / s.k));
    d.mu = p.rho * s.mu -
           p.gamma * (1.0 - p.beta) * std::pow(s.k, p.beta) *
               std::pow(s.h, -p.beta) * std::pow(u, 1.0 - p.beta) * s.lambda -
           p.delta * (1.0 - u) * s.mu;
    return d;
}

CostateState to_costate(const EconomyParams& p, const PrimalState& s) {
    check_positive_state("to_costate", s);
    CostateState out;
    out.k = s.k;
    out.h = s.h;
    out.lambda = std::pow(s.c, -p.sigma);
    const double z = s.h * s.u / s.k;
    out.mu = p.gamma * (1.0 - p.beta) / p.delta * std::pow(z, -p.beta) *
             out.lambda;
    return out;
}

PrimalState to_primal(const EconomyParams& p, const CostateState& s) {
    if (!(s.k > 0.0) || !(s.h > 0.0) || !(s.lambda > 0.0) || !(s.mu > 0.0))
        throw NonpositiveState("to_primal: state must be positive");
    PrimalState out;
    out.k = s.k;
    out.h = s.h;
    out.c = std::pow(s.lambda, -1.0 / p.sigma);
    out.u = std::pow(p.gamma * (1.0 - p.beta) * std::pow(s.k / s.h, p.beta) *
                         s.lambda / (p.delta * s.mu),
                     1.0 / p.beta);
    return out;
}

Point point_from_primal(const EconomyParams& p, double t,
                        const PrimalState& s) {
    Point pt;
    pt.t = t;
    pt.c = s.c;
    pt.k = s.k;
    pt.h = s.h;
    pt.u = s.u;
    pt.z = s.h * s.u / s.k;
    pt.lambda = std::pow(s.c, -p.sigma);
    pt.mu = p.gamma * (1.0 - p.beta) / p.delta * std::pow(pt.z, -p.beta) *
            pt.lambda;
    return pt;
}

Point Trajectory::sample(double t) const {
    if (dense_t.size() < 2)
        throw Error("Trajectory::sample: no dense data stored");
    if (t < dense_t.front() - 1e-12 || t > dense_t.back() + 1e-12)
        throw ValidationError("Trajectory::sample: t outside stored range");
    t = std::clamp(t, dense_t.front(), dense_t.back());
    auto it = std::upper_bound(dense_t.begin(), dense_t.end(), t);
    std::size_t j = it == dense_t.end() ? dense_t.size() - 1
                                        : std::size_t(it - dense_t.begin());
    if (j == 0) j = 1;
    const std::size_t i = j - 1;
    const double hseg = dense_t[j] - dense_t[i];
    const double s = hseg > 0.0 ? (t - dense_t[i]) / hseg : 0.0;
    PrimalState ps;
    ps.c = std::exp(
        hermite(s, hseg, dense_y[i][0], dense_f[i][0], dense_y[j][0], dense_f[j][0]));
    ps.k = std::exp(
        hermite(s, hseg, dense_y[i][1], dense_f[i][1], dense_y[j][1], dense_f[j][1]));
    ps.h = std::exp(
        hermite(s, hseg, dense_y[i][2], dense_f[i][2], dense_y[j][2], dense_f[j][2]));
    ps.u = std::exp(
        hermite(s, hseg, dense_y[i][3], dense_f[i][3], dense_y[j][3], dense_f[j][3]));
    return point_from_primal(params, t, ps);
}

Trajectory integrate(const EconomyParams& p, const PrimalState& s0,
                     const std::vector<double>& grid,
                     const IntegrateOptions& opts) {
    require_valid(p);
    check_positive_state("integrate", s0);
    if (grid.empty() || grid.front() != 0.0)
        throw ValidationError("integrate: grid must start at t = 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ValidationError("integrate: grid must be strictly increasing");

    Trajectory traj;
    traj.params = p;
    traj.provenance = "numeric";

    std::array<double, 4> y = {std::log(s0.c), std::log(s0.k), std::log(s0.h),
                               std::log(s0.u)};
    auto rhs = [&p](double, const std::array<double, 4>& s) {
        return log_rhs(p, s);
    };

    auto note_u = [&traj](double t, double log_u) {
        if (log_u > 0.0 && !traj.stats.u_exceeded_one) {
            traj.stats.u_exceeded_one = true;
            traj.stats.first_u_excursion = t;
        }
    };

    traj.dense_t.push_back(grid.front());
    traj.dense_y.push_back(y);
    traj.dense_f.push_back(rhs(grid.front(), y));
    note_u(grid.front(), y[3]);
    traj.points.push_back(point_from_primal(
        p, grid.front(), PrimalState{s0.c, s0.k, s0.h, s0.u}));

    OdeOptions ode;
    ode.rel_tol = opts.tol;
    ode.abs_tol = opts.tol;
    ode.initial_step = opts.initial_step;
    ode.max_step =
        opts.max_step > 0.0 ? opts.max_step : std::max(grid.back() / 10.0, 1e-3);

    double carried = ode.initial_step;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        ode.initial_step = std::min(carried, ode.max_step);
        OdeStats st = dopri5<4>(
            rhs, grid[g - 1], y, grid[g], ode,
            [&](double t0, const std::array<double, 4>&,
                const std::array<double, 4>&, double t1,
                const std::array<double, 4>& y1,
                const std::array<double, 4>& f1) {
                traj.dense_t.push_back(t1);
                traj.dense_y.push_back(y1);
                traj.dense_f.push_back(f1);
                note_u(t1, y1[3]);
                carried = t1 - t0;
            });
        traj.stats.attempted += st.attempted;
        traj.stats.accepted += st.accepted;
        traj.stats.rejected += st.rejected;
        y = traj.dense_y.back();
        PrimalState ps{std::exp(y[0]), std::exp(y[1]), std::exp(y[2]),
                       std::exp(y[3])};
        traj.points.push_back(point_from_primal(p, grid[g], ps));
    }
    return traj;
}

Trajectory tabulate(const SolutionFamily& fam, const std::vector<double>& grid,
                    double quad_rel_tol) {
    Trajectory traj;
    traj.params = fam.params;
    traj.provenance = family_name(fam.tag);
    traj.points.reserve(grid.size());
    for (double t : grid) traj.points.push_back(eval(fam, t, quad_rel_tol));
    return traj;
}

std::vector<double> uniform_grid(double t_max, int n) {
    if (!(t_max > 0.0) || n < 1)
        throw ValidationError("uniform_grid: need t_max > 0 and n >= 1");
    std::vector<double> g(std::size_t(n) + 1);
    for (int i = 0; i <= n; ++i) g[std::size_t(i)] = t_max * i / n;
    g.back() = t_max;
    return g;
}

}  // namespace growthlab
