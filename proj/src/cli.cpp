#include "growthlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "growthlab/verify.hpp"
#include "growthlab/zpath.hpp"

namespace growthlab::cli {

namespace {

using nlohmann::json;

struct Options {
    EconomyParams p;
    double k0 = 1.0;
    double z0 = 0.0;  // unset; transitional families start at half the balanced ratio
    double t_max = 20.0;
    int steps = 200;
    double tol = 1e-10;       // integrator tolerance
    double quad_tol = 1e-11;  // quadrature relative tolerance
    std::string family = "bgp";
    std::string config, output, gaps_csv, plot_data;
    std::string plot_vars = "c,k,h,u,z";
    json cfg;  // parsed config file, also carries the sweep section
};

void add_common(CLI::App* s, Options& o) {
    s->add_option("--sigma", o.p.sigma, "inverse intertemporal elasticity");
    s->add_option("--rho", o.p.rho, "discount rate");
    s->add_option("--beta", o.p.beta, "physical-capital share");
    s->add_option("--gamma", o.p.gamma, "goods-sector productivity");
    s->add_option("--delta", o.p.delta, "education-sector productivity");
    s->add_option("--pi", o.p.pi, "drain rate on physical capital");
    s->add_option("--k0", o.k0, "initial physical capital");
    s->add_option("--z0", o.z0, "initial z = h*u/k (default: z_star/2)");
    s->add_option("--t-max", o.t_max, "horizon");
    s->add_option("--steps", o.steps, "grid intervals on [0, t-max]");
    s->add_option("--tol", o.tol, "integrator tolerance");
    s->add_option("--quad-tol", o.quad_tol, "quadrature relative tolerance");
    s->add_option("--config", o.config, "JSON config merged under explicit flags");
    s->add_option("--output", o.output, "write the payload to this file instead of stdout");
}

void merge_config(CLI::App* sub, Options& o) {
    if (o.config.empty()) return;
    std::ifstream f(o.config);
    if (!f) throw ValidationError("cannot read config file: " + o.config);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config root must be a JSON object");

    static const std::vector<std::string> known{
        "sigma", "rho",   "beta",  "gamma",    "delta", "pi",
        "k0",    "z0",    "t_max", "steps",    "tol",   "quad_tol",
        "family", "sweep", "collect", "gap_horizon"};
    for (const auto& item : j.items())
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw ValidationError("unrecognized config key: " + item.key());

    auto set_if = [&](const char* key, const char* flag, auto& target) {
        if (!j.contains(key)) return;
        auto* opt = sub->get_option_no_throw(flag);
        if (opt != nullptr && opt->count() > 0) return;  // explicit flag wins
        using T = std::decay_t<decltype(target)>;
        try {
            target = j.at(key).get<T>();
        } catch (const std::exception&) {
            throw ValidationError(std::string("config value for ") + key +
                                  " has the wrong type");
        }
    };
    set_if("sigma", "--sigma", o.p.sigma);
    set_if("rho", "--rho", o.p.rho);
    set_if("beta", "--beta", o.p.beta);
    set_if("gamma", "--gamma", o.p.gamma);
    set_if("delta", "--delta", o.p.delta);
    set_if("pi", "--pi", o.p.pi);
    set_if("k0", "--k0", o.k0);
    set_if("z0", "--z0", o.z0);
    set_if("t_max", "--t-max", o.t_max);
    set_if("steps", "--steps", o.steps);
    set_if("tol", "--tol", o.tol);
    set_if("quad_tol", "--quad-tol", o.quad_tol);
    set_if("family", "--family", o.family);
    o.cfg = std::move(j);
}

void require_sane(const Options& o) {
    if (o.steps < 2) throw ValidationError("steps must be at least 2");
    if (!(o.t_max > 0.0)) throw ValidationError("t-max must be positive");
    if (!(o.tol > 0.0) || o.tol > 1e-2)
        throw ValidationError("tol must lie in (0, 1e-2]");
    if (!(o.quad_tol > 0.0) || o.quad_tol > 1e-3)
        throw ValidationError("quad-tol must lie in (0, 1e-3]");
    if (!(o.k0 > 0.0)) throw ValidationError("k0 must be positive");
    if (o.z0 < 0.0) throw ValidationError("z0 must be positive when given");
}

double resolve_z0(const Options& o) {
    if (o.z0 > 0.0) return o.z0;
    return 0.5 * steady_state(o.p).z_star;
}

SolutionFamily make_family(const Options& o) {
    if (o.family == "bgp") return pin_bgp(o.p, o.k0);
    if (o.family == "two-integral")
        return pin_two_integral(o.p, o.k0, resolve_z0(o), std::nullopt, o.quad_tol);
    if (o.family == "one-integral")
        return pin_one_integral(o.p, o.k0, resolve_z0(o), o.quad_tol);
    throw ValidationError("unknown family '" + o.family +
                          "' (expected bgp, two-integral or one-integral)");
}

int deliver(const std::string& payload, const Options& o, std::ostream& out) {
    if (o.output.empty()) {
        out << payload;
    } else {
        std::ofstream f(o.output);
        if (!f) throw ValidationError("cannot open output file: " + o.output);
        f << payload;
    }
    return kExitOk;
}

json params_json(const EconomyParams& p) {
    return {{"sigma", p.sigma}, {"rho", p.rho},     {"beta", p.beta},
            {"gamma", p.gamma}, {"delta", p.delta}, {"pi", p.pi}};
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
        size_t b = cur.find_first_not_of(" \t");
        size_t e = cur.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    }
    return out;
}

double field_of(const Point& pt, const std::string& name) {
    if (name == "c") return pt.c;
    if (name == "k") return pt.k;
    if (name == "h") return pt.h;
    if (name == "u") return pt.u;
    if (name == "z") return pt.z;
    if (name == "lambda") return pt.lambda;
    if (name == "mu") return pt.mu;
    throw ValidationError("unknown plot variable: " + name);
}

void maybe_emit_plot(const Options& o, const Trajectory& traj,
                     const std::string& series_name) {
    if (o.plot_data.empty()) return;
    auto vars = split_csv(o.plot_vars);
    if (vars.empty()) throw ValidationError("no plot variables selected");
    std::ofstream f(o.plot_data);
    if (!f) throw ValidationError("cannot open plot-data file: " + o.plot_data);
    emit_plotdata(f, {{series_name, &traj}}, vars);
}

int handle_validate(const Options& o, std::ostream& out) {
    json families = json::array();
    for (const auto& a : validate_params(o.p)) {
        json v = json::array();
        for (const auto& c : a.violated)
            v.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}});
        families.push_back({{"family", family_name(a.family)},
                            {"satisfied", a.satisfied},
                            {"violated", v}});
    }
    json j{{"params", params_json(o.p)}, {"families", families}};
    return deliver(j.dump(2) + "\n", o, out);
}

int handle_steady_state(const Options& o, std::ostream& out) {
    SteadyState ss = steady_state(o.p);
    auto rs = restricted_sigma(o.p);
    json j{{"params", params_json(o.p)},
           {"z_star", ss.z_star},
           {"u_star", ss.u_star},
           {"g_star", ss.g_star},
           {"eta", ss.eta},
           {"r_g", ss.r_g},
           {"a_rate", ss.a_rate},
           {"restricted_sigma", rs ? json(*rs) : json(nullptr)}};
    return deliver(j.dump(2) + "\n", o, out);
}

int handle_zpath(const Options& o, std::ostream& out) {
    ZPath zp = make_zpath(o.p, resolve_z0(o));
    auto grid = uniform_grid(o.t_max, o.steps);
    std::ostringstream os;
    os.precision(17);
    os << "t,z,big_f,big_g\n";
    for (double t : grid)
        os << t << ',' << z_at(zp, t) << ',' << big_f(zp, t, o.quad_tol).value << ','
           << big_g(zp, t, o.quad_tol).value << "\n";
    return deliver(os.str(), o, out);
}

int handle_simulate(const Options& o, std::ostream& out) {
    SolutionFamily fam = make_family(o);
    Trajectory traj = tabulate(fam, uniform_grid(o.t_max, o.steps), o.quad_tol);
    std::ostringstream os;
    emit_trajectory_csv(os, traj, false);
    maybe_emit_plot(o, traj, o.family);
    return deliver(os.str(), o, out);
}

int handle_integrate(const Options& o, std::ostream& out) {
    SolutionFamily fam = make_family(o);
    PrimalState s0{fam.pinned.c0, fam.pinned.k0, fam.pinned.h0, fam.pinned.u0};
    IntegrateOptions io;
    io.tol = o.tol;
    Trajectory traj = integrate(o.p, s0, uniform_grid(o.t_max, o.steps), io);
    std::ostringstream os;
    emit_trajectory_csv(os, traj, true);
    maybe_emit_plot(o, traj, traj.provenance);
    return deliver(os.str(), o, out);
}

int handle_verify(const Options& o, std::ostream& out) {
    SolutionFamily fam = make_family(o);
    VerificationReport rep =
        verification_report(fam, o.t_max, o.steps, VerifyThresholds{}, o.quad_tol);
    deliver(report_to_json(rep) + "\n", o, out);
    return rep.pass ? kExitOk : kExitVerification;
}

int handle_compare(const Options& o, std::ostream& out) {
    auto grid = uniform_grid(o.t_max, o.steps);
    FamilyComparison cmp = compare_families(o.p, o.k0, resolve_z0(o), grid, o.quad_tol);
    json j{{"t_max", o.t_max},
           {"points", cmp.times.size()},
           {"max_rel_c", cmp.max_rel_c},
           {"max_rel_k", cmp.max_rel_k},
           {"max_rel_lambda", cmp.max_rel_lambda},
           {"max_rel_mu", cmp.max_rel_mu},
           {"max_abs_u", cmp.max_abs_u},
           {"max_abs_h", cmp.max_abs_h},
           {"terminal_u_gap", cmp.terminal_u_gap},
           {"midpoint_u_gap", cmp.midpoint_u_gap},
           {"terminal_u_star_gap_two", cmp.terminal_u_star_gap_two},
           {"terminal_u_star_gap_one", cmp.terminal_u_star_gap_one}};
    if (!o.gaps_csv.empty()) {
        std::ofstream f(o.gaps_csv);
        if (!f) throw ValidationError("cannot open gaps file: " + o.gaps_csv);
        f.precision(17);
        f << "t,rel_gap_c,rel_gap_k,rel_gap_lambda,rel_gap_mu,abs_gap_u,abs_gap_h\n";
        for (size_t i = 0; i < cmp.times.size(); ++i)
            f << cmp.times[i] << ',' << cmp.rel_gap_c[i] << ',' << cmp.rel_gap_k[i]
              << ',' << cmp.rel_gap_lambda[i] << ',' << cmp.rel_gap_mu[i] << ','
              << cmp.abs_gap_u[i] << ',' << cmp.abs_gap_h[i] << "\n";
    }
    return deliver(j.dump(2) + "\n", o, out);
}

// ---- sweep ----

struct Axis {
    std::string name;
    std::vector<double> values;
};

double* sweep_slot(EconomyParams& p, double& k0, double& z0, const std::string& name) {
    if (name == "sigma") return &p.sigma;
    if (name == "rho") return &p.rho;
    if (name == "beta") return &p.beta;
    if (name == "gamma") return &p.gamma;
    if (name == "delta") return &p.delta;
    if (name == "pi") return &p.pi;
    if (name == "k0") return &k0;
    if (name == "z0") return &z0;
    return nullptr;
}

std::string sweep_row(const Options& base, const std::vector<Axis>& axes,
                      const std::vector<std::string>& collect, double gap_horizon,
                      unsigned long long idx) {
    EconomyParams p = base.p;
    double k0 = base.k0, z0 = base.z0;
    std::vector<double> coords(axes.size());
    unsigned long long rest = idx;
    for (size_t a = axes.size(); a-- > 0;) {  // first axis outermost
        size_t n = axes[a].values.size();
        coords[a] = axes[a].values[rest % n];
        rest /= n;
    }
    for (size_t a = 0; a < axes.size(); ++a)
        *sweep_slot(p, k0, z0, axes[a].name) = coords[a];

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream os;
    os.precision(17);
    for (size_t a = 0; a < axes.size(); ++a) {
        if (a) os << ',';
        os << coords[a];
    }
    for (const auto& what : collect) {
        if (what == "admissibility") {
            int ok[3] = {0, 0, 0};
            try {
                auto fams = validate_params(p);
                for (int i = 0; i < 3; ++i) ok[i] = fams[i].satisfied ? 1 : 0;
            } catch (const Error&) {
            }
            os << ',' << ok[0] << ',' << ok[1] << ',' << ok[2];
        } else if (what == "steady_state") {
            double v[6] = {nan, nan, nan, nan, nan, nan};
            try {
                SteadyState ss = steady_state(p);
                v[0] = ss.z_star; v[1] = ss.u_star; v[2] = ss.g_star;
                v[3] = ss.eta; v[4] = ss.r_g; v[5] = ss.a_rate;
            } catch (const Error&) {
            }
            for (double x : v) os << ',' << x;
        } else if (what == "restricted_sigma") {
            auto r = restricted_sigma(p);
            os << ',' << (r ? *r : nan) << ','
               << (r ? std::fabs(p.sigma - *r) : nan);
        } else if (what == "terminal_u_gap") {
            double gap = nan;
            try {
                double z0r = z0 > 0.0 ? z0 : 0.5 * steady_state(p).z_star;
                auto two = pin_two_integral(p, k0, z0r, std::nullopt, base.quad_tol);
                auto one = pin_one_integral(p, k0, z0r, base.quad_tol);
                gap = std::fabs(eval_two_integral(two, gap_horizon, base.quad_tol).u -
                                eval_one_integral(one, gap_horizon, base.quad_tol).u);
            } catch (const Error&) {
            }
            os << ',' << gap;
        }
    }
    os << "\n";
    return os.str();
}

int handle_sweep(const Options& o, std::ostream& out) {
    if (!o.cfg.is_object() || !o.cfg.contains("sweep") || !o.cfg["sweep"].is_object() ||
        o.cfg["sweep"].empty())
        throw ValidationError("sweep requires --config with a non-empty sweep section");

    constexpr unsigned long long kCap = 1000000;
    std::vector<Axis> axes;
    unsigned long long total = 1;
    for (const auto& item : o.cfg["sweep"].items()) {  // alphabetical, deterministic
        EconomyParams probe;
        double pk = 0, pz = 0;
        if (sweep_slot(probe, pk, pz, item.key()) == nullptr)
            throw ValidationError("cannot sweep parameter: " + item.key());
        const json& spec = item.value();
        double mn, mx;
        long long count;
        try {
            mn = spec.at("min").get<double>();
            mx = spec.at("max").get<double>();
            count = spec.at("count").get<long long>();
        } catch (const std::exception&) {
            throw ValidationError("sweep axis " + item.key() +
                                  " needs numeric min, max and count");
        }
        if (count < 1) throw ValidationError("sweep count must be >= 1");
        if (static_cast<unsigned long long>(count) > kCap / total)
            throw ValidationError("sweep grid exceeds the cap of " +
                                  std::to_string(kCap) + " points");
        total *= static_cast<unsigned long long>(count);
        Axis ax;
        ax.name = item.key();
        if (count == 1) {
            ax.values.push_back(mn);
        } else {
            for (long long i = 0; i < count; ++i)
                ax.values.push_back(mn + (mx - mn) * static_cast<double>(i) /
                                             static_cast<double>(count - 1));
        }
        axes.push_back(std::move(ax));
    }

    std::vector<std::string> collect{"admissibility"};
    if (o.cfg.contains("collect")) {
        try {
            collect = o.cfg["collect"].get<std::vector<std::string>>();
        } catch (const std::exception&) {
            throw ValidationError("collect must be an array of strings");
        }
    }
    for (const auto& c : collect)
        if (c != "admissibility" && c != "steady_state" && c != "restricted_sigma" &&
            c != "terminal_u_gap")
            throw ValidationError("unknown collect entry: " + c);
    double gap_horizon = 30.0;
    if (o.cfg.contains("gap_horizon")) gap_horizon = o.cfg["gap_horizon"].get<double>();

    std::ostringstream header;
    for (size_t a = 0; a < axes.size(); ++a) {
        if (a) header << ',';
        header << axes[a].name;
    }
    for (const auto& what : collect) {
        if (what == "admissibility")
            header << ",bgp_admissible,two_integral_admissible,one_integral_admissible";
        else if (what == "steady_state")
            header << ",z_star,u_star,g_star,eta,r_g,a_rate";
        else if (what == "restricted_sigma")
            header << ",restricted_sigma,restricted_sigma_distance";
        else
            header << ",terminal_u_gap";
    }

    unsigned threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    if (const char* env = std::getenv("GROWTHLAB_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        threads = v >= 1 ? static_cast<unsigned>(std::min<long>(v, 256)) : 1;
    }
    threads = static_cast<unsigned>(
        std::min<unsigned long long>(threads, total));

    std::vector<std::string> rows(total);
    std::atomic<unsigned long long> next{0};
    auto work = [&]() {
        for (unsigned long long i; (i = next.fetch_add(1)) < total;)
            rows[i] = sweep_row(o, axes, collect, gap_horizon, i);
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::ostringstream os;
    os << header.str() << "\n";
    for (const auto& r : rows) os << r;
    return deliver(os.str(), o, out);
}

}  // namespace

void emit_trajectory_csv(std::ostream& os, const Trajectory& traj,
                         bool provenance_column) {
    auto old = os.precision(17);
    os << "t,c,k,h,u,z,lambda,mu";
    if (provenance_column) os << ",provenance";
    os << "\n";
    for (const auto& pt : traj.points) {
        os << pt.t << ',' << pt.c << ',' << pt.k << ',' << pt.h << ',' << pt.u << ','
           << pt.z << ',' << pt.lambda << ',' << pt.mu;
        if (provenance_column) os << ',' << traj.provenance;
        os << "\n";
    }
    os.precision(old);
}

void emit_plotdata(std::ostream& os,
                   const std::vector<std::pair<std::string, const Trajectory*>>& series,
                   const std::vector<std::string>& variables) {
    if (series.empty()) throw ValidationError("no trajectories to plot");
    auto old = os.precision(17);
    os << "series,t,variable,value\n";
    for (const auto& [name, traj] : series) {
        const auto& pts = traj->points;
        for (const auto& var : variables) {
            if (var.rfind("growth_", 0) == 0) {
                std::string base = var.substr(7);
                for (size_t i = 1; i + 1 < pts.size(); ++i) {
                    double dt = pts[i + 1].t - pts[i - 1].t;
                    double slope = (std::log(field_of(pts[i + 1], base)) -
                                    std::log(field_of(pts[i - 1], base))) /
                                   dt;
                    os << name << ',' << pts[i].t << ',' << var << ',' << slope << "\n";
                }
            } else {
                for (const auto& pt : pts)
                    os << name << ',' << pt.t << ',' << var << ',' << field_of(pt, var)
                       << "\n";
            }
        }
    }
    os.precision(old);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"closed-form families of a two-sector optimal growth model"};
    app.require_subcommand(1);
    Options o;

    CLI::App* c_validate =
        app.add_subcommand("validate", "per-family parameter admissibility");
    CLI::App* c_steady =
        app.add_subcommand("steady-state", "balanced-path quantities and restricted sigma");
    CLI::App* c_zpath = app.add_subcommand("zpath", "z path and its kernel integrals");
    CLI::App* c_simulate =
        app.add_subcommand("simulate", "tabulate a pinned closed-form family");
    CLI::App* c_integrate =
        app.add_subcommand("integrate", "integrate the flow from the pinned initials");
    CLI::App* c_verify =
        app.add_subcommand("verify", "drift, residual, transversality and convergence report");
    CLI::App* c_compare =
        app.add_subcommand("compare", "gap table between the two transitional families");
    CLI::App* c_sweep = app.add_subcommand("sweep", "parameter grid walk from a config file");

    for (CLI::App* s : {c_validate, c_steady, c_zpath, c_simulate, c_integrate, c_verify,
                        c_compare, c_sweep})
        add_common(s, o);
    for (CLI::App* s : {c_simulate, c_integrate, c_verify})
        s->add_option("--family", o.family, "bgp, two-integral or one-integral");
    for (CLI::App* s : {c_simulate, c_integrate}) {
        s->add_option("--plot-data", o.plot_data, "write long-format plot rows here");
        s->add_option("--plot-vars", o.plot_vars,
                      "comma-separated variables; growth_<name> for log-slopes");
    }
    c_compare->add_option("--gaps-csv", o.gaps_csv, "write the per-time gap table here");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("growthlab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        merge_config(sub, o);
        require_sane(o);
        if (sub == c_validate) return handle_validate(o, out);
        if (sub == c_steady) return handle_steady_state(o, out);
        if (sub == c_zpath) return handle_zpath(o, out);
        if (sub == c_simulate) return handle_simulate(o, out);
        if (sub == c_integrate) return handle_integrate(o, out);
        if (sub == c_verify) return handle_verify(o, out);
        if (sub == c_compare) return handle_compare(o, out);
        return handle_sweep(o, out);
    } catch (const ValidationError& e) {
        err << e.what() << "\n";
        return kExitValidation;
    } catch (const AdmissibilityError& e) {
        err << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace growthlab::cli
