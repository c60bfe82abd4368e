#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "growthlab/cli.hpp"
#include "oracles.hpp"

using namespace growthlab;
using nlohmann::json;
namespace fs = std::filesystem;
namespace fr = oracles::frozen;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name) : path(fs::temp_directory_path() / name) {}
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("validate reports three families on the default parameter set") {
    auto r = run_cli({"validate"});
    REQUIRE(r.code == cli::kExitOk);
    auto j = json::parse(r.out);
    REQUIRE(j["families"].size() == 3);
    for (const auto& fam : j["families"]) CHECK(fam["satisfied"] == true);
}

TEST_CASE("validate surfaces violated constraints without failing the run") {
    auto r = run_cli({"validate", "--delta", "0.04"});
    REQUIRE(r.code == cli::kExitOk);
    auto j = json::parse(r.out);
    CHECK(j["families"][0]["satisfied"] == true);
    CHECK(j["families"][1]["satisfied"] == false);
    CHECK(j["families"][1]["violated"].size() > 0);
}

TEST_CASE("hard parameter errors exit with the validation code") {
    auto r = run_cli({"validate", "--sigma", "1"});
    CHECK(r.code == cli::kExitValidation);
    CHECK(r.err.find("sigma") != std::string::npos);
}

TEST_CASE("steady-state emits the derived quantities") {
    auto r = run_cli({"steady-state"});
    REQUIRE(r.code == cli::kExitOk);
    auto j = json::parse(r.out);
    CHECK(std::fabs(j["z_star"].get<double>() - 0.3083) < 1e-4);
    CHECK(j["u_star"].get<double>() == doctest::Approx(fr::u_star).epsilon(1e-12));
    CHECK(j["g_star"].get<double>() == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(j["restricted_sigma"].is_null());
}

TEST_CASE("config file is merged with flags taking precedence") {
    TempFile cfg("growthlab_cfg.json");
    {
        std::ofstream f(cfg.path);
        f << R"({"sigma": 3.0, "delta": 0.09})";
    }
    auto r = run_cli({"steady-state", "--config", cfg.path.string(), "--sigma", "2"});
    REQUIRE(r.code == cli::kExitOk);
    auto j = json::parse(r.out);
    // delta from the file, sigma from the flag
    CHECK(j["params"]["sigma"].get<double>() == 2.0);
    CHECK(j["params"]["delta"].get<double>() == 0.09);
}

TEST_CASE("missing config file is a validation error") {
    auto r = run_cli({"steady-state", "--config", "/nonexistent/growthlab.json"});
    CHECK(r.code == cli::kExitValidation);
}

TEST_CASE("simulate produces the stable trajectory schema") {
    auto r = run_cli({"simulate", "--family", "bgp", "--t-max", "10", "--steps", "10"});
    REQUIRE(r.code == cli::kExitOk);
    std::istringstream is(r.out);
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,c,k,h,u,z,lambda,mu");
    CHECK(count_lines(r.out) == 12);  // header + 11 rows

    // repeated run is byte identical
    auto r2 = run_cli({"simulate", "--family", "bgp", "--t-max", "10", "--steps", "10"});
    CHECK(r.out == r2.out);

    double t, c, k, h, u, z, lambda, mu;
    char comma;
    is >> t >> comma >> c >> comma >> k >> comma >> h >> comma >> u >> comma >> z >>
        comma >> lambda >> comma >> mu;
    CHECK(t == 0.0);
    CHECK(c == doctest::Approx(fr::c0_bgp).epsilon(1e-12));
    CHECK(u == doctest::Approx(fr::u_star).epsilon(1e-12));
}

TEST_CASE("simulate pins the transitional families from k0 and z0") {
    auto r = run_cli({"simulate", "--family", "two-integral", "--t-max", "5", "--steps", "5"});
    REQUIRE(r.code == cli::kExitOk);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);  // header
    std::getline(is, line);
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');  // t
    std::getline(row, cell, ',');
    CHECK(std::stod(cell) == doctest::Approx(fr::c0_two).epsilon(1e-8));
    std::getline(row, cell, ',');  // k
    std::getline(row, cell, ',');  // h
    std::getline(row, cell, ',');  // u
    CHECK(std::stod(cell) == doctest::Approx(fr::u0_two).epsilon(1e-8));
}

TEST_CASE("simulate rejects an inadmissible family request") {
    auto r = run_cli({"simulate", "--family", "two-integral", "--delta", "0.04"});
    CHECK(r.code == cli::kExitValidation);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("integrate appends a provenance column and tracks simulate") {
    auto sim = run_cli({"simulate", "--family", "bgp", "--t-max", "10", "--steps", "5"});
    auto num = run_cli({"integrate", "--family", "bgp", "--t-max", "10", "--steps", "5"});
    REQUIRE(num.code == cli::kExitOk);
    std::istringstream is(num.out);
    std::string header, row0;
    std::getline(is, header);
    CHECK(header == "t,c,k,h,u,z,lambda,mu,provenance");
    std::getline(is, row0);
    CHECK(row0.substr(row0.size() - 8) == ",numeric");

    // same grid, nearly the same numbers
    std::istringstream a(sim.out), b(num.out);
    std::string la, lb;
    std::getline(a, la);
    std::getline(b, lb);
    while (std::getline(a, la) && std::getline(b, lb)) {
        std::istringstream ra(la), rb(lb);
        std::string ca, cb;
        for (int col = 0; col < 8; ++col) {
            std::getline(ra, ca, ',');
            std::getline(rb, cb, ',');
            CHECK(std::fabs(std::stod(ca) - std::stod(cb)) <
                  1e-6 * std::max(1.0, std::fabs(std::stod(ca))));
        }
    }
}

TEST_CASE("verify returns a full report with a passing verdict") {
    auto r = run_cli({"verify", "--family", "two-integral", "--t-max", "30", "--steps", "60"});
    REQUIRE(r.code == cli::kExitOk);
    auto j = json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["family"] == "two-integral");
}

TEST_CASE("compare emits a summary and a per-time gap table") {
    TempFile gaps("growthlab_gaps.csv");
    auto r = run_cli({"compare", "--t-max", "40", "--steps", "40",
                      "--gaps-csv", gaps.path.string()});
    REQUIRE(r.code == cli::kExitOk);
    auto j = json::parse(r.out);
    CHECK(j["max_rel_c"].get<double>() <= 1e-8);
    CHECK(j["max_abs_u"].get<double>() < 1e-6);

    std::ifstream f(gaps.path);
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,rel_gap_c,rel_gap_k,rel_gap_lambda,rel_gap_mu,abs_gap_u,abs_gap_h");
    int rows = 0;
    for (std::string line; std::getline(f, line);) ++rows;
    CHECK(rows == 41);
}

TEST_CASE("plot data is long format with selectable variables") {
    TempFile plot("growthlab_plot.csv");
    auto r = run_cli({"simulate", "--family", "bgp", "--t-max", "10", "--steps", "10",
                      "--plot-data", plot.path.string(), "--plot-vars", "c,k,h"});
    REQUIRE(r.code == cli::kExitOk);
    std::ifstream f(plot.path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "series,t,variable,value");
    int rows = 0;
    for (std::string line; std::getline(f, line);) ++rows;
    CHECK(rows == 33);  // 3 variables x 11 times
}

TEST_CASE("growth-rate plot rows difference the interior grid") {
    TempFile plot("growthlab_plot_growth.csv");
    auto r = run_cli({"simulate", "--family", "bgp", "--t-max", "10", "--steps", "10",
                      "--plot-data", plot.path.string(), "--plot-vars", "growth_c"});
    REQUIRE(r.code == cli::kExitOk);
    std::ifstream f(plot.path);
    std::string line;
    std::getline(f, line);
    int rows = 0;
    double last = 0.0;
    while (std::getline(f, line)) {
        ++rows;
        last = std::stod(line.substr(line.rfind(',') + 1));
    }
    CHECK(rows == 9);  // endpoints have no centered difference
    CHECK(last == doctest::Approx(fr::g_star).epsilon(1e-6));
}

TEST_CASE("unknown subcommands and flags are usage errors") {
    CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run_cli({"simulate", "--no-such-flag", "1"}).code == cli::kExitUsage);
    CHECK(run_cli({}).code == cli::kExitUsage);
}

TEST_CASE("sweep walks a parameter grid deterministically") {
    TempFile cfg("growthlab_sweep.json");
    {
        std::ofstream f(cfg.path);
        f << R"({"sweep": {"delta": {"min": 0.08, "max": 0.12, "count": 3},)"
          << R"( "sigma": {"min": 1.5, "max": 2.5, "count": 2}},)"
          << R"( "collect": ["admissibility", "steady_state", "restricted_sigma"]})";
    }
    auto r = run_cli({"sweep", "--config", cfg.path.string()});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(count_lines(r.out) == 7);  // header + 3*2 rows

    setenv("GROWTHLAB_THREADS", "1", 1);
    auto serial = run_cli({"sweep", "--config", cfg.path.string()});
    setenv("GROWTHLAB_THREADS", "4", 1);
    auto parallel = run_cli({"sweep", "--config", cfg.path.string()});
    unsetenv("GROWTHLAB_THREADS");
    CHECK(serial.out == r.out);
    CHECK(parallel.out == r.out);
}

TEST_CASE("sweep can collect the terminal gap between the two transitional families") {
    TempFile cfg("growthlab_sweep_gap.json");
    {
        std::ofstream f(cfg.path);
        f << R"({"sweep": {"delta": {"min": 0.10, "max": 0.12, "count": 2}},)"
          << R"( "collect": ["terminal_u_gap"], "gap_horizon": 30})";
    }
    auto r = run_cli({"sweep", "--config", cfg.path.string()});
    REQUIRE(r.code == cli::kExitOk);
    std::istringstream is(r.out);
    std::string header;
    std::getline(is, header);
    CHECK(header.find("terminal_u_gap") != std::string::npos);
    for (std::string line; std::getline(is, line);) {
        double gap = std::stod(line.substr(line.rfind(',') + 1));
        CHECK(gap < 1e-8);  // the families coincide
    }
}

TEST_CASE("sweep refuses grids beyond the hard cap") {
    TempFile cfg("growthlab_sweep_cap.json");
    {
        std::ofstream f(cfg.path);
        f << R"({"sweep": {"delta": {"min": 0.08, "max": 0.12, "count": 2000001}}})";
    }
    auto r = run_cli({"sweep", "--config", cfg.path.string()});
    CHECK(r.code == cli::kExitValidation);
    CHECK(r.err.find("cap") != std::string::npos);
}

TEST_CASE("output flag writes the payload to a file instead of the stream") {
    TempFile out("growthlab_out.csv");
    auto r = run_cli({"simulate", "--family", "bgp", "--t-max", "5", "--steps", "5",
                      "--output", out.path.string()});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.empty());
    std::ifstream f(out.path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,c,k,h,u,z,lambda,mu");
}

TEST_SUITE_END();
