#include <doctest.h>

#include <cmath>

#include "growthlab/zpath.hpp"
#include "oracles.hpp"

using namespace growthlab;
namespace fr = oracles::frozen;

namespace {

ZPath canonical_path(double z0_factor = 0.5) {
    auto p = oracles::canonical();
    auto ss = steady_state(p);
    return make_zpath(p, z0_factor * ss.z_star);
}

}  // namespace

TEST_SUITE_BEGIN("zpath");

TEST_CASE("starts at z0 and relaxes monotonically to the steady value") {
    auto zp = canonical_path(0.5);
    CHECK(z_at(zp, 0.0) == doctest::Approx(zp.z0).epsilon(1e-14));
    double prev = zp.z0;
    for (double t : {0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 80.0}) {
        double z = z_at(zp, t);
        CHECK(z > prev);
        CHECK(z < zp.steady.z_star * (1.0 + 1e-12));
        prev = z;
    }
    CHECK(z_at(zp, 200.0) == doctest::Approx(zp.steady.z_star).epsilon(1e-12));

    auto above = canonical_path(2.0);
    CHECK(z_at(above, 1.0) < above.z0);
    CHECK(z_at(above, 200.0) == doctest::Approx(above.steady.z_star).epsilon(1e-12));
}

TEST_CASE("closed form matches an independent integration of the z flow") {
    auto zp = canonical_path(0.5);
    const auto& p = zp.params;
    std::function<std::array<double, 1>(double, const std::array<double, 1>&)> f =
        [&p](double, const std::array<double, 1>& y) -> std::array<double, 1> {
        return {y[0] * ((p.delta + p.pi) / p.beta -
                        p.gamma * std::pow(y[0], 1.0 - p.beta))};
    };
    auto y = oracles::rk4<1>(f, 0.0, {zp.z0}, 10.0, 20000);
    CHECK(oracles::rel_gap(z_at(zp, 10.0), y[0]) < 1e-9);
    CHECK(z_at(zp, 10.0) == doctest::Approx(fr::z_at_10).epsilon(1e-12));
}

TEST_CASE("started on the steady value the path is constant") {
    auto p = oracles::canonical();
    auto ss = steady_state(p);
    auto zp = make_zpath(p, ss.z_star);
    for (double t : {0.0, 1.0, 50.0, 1000.0})
        CHECK(z_at(zp, t) == doctest::Approx(ss.z_star).epsilon(1e-13));
}

TEST_CASE("kernel integrals against frozen references and the Simpson oracle") {
    auto zp = canonical_path(0.5);
    auto F5 = big_f(zp, 5.0);
    auto G5 = big_g(zp, 5.0);
    CHECK(F5.value == doctest::Approx(fr::big_f_5).epsilon(1e-9));
    CHECK(G5.value == doctest::Approx(fr::big_g_5).epsilon(1e-9));

    auto fker = [&zp](double s) { return kernel_at(zp, zp.steady.eta, s); };
    double s5 = oracles::simpson(fker, 0.0, 5.0, 1e-13);
    CHECK(oracles::rel_gap(F5.value, s5) < 1e-10);

    CHECK(big_f(zp, 0.0).value == 0.0);
    CHECK(kernel_at(zp, zp.steady.eta, 3.0) ==
          doctest::Approx(std::pow(z_at(zp, 3.0), zp.p_exp) *
                          std::exp(-zp.steady.eta * 3.0)).epsilon(1e-14));
}

TEST_CASE("constant-z start reduces the integrals to plain exponentials") {
    auto p = oracles::canonical();
    auto ss = steady_state(p);
    auto zp = make_zpath(p, ss.z_star);
    double zs_p = std::pow(ss.z_star, zp.p_exp);
    for (double t : {1.0, 5.0, 25.0}) {
        CHECK(big_f(zp, t).value ==
              doctest::Approx(zs_p * (1.0 - std::exp(-ss.eta * t)) / ss.eta).epsilon(1e-12));
        CHECK(big_g(zp, t).value ==
              doctest::Approx(zs_p * (1.0 - std::exp(-ss.r_g * t)) / ss.r_g).epsilon(1e-12));
    }
    CHECK(big_f_infinity(zp).value == doctest::Approx(zs_p / ss.eta).epsilon(1e-11));
    CHECK(big_g_infinity(zp).value == doctest::Approx(zs_p / ss.r_g).epsilon(1e-11));
}

TEST_CASE("improper limits: frozen values, ordering, horizon stability") {
    auto zp = canonical_path(0.5);
    auto Fi = big_f_infinity(zp);
    auto Gi = big_g_infinity(zp);
    CHECK(Fi.value == doctest::Approx(fr::f_inf).epsilon(1e-10));
    CHECK(Gi.value == doctest::Approx(fr::g_inf).epsilon(1e-10));
    CHECK(Gi.value > Fi.value);

    double T = truncation_time(zp, zp.steady.eta);
    auto Fi2 = big_f_infinity(zp, 1e-11, 2.0 * T);
    CHECK(std::fabs(Fi2.value - Fi.value) < 1e-9 * std::fabs(Fi.value));
}

TEST_CASE("ordering of the limits holds off the canonical set") {
    // sigma below one, z0 above the steady value, pi = 0
    for (auto [s, r, b, g, d, pi, zf] :
         {std::tuple{0.5, 0.05, 0.33, 1.0, 0.08, 0.02, 0.5},
          std::tuple{3.0, 0.04, 0.5, 0.8, 0.09, 0.06, 2.0},
          std::tuple{1.5, 0.03, 0.25, 1.2, 0.07, 0.0, 0.3}}) {
        EconomyParams p{s, r, b, g, d, pi};
        auto ss = steady_state(p);
        auto zp = make_zpath(p, zf * ss.z_star);
        CHECK(big_g_infinity(zp).value > big_f_infinity(zp).value);
    }
}

TEST_CASE("scaled tails splice with the finite integrals") {
    auto zp = canonical_path(0.5);
    double Fi = big_f_infinity(zp).value;
    double Gi = big_g_infinity(zp).value;
    for (double t : {0.5, 1.0, 5.0, 20.0}) {
        double lhs = big_f(zp, t).value + std::exp(-zp.steady.eta * t) * f_tail(zp, t).value;
        CHECK(oracles::rel_gap(lhs, Fi) < 1e-9);
        double lhg = big_g(zp, t).value + std::exp(-zp.steady.r_g * t) * g_tail(zp, t).value;
        CHECK(oracles::rel_gap(lhg, Gi) < 1e-9);
    }
    CHECK(oracles::rel_gap(f_tail(zp, 0.0).value, Fi) < 1e-10);
}

TEST_CASE("scaled tails stay finite far beyond the exponent underflow point") {
    auto zp = canonical_path(0.5);
    double t_huge = 200.0 / 0.03;  // exp(-eta t) underflows long before this
    double zs_p = std::pow(zp.steady.z_star, zp.p_exp);
    auto phi = f_tail(zp, t_huge);
    auto psi = g_tail(zp, t_huge);
    CHECK(std::isfinite(phi.value));
    CHECK(phi.value == doctest::Approx(zs_p / zp.steady.eta).epsilon(1e-10));
    CHECK(psi.value == doctest::Approx(zs_p / zp.steady.r_g).epsilon(1e-10));
}

TEST_CASE("truncation time meets both of its guarantees") {
    auto zp = canonical_path(0.5);
    double T = truncation_time(zp, zp.steady.eta, 1e-12, 1e-10);
    CHECK(std::exp(-zp.steady.eta * T) <= 1e-10);
    CHECK(std::fabs(z_at(zp, T) / zp.steady.z_star - 1.0) <= 1e-12);
}

TEST_CASE("rejects a nonpositive start") {
    auto p = oracles::canonical();
    CHECK_THROWS_AS(make_zpath(p, 0.0), ValidationError);
    CHECK_THROWS_AS(make_zpath(p, -0.1), ValidationError);
}

TEST_SUITE_END();
