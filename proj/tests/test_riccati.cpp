#include "support.hpp"

#include "ucm/riccati.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ucm;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t;
    for (int k = 0; k < n; ++k) t.push_back(a + (b - a) * k / (n - 1));
    return t;
}

} // namespace

TEST_CASE("worked lifespan bound") {
    // 4 c2 / (c3 U0) = 1/2, so T* = 2^(1/4) - 1
    CHECK(std::abs(blowup_bound_Tstar(1.0, 1.0, 8.0) - (std::pow(2.0, 0.25) - 1.0)) <= 1e-9);
}

TEST_CASE("criterion is strict and the bound is refused without it") {
    CHECK(criterion_holds(1.0, 1.0, 8.0));
    CHECK_FALSE(criterion_holds(0.5, 1.0, 8.0));
    CHECK_FALSE(criterion_holds(0.4, 1.0, 8.0));
    CHECK_THROWS_AS(blowup_bound_Tstar(0.5, 1.0, 8.0), NoBound);
    CHECK_THROWS_AS(blowup_bound_Tstar(-1.0, 1.0, 8.0), NoBound);
}

TEST_CASE("constants") {
    CHECK(compute_c2(2.0, 8.0) == Approx(0.25));
    CHECK(compute_c3(1.1, 2.0) == Approx(3.0 / (4.0 * pi * 1.1 * 32.0)));
}

TEST_CASE("without decay the bound reduces to 1 / (c3 U0)") {
    CHECK(blowup_bound_Tstar(2.0, 0.0, 0.5) == Approx(1.0));
    CHECK(V_closed_form(2.0, 0.0, 0.5, 0.5) == Approx(4.0));
}

TEST_CASE("closed form solves the comparison ODE") {
    const double U0 = 3.0, c2 = 0.4, c3 = 2.0;
    const double Ts = blowup_bound_Tstar(U0, c2, c3);
    CHECK(V_closed_form(U0, c2, c3, 0.0) == Approx(U0));
    for (double t : linspace(0.0, 0.9 * Ts, 7)) {
        const double h = 1e-6 * Ts;
        const double dV = (V_closed_form(U0, c2, c3, t + h) - V_closed_form(U0, c2, c3, t - h)) / (2.0 * h);
        const double V = V_closed_form(U0, c2, c3, t);
        CHECK(dV == Approx(c3 / std::pow(1.0 + c2 * t, 5) * V * V).epsilon(1e-6));
    }
    CHECK(std::isinf(V_closed_form(U0, c2, c3, Ts)));
    CHECK(std::isinf(V_closed_form(U0, c2, c3, 2.0 * Ts)));
}

TEST_CASE("integrated V matches the closed form and flags divergence") {
    const double U0 = 2.0, c2 = 0.3, c3 = 5.0;
    const double Ts = blowup_bound_Tstar(U0, c2, c3);
    const auto t = linspace(0.0, 0.99 * Ts, 200);
    const auto V = integrate_V(U0, c2, c3, t);
    REQUIRE(V.V.size() == t.size());
    CHECK_FALSE(V.diverged);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(V.V[k] == Approx(V_closed_form(U0, c2, c3, t[k])).epsilon(1e-8));

    const auto past = integrate_V(U0, c2, c3, linspace(0.0, 1.5 * Ts, 100));
    CHECK(past.diverged);
    REQUIRE(past.divergence_time);
    CHECK(*past.divergence_time == Approx(Ts).epsilon(1e-2));
    CHECK(past.V.size() < 100);

    const auto td = numerical_divergence_time(U0, c2, c3, 2.0 * Ts);
    REQUIRE(td);
    CHECK(*td == Approx(Ts).epsilon(1e-2));
    CHECK_FALSE(numerical_divergence_time(U0, c2, c3, 0.5 * Ts));
}

TEST_CASE("degenerate comparison data") {
    const auto t = linspace(0.0, 1.0, 5);
    CHECK_THROWS_AS(integrate_V(-1.0, 1.0, 1.0, t), std::invalid_argument);
    const auto zero = integrate_V(0.0, 1.0, 1.0, t);
    for (double v : zero.V) CHECK(v == 0.0);
    // below threshold: V stays bounded by 1 / (1/U0 - c3 / 4c2)
    const auto sub = integrate_V(0.2, 1.0, 8.0, linspace(0.0, 50.0, 50));
    CHECK_FALSE(sub.diverged);
    CHECK(sub.V.back() == Approx(V_closed_form(0.2, 1.0, 8.0, 50.0)).epsilon(1e-8));
    CHECK(sub.V.back() < 1.0 / (1.0 / 0.2 - 2.0));
}

TEST_CASE("W versus V comparison") {
    const double U0 = 1.0, c2 = 1.0, c3 = 8.0;
    const auto t = linspace(0.0, 0.1, 11);
    const auto V = integrate_V(U0, c2, c3, t);
    std::vector<DiagnosticsRecord> rec(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        rec[k].t = t[k];
        rec[k].W = V.V[k] + 0.5;
    }
    auto v = compare_W_V(rec, V);
    CHECK(v.passed);
    CHECK_FALSE(v.interpolated);
    CHECK(v.min_margin == Approx(0.5));

    rec[5].W = V.V[5] - 0.01 * rec[10].W;
    v = compare_W_V(rec, V);
    CHECK_FALSE(v.passed);

    // record times between the V samples
    std::vector<DiagnosticsRecord> mid(1);
    mid[0].t = 0.015;
    mid[0].W = 1e9;
    v = compare_W_V(mid, V);
    CHECK(v.interpolated);
    CHECK(v.passed);

    mid[0].t = 0.5;
    CHECK_FALSE(compare_W_V(mid, V).passed);
}

TEST_CASE("blowup report from constants and from data") {
    const auto p = Parameters::make(1.0, 1.4, 1.0, 1.0);
    const auto rep = make_blowup_report(1.0, 1.0, 8.0, p, 2.0, linspace(0.0, 0.1, 5));
    REQUIRE(rep.T_star);
    CHECK(*rep.T_star == Approx(std::pow(2.0, 0.25) - 1.0));
    const auto j = to_json(rep);
    CHECK(j.at("sigma_est").get<double>() == 2.0);
    CHECK(j.at("T_star").get<double>() == Approx(*rep.T_star));
    CHECK(j.at("params").at("gamma").get<double>() == 1.4);

    const auto none = make_blowup_report(0.1, 1.0, 8.0, p, 2.0, linspace(0.0, 1.0, 5));
    CHECK_FALSE(none.T_star);
    CHECK(to_json(none).at("T_star").is_null());

    const auto data = ucm::testing::make_pulse(RadialGrid::covering(5.0, 64), p);
    const auto small = make_blowup_report(data, p, default_sigma_est(p), linspace(0.0, 1.0, 5));
    CHECK_FALSE(small.criterion.satisfied);
    CHECK(small.criterion.U0 == Approx(compute_U0(data, p)));
    CHECK(small.criterion.U0 == Approx(data.W0 - p.lambda() * (data.H0 + data.max_rho0 * data.u0_norm2)));
    CHECK(small.V_series.V.empty());
}
