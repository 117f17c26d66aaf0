#include "support.hpp"

#include "ucm/diagnostics.hpp"
#include "ucm/radial_solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ucm;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;
const Parameters kP = Parameters::make(1.0, 1.4, 1.0, 1.0);

std::vector<DiagnosticsRecord> series(const std::vector<double>& t, auto&& fill) {
    std::vector<DiagnosticsRecord> rec(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        rec[k].t = t[k];
        fill(rec[k]);
    }
    return rec;
}

std::vector<double> uniform_times(double T, int n) {
    std::vector<double> t;
    for (int k = 0; k <= n; ++k) t.push_back(T * k / n);
    return t;
}

} // namespace

TEST_CASE("integrals of the background vanish") {
    const auto s = RadialState::background(RadialGrid::covering(3.0, 32));
    CHECK(quad_m(s) == 0.0);
    CHECK(quad_W(s) == 0.0);
    CHECK(quad_E(s, kP) == 0.0);
    CHECK(quad_int_trT(s, kP) == 0.0);
    CHECK(support_radius(s) == 0.0);
    CHECK(sup_grad_u(s) == 0.0);
}

TEST_CASE("excess mass of a cellwise constant bump is exact") {
    auto s = RadialState::background(RadialGrid::covering(4.0, 40));
    for (std::size_t i = 0; i < 10; ++i) s.rho[i] = 1.5;
    // ten cells fill the ball of radius 1
    CHECK(quad_m(s) == Approx(0.5 * 4.0 / 3.0 * pi).epsilon(1e-14));
    CHECK(support_radius(s) == Approx(s.grid.center(9)));
}

TEST_CASE("radial moment W is second order") {
    auto err = [](std::size_t n) {
        auto s = RadialState::background(RadialGrid::covering(2.0, n));
        for (std::size_t i = 0; i < n; ++i) s.mom[i] = std::exp(-s.grid.center(i));
        // 4 pi int_0^2 e^-r r^3 dr = 4 pi (6 - 38 e^-2)
        return std::abs(quad_W(s) - 4.0 * pi * (6.0 - 38.0 * std::exp(-2.0)));
    };
    CHECK(err(100) / err(200) == Approx(4.0).epsilon(0.05));
}

TEST_CASE("support radius honours the tolerance") {
    auto s = RadialState::background(RadialGrid::covering(4.0, 40));
    s.A_t[20] = 1.0 + 1e-13;
    CHECK(support_radius(s) == 0.0);
    s.A_t[20] = 1.0 + 1e-11;
    CHECK(support_radius(s) == Approx(s.grid.center(20)));
    s.mom[30] = NAN;
    CHECK(support_radius(s) == Approx(s.grid.center(30)));
}

TEST_CASE("sup of the velocity gradient") {
    auto s = RadialState::background(RadialGrid::covering(2.0, 50));
    for (std::size_t i = 0; i < s.size(); ++i) s.mom[i] = 0.7 * s.grid.center(i);
    CHECK(sup_grad_u(s) == Approx(0.7));
}

TEST_CASE("Jensen margin is non-negative for excess density and restricted to the ball") {
    auto s = RadialState::background(RadialGrid::covering(4.0, 40));
    for (std::size_t i = 0; i < 10; ++i) s.rho[i] = 1.2;
    CHECK(check_jensen(s, kP, 1.0, 1.0) > 0.0);
    s.rho[35] = 0.5;
    s.t = 0.0;
    CHECK(check_jensen(s, kP, 1.0, 1.0) > 0.0);
    s.t = 3.0;
    CHECK(check_jensen(s, kP, 1.0, 1.0) < check_jensen(s, kP, 1.0, 0.0));
}

TEST_CASE("time derivative is exact for quadratics on non-uniform grids") {
    const std::vector<double> t{0.0, 0.1, 0.25, 0.3, 0.5, 0.9};
    const auto rec = series(t, [](DiagnosticsRecord& r) { r.E = 3.0 * r.t * r.t - 2.0 * r.t + 1.0; });
    const auto d = time_derivative(rec, &DiagnosticsRecord::E);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(d[k] == Approx(6.0 * t[k] - 2.0));
    CHECK_THROWS_AS(time_derivative(std::vector<DiagnosticsRecord>(2), &DiagnosticsRecord::E), InsufficientData);
}

TEST_CASE("energy residual vanishes on an exact decay") {
    const auto p = Parameters::make(1.0, 1.4, 0.5, 1.0);
    const auto rec = series(uniform_times(1.0, 200), [&](DiagnosticsRecord& r) {
        r.E = std::exp(-r.t);
        r.int_trT = 2.0 * p.lambda() * std::exp(-r.t);
    });
    const auto res = check_energy_identity(rec, p);
    CHECK(res.max_abs < 1e-4);
    const auto bad = series(uniform_times(1.0, 200), [&](DiagnosticsRecord& r) {
        r.E = std::exp(-r.t);
        r.int_trT = 0.0;
    });
    CHECK(check_energy_identity(bad, p).max_abs == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("W inequality residual") {
    DiagnosticsContext ctx{kP, 2.0, 1.0, 0.0, 1.0, 0.0};
    // W = const, int tr(T) = W^2 / (4/3 pi (R + sigma t)^5 max rho0) makes the residual zero
    const auto rec = series(uniform_times(1.0, 100), [&](DiagnosticsRecord& r) {
        r.W = 5.0;
        r.int_trT = 25.0 / (4.0 / 3.0 * pi * std::pow(2.0 + r.t, 5));
    });
    const auto res = check_W_inequality(rec, ctx);
    CHECK(res.max_abs < 1e-12);
}

TEST_CASE("tr(T) budget slack") {
    DiagnosticsContext ctx{kP, 2.0, 1.0, 3.0, 1.0, 1.0};
    CHECK(ctx.trT_budget() == Approx(4.0));
    auto rec = series(uniform_times(1.0, 10), [](DiagnosticsRecord& r) { r.cum_int_trT = 3.0 * r.t; });
    CHECK(check_trT_bound(rec, ctx).passed);
    CHECK(check_trT_bound(rec, ctx).min_slack == Approx(1.0));
    rec.back().cum_int_trT = 4.0 + 1e-3;
    const auto v = check_trT_bound(rec, ctx);
    CHECK_FALSE(v.passed);
    CHECK(v.min_slack == Approx(-1e-3));
}

TEST_CASE("cumulative tr(T) integrates by the trapezoid rule") {
    const auto data = ucm::testing::make_pulse(RadialGrid::covering(5.0, 64), kP);
    const auto ctx = make_context(data, kP, default_sigma_est(kP));
    auto s = RadialState::from_initial(data, kP);
    const auto r0 = record_snapshot(s, ctx, nullptr);
    CHECK(r0.cum_int_trT == 0.0);
    s.t = 0.5;
    const auto r1 = record_snapshot(s, ctx, &r0);
    CHECK(r1.cum_int_trT == Approx(0.5 * r0.int_trT));
    CHECK(r1.m == Approx(data.m0));
    CHECK(r0.W == Approx(data.W0));
    CHECK(std::isnan(r1.energy_residual));
}

TEST_CASE("CSV round trip is exact and the schema is enforced") {
    auto rec = series(uniform_times(0.3, 3), [](DiagnosticsRecord& r) {
        r.m = 1.0 / 3.0;
        r.W = -std::numbers::e * r.t;
        r.V_lower = NAN;
        r.support_radius = 1e-300;
    });
    std::stringstream ss;
    write_csv(ss, rec);
    const std::string text = ss.str();
    CHECK(text.rfind("t,m,W,E,int_trT,cum_int_trT,support_radius,sup_grad_u,energy_residual,jensen_margin,"
                     "trT_slack,W_ineq_residual,V_lower\n",
                     0) == 0);
    const auto back = read_csv(ss);
    REQUIRE(back.size() == rec.size());
    for (std::size_t k = 0; k < rec.size(); ++k) {
        CHECK(back[k].t == rec[k].t);
        CHECK(back[k].W == rec[k].W);
        CHECK(back[k].m == rec[k].m);
        CHECK(back[k].support_radius == rec[k].support_radius);
        CHECK(std::isnan(back[k].V_lower));
    }

    std::string broken = text;
    broken.replace(broken.find("V_lower"), 7, "V_upper");
    std::istringstream in(broken);
    try {
        read_csv(in);
        FAIL("expected a schema error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("V_lower") != std::string::npos);
        CHECK(msg.find("V_upper") != std::string::npos);
    }
}
