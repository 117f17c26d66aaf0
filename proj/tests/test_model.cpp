#include "ucm/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace ucm;
using doctest::Approx;

namespace {

Eigen::Matrix3d random_spd(std::mt19937& gen) {
    std::uniform_real_distribution<double> d(-0.4, 0.4);
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = d(gen);
    return M * M.transpose() + Eigen::Matrix3d::Identity() * 0.5;
}

Eigen::Matrix3d random_near_identity(std::mt19937& gen) {
    std::uniform_real_distribution<double> d(-0.2, 0.2);
    Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) += d(gen);
    return M;
}

} // namespace

TEST_CASE("parameters reject non-physical values") {
    CHECK_THROWS_AS(Parameters::make(0.0, 1.4, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Parameters::make(1.0, 1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Parameters::make(1.0, 1.4, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Parameters::make(1.0, 1.4, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Parameters::make(NAN, 1.4, 1.0, 1.0), std::invalid_argument);

    const auto p = Parameters::make(2.0, 1.4, 0.5, 3.0);
    CHECK(p.G() == Approx(6.0));
    CHECK(p.p_bar() == 2.0);
}

TEST_CASE("gamma-law pressure") {
    const auto p = Parameters::make(2.0, 1.5, 1.0, 1.0);
    CHECK(eval_p0(4.0, p) == Approx(16.0));
    CHECK(eval_p0(1.0, p) == Approx(2.0));
}

TEST_CASE("stress vanishes at the background and scales with the conformation perturbation") {
    const auto p = Parameters::make(1.0, 1.4, 1.0, 1.0);
    CHECK(eval_stress(PointState::background(), p).T.norm() == 0.0);

    PointState s;
    s.A = 1.1 * Eigen::Matrix3d::Identity();
    CHECK(eval_stress(s, p).trace() == Approx(0.3));

    RadialPointState r{1.0, 0.0, 1.1, 1.1, 1.0, 1.0};
    CHECK(eval_stress(r, p).trace() == Approx(0.3));
}

TEST_CASE("radial stress matches the 3D stress of the embedded state") {
    const auto p = Parameters::make(1.0, 1.4, 0.7, 1.3);
    const RadialPointState r{1.3, 0.4, 1.2, 0.9, 1.1, 0.95};
    const auto T3 = eval_stress(r.embed(), p).T;
    const auto Tr = eval_stress(r, p);
    // rho G (F^2 A - 1) on each diagonal entry
    CHECK(Tr.rr == Approx(1.3 * p.G() * (1.1 * 1.1 * 1.2 - 1.0)));
    CHECK(Tr.t == Approx(1.3 * p.G() * (0.95 * 0.95 * 0.9 - 1.0)));
    CHECK(T3(0, 0) == Approx(Tr.rr));
    CHECK(T3(1, 1) == Approx(Tr.t));
    CHECK(T3(2, 2) == Approx(Tr.t));
    CHECK(std::abs(T3(0, 1)) + std::abs(T3(0, 2)) + std::abs(T3(1, 2)) < 1e-15);
}

TEST_CASE("conformation_from_stress inverts eval_stress") {
    std::mt19937 gen(7);
    const auto p = Parameters::make(1.0, 1.4, 0.5, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        PointState s;
        s.rho = 0.5 + trial * 0.1;
        s.A = random_spd(gen);
        s.F = random_near_identity(gen);
        const auto T = eval_stress(s, p);
        const Eigen::Matrix3d A = conformation_from_stress(T, s.rho, s.F, p);
        CHECK((A - s.A).norm() < 1e-12 * s.A.norm());
    }
    PointState s;
    s.F.setZero();
    CHECK_THROWS_AS(conformation_from_stress(StressTensor{}, 1.0, s.F, p), std::domain_error);
}

TEST_CASE("density potentials are non-negative and vanish at rho = 1") {
    const auto p = Parameters::make(1.5, 1.4, 0.5, 1.0);
    for (double rho : {1e-6, 0.1, 0.5, 0.99, 1.0, 1.01, 2.0, 10.0}) {
        CHECK(pressure_potential(rho, p) >= 0.0);
        CHECK(entropy_potential(rho, p) >= 0.0);
    }
    CHECK(pressure_potential(1.0, p) == 0.0);
    CHECK(entropy_potential(1.0, p) == 0.0);
    // closed forms at rho = 2
    CHECK(pressure_potential(2.0, p) == Approx(1.5 / 0.4 * (std::pow(2.0, 1.4) - 1.0 - 1.4)));
    CHECK(entropy_potential(2.0, p) == Approx(p.G() * (2.0 * std::log(2.0) - 1.0)));
}

TEST_CASE("energy density") {
    const auto p = Parameters::make(1.0, 2.0, 1.0, 1.0);
    CHECK(energy_integrand(RadialPointState{}, p) == 0.0);
    const RadialPointState s{1.0, 2.0, 1.1, 1.1, 1.0, 1.0};
    // kinetic 2 + tr(T)/2 = 0.15
    CHECK(energy_integrand(s, p) == Approx(2.15));
    CHECK(energy_integrand(s.embed(), p) == Approx(2.15));
}

TEST_CASE("characteristic speed bound") {
    const auto p = Parameters::make(1.0, 1.4, 1.0, 1.0);
    CHECK(default_sigma_est(p) == Approx(std::sqrt(1.4 + 4.0)));
    CHECK(char_speed_bound(RadialPointState{}, p) == Approx(default_sigma_est(p)));
    CHECK(background_longitudinal_speed(p) == Approx(std::sqrt(3.4)));
    CHECK(default_sigma_est(p) > background_longitudinal_speed(p));

    std::mt19937 gen(3);
    std::uniform_real_distribution<double> d(0.5, 1.5);
    for (int k = 0; k < 50; ++k) {
        const RadialPointState s{d(gen), d(gen) - 1.0, d(gen), d(gen), d(gen), d(gen)};
        const double cs2 = p.a() * p.gamma() * std::pow(s.rho, p.gamma() - 1.0);
        const double longitudinal = std::abs(s.u) + std::sqrt(cs2 + p.G() * (s.F_r * s.F_r * s.A_r + 1.0));
        CHECK(char_speed_bound(s, p) >= longitudinal);
        CHECK(char_speed_bound(s, p) == Approx(char_speed_bound(s.embed(), p)));
    }
}
