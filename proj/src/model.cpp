#include "ucm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ucm {

Parameters Parameters::make(double a, double gamma, double lambda, double mu0) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid parameters: ") + what);
    };
    require(std::isfinite(a) && a > 0.0, "a must be > 0");
    require(std::isfinite(gamma) && gamma > 1.0, "gamma must be > 1");
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be > 0");
    require(std::isfinite(mu0) && mu0 > 0.0, "mu0 must be > 0");
    return Parameters(a, gamma, lambda, mu0);
}

PointState RadialPointState::embed() const {
    PointState p;
    p.rho = rho;
    p.u = Eigen::Vector3d(u, 0.0, 0.0);
    p.A = Eigen::Vector3d(A_r, A_t, A_t).asDiagonal();
    p.F = Eigen::Vector3d(F_r, F_t, F_t).asDiagonal();
    return p;
}

double eval_p0(double rho, const Parameters& params) {
    if (!(rho >= 0.0)) throw std::domain_error("eval_p0: negative density");
    return params.a() * std::pow(rho, params.gamma());
}

StressTensor eval_stress(const PointState& state, const Parameters& params) {
    const Eigen::Matrix3d B = state.F * state.A * state.F.transpose();
    const double scale = state.rho * params.G();
    StressTensor out;
    for (int i = 0; i < 3; ++i) {
        out.T(i, i) = scale * (B(i, i) - 1.0);
        for (int j = i + 1; j < 3; ++j) {
            const double v = scale * 0.5 * (B(i, j) + B(j, i));
            out.T(i, j) = v;
            out.T(j, i) = v;
        }
    }
    return out;
}

RadialStress eval_stress(const RadialPointState& s, const Parameters& params) {
    const double scale = s.rho * params.G();
    return {scale * (s.F_r * s.F_r * s.A_r - 1.0), scale * (s.F_t * s.F_t * s.A_t - 1.0)};
}

Eigen::Matrix3d conformation_from_stress(const StressTensor& stress, double rho,
                                         const Eigen::Matrix3d& F, const Parameters& params) {
    if (!(rho > 0.0)) throw std::domain_error("conformation_from_stress: rho must be > 0");
    Eigen::FullPivLU<Eigen::Matrix3d> lu(F);
    if (!lu.isInvertible()) throw std::domain_error("conformation_from_stress: F is singular");
    const Eigen::Matrix3d Finv = lu.inverse();
    const Eigen::Matrix3d inner = stress.T / (rho * params.G()) + Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d A = Finv * inner * Finv.transpose();
    return 0.5 * (A + A.transpose());
}

double pressure_potential(double rho, const Parameters& params) {
    if (!(rho >= 0.0)) throw std::domain_error("pressure_potential: negative density");
    const double g = params.gamma();
    const double x = rho - 1.0;
    // rho^g - 1 - g x, written to avoid cancellation near rho = 1
    const double v = (rho > 0.0 ? std::expm1(g * std::log1p(x)) : -1.0) - g * x;
    return params.a() / (g - 1.0) * std::max(v, 0.0);
}

double entropy_potential(double rho, const Parameters& params) {
    if (!(rho >= 0.0)) throw std::domain_error("entropy_potential: negative density");
    const double x = rho - 1.0;
    const double v = (rho > 0.0 ? rho * std::log1p(x) : 0.0) - x;
    return params.G() * std::max(v, 0.0);
}

double energy_integrand(const PointState& state, const Parameters& params) {
    if (!(state.rho > 0.0)) throw std::domain_error("energy_integrand: rho must be > 0");
    return 0.5 * state.rho * state.u.squaredNorm() + pressure_potential(state.rho, params) +
           entropy_potential(state.rho, params) + 0.5 * eval_stress(state, params).trace();
}

double energy_integrand(const RadialPointState& state, const Parameters& params) {
    if (!(state.rho > 0.0)) throw std::domain_error("energy_integrand: rho must be > 0");
    return 0.5 * state.rho * state.u * state.u + pressure_potential(state.rho, params) +
           entropy_potential(state.rho, params) + 0.5 * eval_stress(state, params).trace();
}

namespace {

double speed_from(double rho, double u_norm, double lambda_max, const Parameters& params) {
    const double cs2 = params.a() * params.gamma() * std::pow(rho, params.gamma() - 1.0);
    const double ce2 = 2.0 * params.G() * (1.0 + lambda_max);
    return u_norm + std::sqrt(cs2 + ce2);
}

} // namespace

double char_speed_bound(const PointState& state, const Parameters& params) {
    const Eigen::Matrix3d B = state.F * state.A * state.F.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
    eig.computeDirect(0.5 * (B + B.transpose()), Eigen::EigenvaluesOnly);
    return speed_from(state.rho, state.u.norm(), eig.eigenvalues().maxCoeff(), params);
}

double char_speed_bound(const RadialPointState& s, const Parameters& params) {
    const double lmax = std::max(s.F_r * s.F_r * s.A_r, s.F_t * s.F_t * s.A_t);
    return speed_from(s.rho, std::abs(s.u), lmax, params);
}

double background_longitudinal_speed(const Parameters& params) {
    return std::sqrt(params.a() * params.gamma() + 2.0 * params.G());
}

double default_sigma_est(const Parameters& params) {
    return char_speed_bound(RadialPointState{}, params);
}

} // namespace ucm
