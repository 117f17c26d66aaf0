#pragma once

// Constitutive relations of the compressible UCM system in (rho, u, A, F) form.
//
//   T = rho G (F A F^T - I),   G = mu0 / lambda,   p0(rho) = a rho^gamma
//
// Everything here is a pure function of its arguments.

#include <Eigen/Dense>

namespace ucm {

class Parameters {
public:
    static constexpr double rho_bar = 1.0;

    /// Validates a > 0, gamma > 1, lambda > 0, mu0 > 0 (throws std::invalid_argument).
    static Parameters make(double a, double gamma, double lambda, double mu0);

    double a() const { return a_; }
    double gamma() const { return gamma_; }
    double lambda() const { return lambda_; }
    double mu0() const { return mu0_; }
    /// Shear modulus mu0 / lambda.
    double G() const { return G_; }

    /// Reference pressure p0(rho_bar) = a.
    double p_bar() const { return a_; }

    bool operator==(const Parameters&) const = default;

private:
    Parameters(double a, double gamma, double lambda, double mu0)
        : a_(a), gamma_(gamma), lambda_(lambda), mu0_(mu0), G_(mu0 / lambda) {}

    double a_;
    double gamma_;
    double lambda_;
    double mu0_;
    double G_;
};

struct PointState {
    double rho = 1.0;
    Eigen::Vector3d u = Eigen::Vector3d::Zero();
    Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d F = Eigen::Matrix3d::Identity();

    static PointState background() { return {}; }
};

struct StressTensor {
    Eigen::Matrix3d T = Eigen::Matrix3d::Zero();

    double trace() const { return T.trace(); }
};

/// Spherically symmetric state: u = u(r) e_r, A and F diagonal in the
/// (e_r, e_theta, e_phi) frame with equal tangential entries.
struct RadialPointState {
    double rho = 1.0;
    double u = 0.0;
    double A_r = 1.0;
    double A_t = 1.0;
    double F_r = 1.0;
    double F_t = 1.0;

    /// The same state as a 3D point state expressed in the spherical frame.
    PointState embed() const;
};

/// Radial and tangential stress eigenvalues T_rr, T_t.
struct RadialStress {
    double rr = 0.0;
    double t = 0.0;

    double trace() const { return rr + 2.0 * t; }
};

double eval_p0(double rho, const Parameters& params);

StressTensor eval_stress(const PointState& state, const Parameters& params);
RadialStress eval_stress(const RadialPointState& state, const Parameters& params);

/// Inverse of eval_stress: A = F^{-1} (T / (rho G) + I) F^{-T}. Throws
/// std::domain_error when F is singular.
Eigen::Matrix3d conformation_from_stress(const StressTensor& stress, double rho,
                                         const Eigen::Matrix3d& F, const Parameters& params);

// The three density potentials of the energy density; each is >= 0 for rho >= 0.
double pressure_potential(double rho, const Parameters& params); // a/(gamma-1) (rho^g - 1 - g(rho-1))
double entropy_potential(double rho, const Parameters& params);  // G (rho ln rho - rho + 1)

/// rho|u|^2/2 + pressure_potential + entropy_potential + tr(T)/2.
double energy_integrand(const PointState& state, const Parameters& params);
double energy_integrand(const RadialPointState& state, const Parameters& params);

/// Upper bound on the characteristic speeds of the linearization at `state`:
///
///   |u| + sqrt(c_s^2 + c_e^2),  c_s^2 = a gamma rho^(gamma-1),
///                               c_e^2 = 2 G (1 + lambda_max(F A F^T)).
///
/// At the background the exact longitudinal speed is sqrt(a gamma + 2G) and the
/// shear speed sqrt(G); c_e^2 = 4G there is twice the exact elastic
/// contribution. For radial states the exact longitudinal speed squared is
/// c_s^2 + G (F_r^2 A_r + 1), which c_e^2 dominates for every admissible state.
double char_speed_bound(const PointState& state, const Parameters& params);
double char_speed_bound(const RadialPointState& state, const Parameters& params);

/// sqrt(a gamma + 2G): longitudinal wave speed of the background.
double background_longitudinal_speed(const Parameters& params);

/// Default propagation-speed estimate: char_speed_bound at the background.
double default_sigma_est(const Parameters& params);

} // namespace ucm
