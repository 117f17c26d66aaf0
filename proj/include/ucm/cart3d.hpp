#pragma once

// Low-order Cartesian solver on a small cube, used to cross-check the radial
// reduction. Mass and momentum use Rusanov fluxes; the advected tensors use
// the matching first-order path-conservative update:
//
//   A_t + u.grad A = (F^-1 F^-T - A) / lambda
//   F_t + u.grad F = grad u F
//
// No reconstruction and no limiting.

#include "ucm/initial_data.hpp"
#include "ucm/model.hpp"
#include "ucm/radial_solver.hpp"

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace ucm {

/// n^3 cells covering [-X, X]^3; cell (i, j, k) is stored at (i n + j) n + k.
struct CartesianState {
    std::size_t n = 0;
    double half_width = 0.0;
    double t = 0.0;
    std::vector<double> rho;
    std::vector<Eigen::Vector3d> mom;
    std::vector<Eigen::Matrix3d> A, F;

    double h() const { return 2.0 * half_width / static_cast<double>(n); }
    std::size_t size() const { return rho.size(); }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n + j) * n + k; }
    Eigen::Vector3d center(std::size_t idx) const;
    PointState point(std::size_t idx) const;

    static CartesianState background(std::size_t n, double half_width);
};

/// Samples a radial state at |x| (linear interpolation, background beyond the
/// radial grid): u = u(r) x/r, A = A_t I + (A_r - A_t) e e^T, same for F.
CartesianState embed(const RadialState& radial, std::size_t n, double half_width);

struct CartDerivative {
    std::vector<double> rho;
    std::vector<Eigen::Vector3d> mom;
    std::vector<Eigen::Matrix3d> A, F;
};

/// Semi-discrete time derivative. Throws BreakdownError on non-positive
/// density or non-finite input.
CartDerivative rhs_cart(const CartesianState& state, const Parameters& params);

using CartStepOutcome = std::variant<CartesianState, Breakdown>;

/// One SSP-RK2 step of size min(cfl h / max speed, dt_max).
CartStepOutcome step_cart(const CartesianState& state, const Parameters& params, double cfl,
                          double dt_max);

struct CompareOptions {
    double half_width = 0.0; ///< 0: R + sigma_est t_short plus two cells of margin
    double sigma_est = 0.0;  ///< 0: default_sigma_est(params)
    double cfl = 0.4;
};

struct CompareResult {
    std::size_t n = 0;
    double t = 0.0;
    double half_width = 0.0;
    double rho_error = 0.0;   ///< relative L2 error of rho - 1
    double speed_error = 0.0; ///< relative L2 error of |u|
    double discrepancy = 0.0; ///< max of the two; NaN when aborted
    std::optional<Breakdown> breakdown;
};

/// Runs the radial solver and the Cartesian solver from the same data to
/// t_short and compares the Cartesian cells with the radial solution at |x|.
CompareResult run_compare(const InitialData& data, const Parameters& params, std::size_t n, double t_short,
                          const CompareOptions& options = {});

/// Relative L2 discrepancy between a Cartesian state and a radial state at equal times.
CompareResult discrepancy(const CartesianState& cart, const RadialState& radial);

} // namespace ucm
