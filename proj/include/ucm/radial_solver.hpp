#pragma once

// Spherically symmetric solver for the (rho, u, A, F) system.
//
// With u = u(r) e_r and A = diag(A_r, A_t, A_t), F = diag(F_r, F_t, F_t):
//
//   rho_t + (1/r^2) (r^2 rho u)_r = 0
//   (rho u)_t + (1/r^2) (r^2 (rho u^2 + p - T_rr))_r = (2/r) (p - T_t)
//   lambda (d/dt + u d/dr) A_r + A_r = F_r^-2
//   lambda (d/dt + u d/dr) A_t + A_t = F_t^-2
//   (d/dt + u d/dr) F_r = F_r u_r
//   (d/dt + u d/dr) F_t = F_t u / r
//
// with T_rr = rho G (F_r^2 A_r - 1), T_t = rho G (F_t^2 A_t - 1).
//
// Space: MUSCL reconstruction of (rho, u, A, F) with minmod slopes, Rusanov
// fluxes for mass and momentum on spherical faces, and a path-conservative
// Rusanov discretization (linear path) of the non-conservative products
// u X_r and F_r u_r. Mass uses the exact shell volumes, so sum rho_i V_i
// is conserved to round-off. Time: two-stage SSP Runge-Kutta.

#include "ucm/diagnostics.hpp"
#include "ucm/initial_data.hpp"
#include "ucm/radial_state.hpp"

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ucm {

enum class BreakdownReason { positivity_loss, cfl_collapse, gradient_threshold };

std::string to_string(BreakdownReason reason);

struct Breakdown {
    BreakdownReason reason = BreakdownReason::positivity_loss;
    double time = 0.0;            ///< time of the failed step
    double last_valid_time = 0.0; ///< time of the last healthy state
    std::string detail;
};

/// Thrown by the rhs and the CFL rule on invalid input states.
class BreakdownError : public std::runtime_error {
public:
    BreakdownError(BreakdownReason reason, const std::string& what)
        : std::runtime_error(what), reason_(reason) {}
    BreakdownReason reason() const { return reason_; }

private:
    BreakdownReason reason_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Thresholds {
    double gradient_factor = 1e3;  ///< sup|u_r| > factor * reference
    double positivity_floor = 1e-10;
    double dt_floor_factor = 1e-12; ///< dt < factor * dr
};

struct SchemeConfig {
    double cfl = 0.5;
    Thresholds thresholds;
    /// Relaxation-only mode: u stays 0, only the A (and T) sources act.
    bool pin_velocity = false;
    /// Reference gradient for the gradient threshold; 0 disables the check.
    double gradient_reference = 0.0;
};

using StepOutcome = std::variant<RadialState, Breakdown>;

/// Semi-discrete time derivative. The T_rr/T_t entries are filled iff the
/// state tracks the T-form path.
RadialFields rhs_radial(const RadialState& state, const Parameters& params, bool pin_velocity = false);

/// Time derivative of (T_rr, T_t) from the upper-convected stress equation
///
///   lambda (T_t + u.grad T - grad u T - T grad u^T + (div u) T) + T = 2 mu0 rho D u
///
/// in its radial diagonal form; uses the tracked T fields when present, the
/// reconstruction from (rho, A, F) otherwise. Only T_rr/T_t of the result are set.
RadialFields evolve_T_form(const RadialState& state, const Parameters& params);

/// cfl * dr / max_i char_speed_bound(cell i).
double cfl_dt(const RadialState& state, const Parameters& params, double cfl);

/// One SSP-RK2 step of size min(cfl_dt, dt_max).
StepOutcome step(const RadialState& state, const Parameters& params, const SchemeConfig& config,
                 double dt_max = std::numeric_limits<double>::infinity());

struct RunConfig {
    double cfl = 0.5;
    double t_end = 1.0;
    double output_interval = 0.01;
    Thresholds thresholds;
    double sigma_est = 0.0; ///< must be set (> 0)
    bool pin_velocity = false;
    bool track_T_form = false;
    std::size_t max_steps = 100'000'000;
};

struct RunResult {
    std::vector<DiagnosticsRecord> records;
    std::optional<Breakdown> breakdown;
    RadialState final_state;     ///< last healthy state
    double initial_sup_grad_u = 0.0;
    std::size_t steps = 0;
};

DiagnosticsContext make_context(const InitialData& data, const Parameters& params, double sigma_est);

/// Marches from the initial data to t_end (or breakdown), recording diagnostics
/// at every multiple of output_interval and at t_end. Records are finalized
/// (residuals, tr(T) slack); V_lower is left NaN. Throws ConfigError when the
/// grid does not contain B(R + sigma_est t_end).
RunResult run(const InitialData& data, const Parameters& params, const RunConfig& config);

/// Same as run() from an arbitrary state (used for checkpoints and tests).
RunResult run_from(RadialState state, const DiagnosticsContext& ctx, const RunConfig& config);

} // namespace ucm
