#pragma once

// Averaged functionals of a radial state and numerical checks of the energy
// identity, the mass, Jensen and tr(T) inequalities and the momentum-moment inequality.
// All integrals are sums over cells with the exact shell volumes as weights.

#include "ucm/model.hpp"
#include "ucm/radial_state.hpp"

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ucm {

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double m = 0.0;
    double W = 0.0;
    double E = 0.0;
    double int_trT = 0.0;
    double cum_int_trT = 0.0;
    double support_radius = 0.0;
    double sup_grad_u = 0.0;
    double energy_residual = 0.0;
    double jensen_margin = 0.0;
    double trT_slack = 0.0;
    double W_ineq_residual = 0.0;
    double V_lower = 0.0;
};

/// Everything a record needs beyond the state itself.
struct DiagnosticsContext {
    Parameters params;
    double R = 0.0;
    double sigma_est = 0.0;
    double H0 = 0.0;
    double max_rho0 = 1.0;
    double u0_norm2 = 0.0;

    /// lambda (H0 + max rho0 ||u0||^2): the cumulative tr(T) budget.
    double trT_budget() const { return params.lambda() * (H0 + max_rho0 * u0_norm2); }
    double ball_radius(double t) const { return R + sigma_est * t; }
};

/// Deviation from the background above which a cell counts as disturbed.
inline constexpr double kBackgroundTolerance = 1e-12;

double quad_m(const RadialState& state);
double quad_W(const RadialState& state);
double quad_E(const RadialState& state, const Parameters& params);
double quad_int_trT(const RadialState& state, const Parameters& params);
double quad_kinetic(const RadialState& state);   ///< int rho |u|^2
double quad_rho_r2(const RadialState& state);    ///< int |x|^2 rho

/// int_{B(t)} (p(rho) - p(1)) dx with B(t) = {r <= R + sigma_est t}.
double check_jensen(const RadialState& state, const Parameters& params, double R, double sigma_est);

/// Largest cell centre whose state deviates from the background by more than `tol`
/// (0 when the state is the background).
double support_radius(const RadialState& state, double tol = kBackgroundTolerance);

/// max |du/dr| from adjacent-cell differences, including the origin where u = 0.
double sup_grad_u(const RadialState& state);

/// Instantaneous record. cum_int_trT accumulates by the trapezoid rule from
/// `previous` (nullptr at the first output). Residual columns and V_lower are
/// left NaN for finalize_series / the comparison step.
DiagnosticsRecord record_snapshot(const RadialState& state, const DiagnosticsContext& ctx,
                                  const DiagnosticsRecord* previous);

/// d f/dt at every record from three-point (possibly non-uniform) differences;
/// central (f_{k+1} - f_{k-1}) / (t_{k+1} - t_{k-1}) for uniform spacing.
std::vector<double> time_derivative(const std::vector<DiagnosticsRecord>& records,
                                    double DiagnosticsRecord::*field);

struct ResidualSeries {
    std::vector<double> values;
    double max_abs = 0.0;
    double min = 0.0;
};

/// dE/dt + (1/lambda) int tr(T)/2 at each record.
ResidualSeries check_energy_identity(const std::vector<DiagnosticsRecord>& records,
                                     const Parameters& params);

/// W'(t) - [ W^2 / (4/3 pi (R + sigma t)^5 max rho0) - int tr(T) ].
ResidualSeries check_W_inequality(const std::vector<DiagnosticsRecord>& records,
                                  const DiagnosticsContext& ctx);

struct SlackVerdict {
    bool passed = true;
    double min_slack = 0.0;
    double tolerance = 0.0;
    std::vector<double> slack;
};

/// lambda (H0 + max rho0 ||u0||^2) - int_0^t int tr(T); fails below
/// -tol_rel * budget.
SlackVerdict check_trT_bound(const std::vector<DiagnosticsRecord>& records,
                             const DiagnosticsContext& ctx, double tol_rel = 1e-6);

/// Fills energy_residual, W_ineq_residual and trT_slack (residuals NaN with
/// fewer than three records).
void finalize_series(std::vector<DiagnosticsRecord>& records, const DiagnosticsContext& ctx);

// CSV with the fixed column set below, full round-trip precision.
inline constexpr std::array<std::string_view, 13> kCsvColumns{
    "t",          "m",           "W",           "E",          "int_trT",
    "cum_int_trT", "support_radius", "sup_grad_u", "energy_residual", "jensen_margin",
    "trT_slack",  "W_ineq_residual", "V_lower"};

void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records);
/// Throws std::runtime_error listing missing/unexpected columns on schema mismatch.
std::vector<DiagnosticsRecord> read_csv(std::istream& is);

} // namespace ucm
