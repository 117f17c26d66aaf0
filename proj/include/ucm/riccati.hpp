#pragma once

// Blow-up criterion and Riccati comparison.
//
// With c2 = sigma / R, c3 = 3 / (4 pi max rho0 R^5) and
// U0 = W(0) - lambda (H0 + max rho0 ||u0||^2), the comparison function
//
//   V' = c3 / (1 + c2 t)^5 V^2,   V(0) = U0
//
// has the closed form 1/V(t) = 1/U0 - (c3 / 4c2) (1 - (1 + c2 t)^-4) and
// diverges at a finite time iff U0 > 4 c2 / c3. That divergence time T* bounds
// the lifespan of any classical solution.

#include "ucm/diagnostics.hpp"
#include "ucm/initial_data.hpp"
#include "ucm/model.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <vector>

namespace ucm {

class NoBound : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

double compute_U0(const InitialData& data, const Parameters& params);
double compute_c2(double sigma_est, double R);
double compute_c3(double max_rho0, double R);

struct CriterionVerdict {
    bool satisfied = false;
    double U0 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double threshold = 0.0; ///< 4 c2 / c3
    // The same test written as W(0) >= lambda (H0 + max rho0 ||u0||^2) + 16 R^4 sigma pi max rho0 / 3.
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Strict: U0 == 4 c2 / c3 is not enough.
bool criterion_holds(double U0, double c2, double c3);
CriterionVerdict check_criterion(const InitialData& data, const Parameters& params, double sigma_est);

/// ((1 - 4 c2 / (c3 U0))^(-1/4) - 1) / c2. Throws NoBound unless criterion_holds.
double blowup_bound_Tstar(double U0, double c2, double c3);

/// Closed-form V(t); +inf at and beyond the divergence time.
double V_closed_form(double U0, double c2, double c3, double t);

struct VSeries {
    std::vector<double> t;
    std::vector<double> V;
    bool diverged = false;          ///< the grid reached past the numerical divergence
    std::optional<double> divergence_time;
};

inline constexpr double kVDivergence = 1e12;

/// Integrates the comparison ODE with an adaptive Dormand-Prince method and
/// samples V on `t_grid` (nondecreasing, starting at >= 0). Grid points past
/// the point where V exceeds `divergence_threshold` are dropped and
/// `diverged` is set. Requires U0 >= 0 (std::invalid_argument otherwise).
VSeries integrate_V(double U0, double c2, double c3, const std::vector<double>& t_grid,
                    double divergence_threshold = kVDivergence);

/// First time the numerically integrated V exceeds `threshold` (nullopt if it
/// does not happen before t_max).
std::optional<double> numerical_divergence_time(double U0, double c2, double c3, double t_max,
                                                double threshold = kVDivergence);

struct ComparisonVerdict {
    bool passed = true;
    double min_margin = 0.0;
    double tolerance = 0.0;
    bool interpolated = false; ///< record times did not coincide with the V grid
    std::vector<double> margin;
};

/// margin_k = W(t_k) - V(t_k); passes when min margin >= -tol_rel * max|W|.
/// V is linearly interpolated when the grids differ; record times beyond the
/// V series count as failures.
ComparisonVerdict compare_W_V(const std::vector<DiagnosticsRecord>& records, const VSeries& V,
                              double tol_rel = 1e-3);

struct BlowupReport {
    Parameters params;
    double sigma_est = 0.0;
    RadialGrid grid;
    double R = 0.0;
    double max_rho0 = 1.0;
    double W0 = 0.0;
    double H0 = 0.0;
    double u0_norm2 = 0.0;
    CriterionVerdict criterion;
    std::optional<double> T_star;
    VSeries V_series;
};

/// Full report; V is sampled on `t_grid` when U0 >= 0 and left empty otherwise.
BlowupReport make_blowup_report(const InitialData& data, const Parameters& params, double sigma_est,
                                const std::vector<double>& t_grid);

/// Report from injected constants (no data file): grid/data echoes are zero.
BlowupReport make_blowup_report(double U0, double c2, double c3, const Parameters& params,
                                double sigma_est, const std::vector<double>& t_grid);

nlohmann::json to_json(const BlowupReport& report);

} // namespace ucm
