#include "ucm/riccati.hpp"

#include "ucm/io.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace ucm {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// (1 - (1 + c2 t)^-4) / (4 c2), continuous at c2 = 0.
double decay_integral(double c2, double t) {
    if (c2 == 0.0) return t;
    return -std::expm1(-4.0 * std::log1p(c2 * t)) / (4.0 * c2);
}

using Vec1 = std::array<double, 1>;

struct Comparison {
    double c2, c3;
    void operator()(const Vec1& V, Vec1& dV, double t) const {
        dV[0] = c3 * std::pow(1.0 + c2 * t, -5.0) * V[0] * V[0];
    }
};

// Adaptive Dormand-Prince marcher with step-level control so the divergence
// threshold can be caught between outputs.
class Marcher {
public:
    Marcher(double U0, double c2, double c3)
        : rhs_{c2, c3}, stepper_(odeint::make_controlled<odeint::runge_kutta_dopri5<Vec1>>(1e-300, 1e-13)),
          V_{U0}, dt_(1e-3 / std::max(1.0, c3 * U0 + c2)) {}

    double t() const { return t_; }
    double V() const { return V_[0]; }

    /// Advances to `target` unless V crosses `threshold` first; returns false
    /// (and leaves t at the crossing estimate) in that case.
    bool advance_to(double target, double threshold) {
        while (t_ < target) {
            double dt = std::min(dt_, target - t_);
            const Vec1 before = V_;
            const double t_before = t_;
            odeint::controlled_step_result res;
            int tries = 0;
            do {
                res = stepper_.try_step(rhs_, V_, t_, dt);
                if (++tries > 10000) throw std::runtime_error("integrate_V: step size collapsed");
            } while (res == odeint::fail);
            if (t_ < target) dt_ = dt;
            if (!std::isfinite(V_[0]) || V_[0] > threshold) {
                // 1/V is close to linear near the singularity: interpolate it.
                const double a = 1.0 / before[0];
                const double b = std::isfinite(V_[0]) ? 1.0 / V_[0] : 0.0;
                const double s = (a - 1.0 / threshold) / (a - b);
                crossing_ = t_before + s * (t_ - t_before);
                return false;
            }
        }
        return true;
    }

    double crossing() const { return crossing_; }

private:
    Comparison rhs_;
    decltype(odeint::make_controlled<odeint::runge_kutta_dopri5<Vec1>>(0.0, 0.0)) stepper_;
    Vec1 V_;
    double t_ = 0.0;
    double dt_;
    double crossing_ = inf;
};

} // namespace

double compute_U0(const InitialData& d, const Parameters& params) {
    return d.W0 - params.lambda() * (d.H0 + d.max_rho0 * d.u0_norm2);
}

double compute_c2(double sigma_est, double R) {
    if (!(sigma_est > 0.0) || !(R > 0.0)) throw std::invalid_argument("c2 needs sigma_est > 0 and R > 0");
    return sigma_est / R;
}

double compute_c3(double max_rho0, double R) {
    if (!(max_rho0 > 0.0) || !(R > 0.0)) throw std::invalid_argument("c3 needs max rho0 > 0 and R > 0");
    return 3.0 / (4.0 * std::numbers::pi * max_rho0 * std::pow(R, 5));
}

bool criterion_holds(double U0, double c2, double c3) {
    return c3 > 0.0 && U0 > 4.0 * c2 / c3;
}

CriterionVerdict check_criterion(const InitialData& data, const Parameters& params, double sigma_est) {
    CriterionVerdict v;
    v.U0 = compute_U0(data, params);
    v.c2 = compute_c2(sigma_est, data.R);
    v.c3 = compute_c3(data.max_rho0, data.R);
    v.threshold = 4.0 * v.c2 / v.c3;
    v.satisfied = criterion_holds(v.U0, v.c2, v.c3);
    v.lhs = data.W0;
    v.rhs = params.lambda() * (data.H0 + data.max_rho0 * data.u0_norm2) +
            16.0 * std::pow(data.R, 4) * sigma_est * std::numbers::pi * data.max_rho0 / 3.0;
    return v;
}

double blowup_bound_Tstar(double U0, double c2, double c3) {
    if (!criterion_holds(U0, c2, c3)) throw NoBound("criterion U0 > 4 c2 / c3 does not hold: no lifespan bound");
    const double q = 4.0 * c2 / (c3 * U0);
    if (c2 == 0.0) return 1.0 / (c3 * U0);
    return std::expm1(-0.25 * std::log1p(-q)) / c2;
}

double V_closed_form(double U0, double c2, double c3, double t) {
    const double inv = 1.0 / U0 - c3 * decay_integral(c2, t);
    return inv > 0.0 ? 1.0 / inv : inf;
}

VSeries integrate_V(double U0, double c2, double c3, const std::vector<double>& t_grid,
                    double divergence_threshold) {
    if (!(U0 >= 0.0)) throw std::invalid_argument("integrate_V requires U0 >= 0");
    if (c2 < 0.0 || c3 < 0.0) throw std::invalid_argument("integrate_V requires c2, c3 >= 0");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] >= 0.0) || (k && t_grid[k] < t_grid[k - 1])) {
            throw std::invalid_argument("integrate_V: t_grid must be nondecreasing and >= 0");
        }
    }
    VSeries out;
    if (U0 == 0.0 || c3 == 0.0) {
        out.t = t_grid;
        out.V.assign(t_grid.size(), U0);
        return out;
    }
    Marcher m(U0, c2, c3);
    for (double t : t_grid) {
        if (!m.advance_to(t, divergence_threshold)) {
            out.diverged = true;
            out.divergence_time = m.crossing();
            break;
        }
        out.t.push_back(t);
        out.V.push_back(m.V());
    }
    return out;
}

std::optional<double> numerical_divergence_time(double U0, double c2, double c3, double t_max,
                                                double threshold) {
    if (!(U0 > 0.0) || c3 == 0.0) return std::nullopt;
    Marcher m(U0, c2, c3);
    if (m.advance_to(t_max, threshold)) return std::nullopt;
    return m.crossing();
}

ComparisonVerdict compare_W_V(const std::vector<DiagnosticsRecord>& records, const VSeries& V, double tol_rel) {
    ComparisonVerdict v;
    double max_W = 0.0;
    for (const auto& r : records) max_W = std::max(max_W, std::abs(r.W));
    v.tolerance = tol_rel * max_W;
    v.min_margin = inf;
    for (const auto& r : records) {
        double Vt = -inf;
        if (!V.t.empty() && r.t <= V.t.back()) {
            const auto it = std::lower_bound(V.t.begin(), V.t.end(), r.t);
            const auto k = static_cast<std::size_t>(it - V.t.begin());
            if (V.t[k] == r.t) {
                Vt = V.V[k];
            } else {
                v.interpolated = true;
                const double w = (r.t - V.t[k - 1]) / (V.t[k] - V.t[k - 1]);
                Vt = (1.0 - w) * V.V[k - 1] + w * V.V[k];
            }
        }
        const double margin = std::isfinite(Vt) ? r.W - Vt : -inf;
        v.margin.push_back(margin);
        v.min_margin = std::min(v.min_margin, margin);
    }
    v.passed = records.empty() || v.min_margin >= -v.tolerance;
    return v;
}

BlowupReport make_blowup_report(const InitialData& data, const Parameters& params, double sigma_est,
                                const std::vector<double>& t_grid) {
    BlowupReport r{params};
    r.sigma_est = sigma_est;
    r.grid = data.grid;
    r.R = data.R;
    r.max_rho0 = data.max_rho0;
    r.W0 = data.W0;
    r.H0 = data.H0;
    r.u0_norm2 = data.u0_norm2;
    r.criterion = check_criterion(data, params, sigma_est);
    const auto& c = r.criterion;
    if (c.satisfied) r.T_star = blowup_bound_Tstar(c.U0, c.c2, c.c3);
    if (c.U0 >= 0.0) r.V_series = integrate_V(c.U0, c.c2, c.c3, t_grid);
    return r;
}

BlowupReport make_blowup_report(double U0, double c2, double c3, const Parameters& params, double sigma_est,
                                const std::vector<double>& t_grid) {
    BlowupReport r{params};
    r.sigma_est = sigma_est;
    r.criterion.U0 = U0;
    r.criterion.c2 = c2;
    r.criterion.c3 = c3;
    r.criterion.threshold = 4.0 * c2 / c3;
    r.criterion.satisfied = criterion_holds(U0, c2, c3);
    r.criterion.lhs = std::numeric_limits<double>::quiet_NaN();
    r.criterion.rhs = std::numeric_limits<double>::quiet_NaN();
    if (r.criterion.satisfied) r.T_star = blowup_bound_Tstar(U0, c2, c3);
    if (U0 >= 0.0) r.V_series = integrate_V(U0, c2, c3, t_grid);
    return r;
}

nlohmann::json to_json(const BlowupReport& r) {
    using nlohmann::json;
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); };
    const auto& c = r.criterion;
    json j;
    j["params"] = to_json(r.params);
    j["sigma_est"] = r.sigma_est;
    j["grid"] = json{{"n_cells", r.grid.n_cells}, {"dr", r.grid.dr}, {"r_max", r.grid.r_max()}};
    j["R"] = r.R;
    j["max_rho0"] = r.max_rho0;
    j["W0"] = r.W0;
    j["H0"] = r.H0;
    j["u0_norm2"] = r.u0_norm2;
    j["U0"] = c.U0;
    j["c2"] = c.c2;
    j["c3"] = c.c3;
    j["threshold_4c2_over_c3"] = num(c.threshold);
    j["criterion_lhs"] = num(c.lhs);
    j["criterion_rhs"] = num(c.rhs);
    j["criterion_satisfied"] = c.satisfied;
    j["T_star"] = r.T_star ? json(*r.T_star) : json(nullptr);
    j["V_series"] = json{{"t", r.V_series.t},
                         {"V", r.V_series.V},
                         {"diverged", r.V_series.diverged},
                         {"divergence_time", r.V_series.divergence_time ? json(*r.V_series.divergence_time)
                                                                        : json(nullptr)}};
    return j;
}

} // namespace ucm
