#include "ucm/diagnostics.hpp"

#include "ucm/io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ucm {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

template <class F>
double integrate_cells(const RadialState& s, F&& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) sum += f(i) * s.grid.weight(i);
    return sum;
}

ResidualSeries summarize(std::vector<double> values) {
    ResidualSeries out;
    out.min = std::numeric_limits<double>::infinity();
    for (double v : values) {
        out.max_abs = std::max(out.max_abs, std::abs(v));
        out.min = std::min(out.min, v);
    }
    out.values = std::move(values);
    return out;
}

} // namespace

double quad_m(const RadialState& s) {
    return integrate_cells(s, [&](std::size_t i) { return s.rho[i] - 1.0; });
}

double quad_W(const RadialState& s) {
    return integrate_cells(s, [&](std::size_t i) { return s.mom[i] * s.grid.center(i); });
}

double quad_E(const RadialState& s, const Parameters& params) {
    return integrate_cells(s, [&](std::size_t i) { return energy_integrand(s.point(i), params); });
}

double quad_int_trT(const RadialState& s, const Parameters& params) {
    return integrate_cells(s, [&](std::size_t i) { return s.reconstructed_stress(i, params).trace(); });
}

double quad_kinetic(const RadialState& s) {
    return integrate_cells(s, [&](std::size_t i) { return s.mom[i] * s.mom[i] / s.rho[i]; });
}

double quad_rho_r2(const RadialState& s) {
    return integrate_cells(s, [&](std::size_t i) {
        const double r = s.grid.center(i);
        return s.rho[i] * r * r;
    });
}

double check_jensen(const RadialState& s, const Parameters& params, double R, double sigma_est) {
    const double ball = R + sigma_est * s.t;
    const double p_bar = params.p_bar();
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size() && s.grid.center(i) <= ball; ++i) {
        sum += (eval_p0(s.rho[i], params) - p_bar) * s.grid.weight(i);
    }
    return sum;
}

double support_radius(const RadialState& s, double tol) {
    for (std::size_t k = s.size(); k-- > 0;) {
        const double dev = std::max({std::abs(s.rho[k] - 1.0), std::abs(s.mom[k]),
                                     std::abs(s.A_r[k] - 1.0), std::abs(s.A_t[k] - 1.0),
                                     std::abs(s.F_r[k] - 1.0), std::abs(s.F_t[k] - 1.0)});
        const bool finite = std::isfinite(s.rho[k] + s.mom[k] + s.A_r[k] + s.A_t[k] + s.F_r[k] + s.F_t[k]);
        if (!finite || !(dev <= tol)) return s.grid.center(k);
    }
    return 0.0;
}

double sup_grad_u(const RadialState& s) {
    if (s.size() == 0) return 0.0;
    double g = std::abs(s.velocity(0)) / s.grid.center(0);
    double prev = s.velocity(0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double u = s.velocity(i);
        g = std::max(g, std::abs(u - prev) / s.grid.dr);
        prev = u;
    }
    return g;
}

DiagnosticsRecord record_snapshot(const RadialState& state, const DiagnosticsContext& ctx,
                                  const DiagnosticsRecord* previous) {
    DiagnosticsRecord r;
    r.t = state.t;
    r.m = quad_m(state);
    r.W = quad_W(state);
    r.E = quad_E(state, ctx.params);
    r.int_trT = quad_int_trT(state, ctx.params);
    r.cum_int_trT =
        previous ? previous->cum_int_trT + 0.5 * (r.t - previous->t) * (r.int_trT + previous->int_trT) : 0.0;
    r.support_radius = support_radius(state);
    r.sup_grad_u = sup_grad_u(state);
    r.jensen_margin = check_jensen(state, ctx.params, ctx.R, ctx.sigma_est);
    r.trT_slack = ctx.trT_budget() - r.cum_int_trT;
    r.energy_residual = nan;
    r.W_ineq_residual = nan;
    r.V_lower = nan;
    return r;
}

std::vector<double> time_derivative(const std::vector<DiagnosticsRecord>& rec,
                                    double DiagnosticsRecord::*field) {
    const std::size_t n = rec.size();
    if (n < 3) throw InsufficientData("time derivative needs at least 3 records");
    std::vector<double> d(n);
    auto f = [&](std::size_t k) { return rec[k].*field; };
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0) {
            const double h1 = rec[1].t - rec[0].t, h2 = rec[2].t - rec[1].t;
            d[k] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f(0) + (h1 + h2) / (h1 * h2) * f(1) -
                   h1 / (h2 * (h1 + h2)) * f(2);
        } else if (k == n - 1) {
            const double h1 = rec[k - 1].t - rec[k - 2].t, h2 = rec[k].t - rec[k - 1].t;
            d[k] = h2 / (h1 * (h1 + h2)) * f(k - 2) - (h1 + h2) / (h1 * h2) * f(k - 1) +
                   (2 * h2 + h1) / (h2 * (h1 + h2)) * f(k);
        } else {
            const double h1 = rec[k].t - rec[k - 1].t, h2 = rec[k + 1].t - rec[k].t;
            if (h1 == h2) {
                d[k] = (f(k + 1) - f(k - 1)) / (rec[k + 1].t - rec[k - 1].t);
            } else {
                d[k] = -h2 / (h1 * (h1 + h2)) * f(k - 1) + (h2 - h1) / (h1 * h2) * f(k) +
                       h1 / (h2 * (h1 + h2)) * f(k + 1);
            }
        }
    }
    return d;
}

ResidualSeries check_energy_identity(const std::vector<DiagnosticsRecord>& records,
                                     const Parameters& params) {
    std::vector<double> res = time_derivative(records, &DiagnosticsRecord::E);
    for (std::size_t k = 0; k < res.size(); ++k) res[k] += 0.5 * records[k].int_trT / params.lambda();
    return summarize(std::move(res));
}

ResidualSeries check_W_inequality(const std::vector<DiagnosticsRecord>& records,
                                  const DiagnosticsContext& ctx) {
    std::vector<double> res = time_derivative(records, &DiagnosticsRecord::W);
    for (std::size_t k = 0; k < res.size(); ++k) {
        const double rb = ctx.ball_radius(records[k].t);
        const double moment = 4.0 / 3.0 * std::numbers::pi * std::pow(rb, 5) * ctx.max_rho0;
        const double W = records[k].W;
        res[k] -= W * W / moment - records[k].int_trT;
    }
    return summarize(std::move(res));
}

SlackVerdict check_trT_bound(const std::vector<DiagnosticsRecord>& records,
                             const DiagnosticsContext& ctx, double tol_rel) {
    SlackVerdict v;
    const double budget = ctx.trT_budget();
    v.tolerance = tol_rel * std::abs(budget);
    v.min_slack = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        const double s = budget - r.cum_int_trT;
        v.slack.push_back(s);
        v.min_slack = std::min(v.min_slack, s);
    }
    v.passed = records.empty() || v.min_slack >= -v.tolerance;
    return v;
}

void finalize_series(std::vector<DiagnosticsRecord>& records, const DiagnosticsContext& ctx) {
    for (auto& r : records) r.trT_slack = ctx.trT_budget() - r.cum_int_trT;
    if (records.size() < 3) {
        for (auto& r : records) r.energy_residual = r.W_ineq_residual = nan;
        return;
    }
    const auto e = check_energy_identity(records, ctx.params);
    const auto w = check_W_inequality(records, ctx);
    for (std::size_t k = 0; k < records.size(); ++k) {
        records[k].energy_residual = e.values[k];
        records[k].W_ineq_residual = w.values[k];
    }
}

namespace {

constexpr std::array<double DiagnosticsRecord::*, 13> kCsvFields{
    &DiagnosticsRecord::t,           &DiagnosticsRecord::m,
    &DiagnosticsRecord::W,           &DiagnosticsRecord::E,
    &DiagnosticsRecord::int_trT,     &DiagnosticsRecord::cum_int_trT,
    &DiagnosticsRecord::support_radius, &DiagnosticsRecord::sup_grad_u,
    &DiagnosticsRecord::energy_residual, &DiagnosticsRecord::jensen_margin,
    &DiagnosticsRecord::trT_slack,   &DiagnosticsRecord::W_ineq_residual,
    &DiagnosticsRecord::V_lower};

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        out.push_back(cell);
    }
    return out;
}

} // namespace

void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
    for (std::size_t c = 0; c < kCsvColumns.size(); ++c) os << (c ? "," : "") << kCsvColumns[c];
    os << '\n';
    for (const auto& r : records) {
        for (std::size_t c = 0; c < kCsvFields.size(); ++c) {
            os << (c ? "," : "") << format_double(r.*kCsvFields[c]);
        }
        os << '\n';
    }
}

std::vector<DiagnosticsRecord> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("diagnostics CSV: empty input");
    const auto header = split_commas(line);
    std::vector<std::string> missing, unexpected;
    for (auto col : kCsvColumns) {
        if (std::find(header.begin(), header.end(), col) == header.end()) missing.emplace_back(col);
    }
    for (const auto& h : header) {
        if (std::find(kCsvColumns.begin(), kCsvColumns.end(), h) == kCsvColumns.end()) unexpected.push_back(h);
    }
    bool order_ok = header.size() == kCsvColumns.size();
    for (std::size_t c = 0; order_ok && c < header.size(); ++c) order_ok = header[c] == kCsvColumns[c];
    if (!missing.empty() || !unexpected.empty() || !order_ok) {
        std::string msg = "diagnostics CSV schema mismatch:";
        for (const auto& m : missing) msg += " -" + m;
        for (const auto& u : unexpected) msg += " +" + u;
        if (missing.empty() && unexpected.empty()) msg += " columns out of order";
        throw std::runtime_error(msg);
    }
    std::vector<DiagnosticsRecord> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_commas(line);
        if (cells.size() != kCsvColumns.size()) {
            throw std::runtime_error("diagnostics CSV: wrong cell count on line " + std::to_string(line_no));
        }
        DiagnosticsRecord r;
        for (std::size_t c = 0; c < cells.size(); ++c) r.*kCsvFields[c] = parse_double(cells[c]);
        out.push_back(r);
    }
    return out;
}

} // namespace ucm
