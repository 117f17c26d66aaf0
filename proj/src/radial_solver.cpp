#include "ucm/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ucm {

// ---------------------------------------------------------------------------
// RadialFields / RadialState

RadialFields RadialFields::zeros_like(const RadialFields& shape) {
    RadialFields z;
    for (auto mem : members) (z.*mem).assign((shape.*mem).size(), 0.0);
    return z;
}

RadialState RadialState::background(const RadialGrid& grid, bool track_T_form) {
    RadialState s;
    s.grid = grid;
    const std::size_t n = grid.n_cells;
    s.rho.assign(n, 1.0);
    s.mom.assign(n, 0.0);
    s.A_r.assign(n, 1.0);
    s.A_t.assign(n, 1.0);
    s.F_r.assign(n, 1.0);
    s.F_t.assign(n, 1.0);
    if (track_T_form) {
        s.T_rr.assign(n, 0.0);
        s.T_t.assign(n, 0.0);
    }
    return s;
}

RadialState RadialState::from_initial(const InitialData& data, const Parameters& params,
                                      bool track_T_form) {
    RadialState s;
    s.grid = data.grid;
    s.rho = data.rho0;
    s.mom.resize(data.rho0.size());
    for (std::size_t i = 0; i < s.mom.size(); ++i) s.mom[i] = data.rho0[i] * data.u0[i];
    s.A_r = data.A0_r;
    s.A_t = data.A0_t;
    s.F_r = data.F0_r;
    s.F_t = data.F0_t;
    if (track_T_form) {
        s.T_rr.resize(s.size());
        s.T_t.resize(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const RadialStress T = s.reconstructed_stress(i, params);
            s.T_rr[i] = T.rr;
            s.T_t[i] = T.t;
        }
    }
    return s;
}

std::string to_string(BreakdownReason reason) {
    switch (reason) {
    case BreakdownReason::positivity_loss: return "positivity_loss";
    case BreakdownReason::cfl_collapse: return "cfl_collapse";
    case BreakdownReason::gradient_threshold: return "gradient_threshold";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Spatial operator

namespace {

enum Var : int { RHO = 0, U, AR, AT, FR, FT, TRR, TT };

double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

void require_valid_input(const RadialState& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool finite = std::isfinite(s.rho[i] + s.mom[i] + s.A_r[i] + s.A_t[i] + s.F_r[i] + s.F_t[i]);
        if (!finite || !(s.rho[i] > 0.0 && s.A_r[i] > 0.0 && s.A_t[i] > 0.0 && s.F_r[i] > 0.0 &&
                         s.F_t[i] > 0.0)) {
            throw BreakdownError(BreakdownReason::positivity_loss,
                                 "invalid state at cell " + std::to_string(i) +
                                     " (r = " + std::to_string(s.grid.center(i)) + ")");
        }
    }
}

struct FaceState {
    double rho, u, Ar, At, Fr, Ft;
};

double face_speed(const FaceState& q, const Parameters& params) {
    return char_speed_bound(RadialPointState{q.rho, q.u, q.Ar, q.At, q.Fr, q.Ft}, params);
}

// Evaluates the derivative of (rho, mom, A, F) into `out` (unless T_only) and
// of the stress pair (T_rr, T_t) when `T_rr`/`T_t` are non-empty.
void spatial_operator(const RadialState& s, const Parameters& params, const std::vector<double>& T_rr,
                      const std::vector<double>& T_t, RadialFields& out, bool T_only) {
    const std::size_t n = s.size();
    const bool with_T = !T_rr.empty();
    const int nv = with_T ? 8 : 6;
    const std::size_t ng = n + 4;
    const double dr = s.grid.dr;
    const double G = params.G();
    const double lambda = params.lambda();
    const double p_bar = params.p_bar();

    // primitive variables with two ghost cells per side: g = i + 2
    std::vector<double> P(static_cast<std::size_t>(nv) * ng);
    std::vector<double> S(static_cast<std::size_t>(nv) * ng, 0.0);
    auto at = [ng](std::vector<double>& v, int k, std::size_t g) -> double& { return v[k * ng + g]; };

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const std::size_t g = i + 2;
        at(P, RHO, g) = s.rho[i];
        at(P, U, g) = s.mom[i] / s.rho[i];
        at(P, AR, g) = s.A_r[i];
        at(P, AT, g) = s.A_t[i];
        at(P, FR, g) = s.F_r[i];
        at(P, FT, g) = s.F_t[i];
        if (with_T) {
            at(P, TRR, g) = T_rr[i];
            at(P, TT, g) = T_t[i];
        }
    }
    // origin: mirror (u odd, everything else even); outer edge: background
    for (int k = 0; k < nv; ++k) {
        const double sign = (k == U) ? -1.0 : 1.0;
        at(P, k, 1) = sign * at(P, k, 2);
        at(P, k, 0) = sign * at(P, k, 3);
        const double bg = (k == RHO || k == AR || k == AT || k == FR || k == FT) ? 1.0 : 0.0;
        at(P, k, n + 2) = bg;
        at(P, k, n + 3) = bg;
    }
    for (int k = 0; k < nv; ++k) {
        for (std::size_t g = 1; g + 1 < ng; ++g) {
            at(S, k, g) = minmod(at(P, k, g) - at(P, k, g - 1), at(P, k, g + 1) - at(P, k, g));
        }
    }

    // Local Lax-Friedrichs speeds from the cell states (ghosts included).
    std::vector<double> cell_speed(ng);
    for (std::size_t g = 0; g < ng; ++g) {
        cell_speed[g] = face_speed(FaceState{P[RHO * ng + g], P[U * ng + g], P[AR * ng + g], P[AT * ng + g],
                                             P[FR * ng + g], P[FT * ng + g]},
                                   params);
    }

    // Face f (0..n) sits between cells f-1 and f.
    const std::size_t nf = n + 1;
    std::vector<double> flux_rho(nf), flux_mom(nf);
    std::vector<double> Dm(static_cast<std::size_t>(nv) * nf, 0.0), Dp(static_cast<std::size_t>(nv) * nf, 0.0);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ff = 0; ff < static_cast<std::ptrdiff_t>(nf); ++ff) {
        const auto f = static_cast<std::size_t>(ff);
        const std::size_t gl = f + 1, gr = f + 2;
        double qL[8], qR[8];
        for (int k = 0; k < nv; ++k) {
            qL[k] = P[k * ng + gl] + 0.5 * S[k * ng + gl];
            qR[k] = P[k * ng + gr] - 0.5 * S[k * ng + gr];
        }
        const FaceState L{qL[RHO], qL[U], qL[AR], qL[AT], qL[FR], qL[FT]};
        const FaceState R{qR[RHO], qR[U], qR[AR], qR[AT], qR[FR], qR[FT]};
        const double speed = std::max(cell_speed[gl], cell_speed[gr]);

        if (!T_only) {
            const double mL = L.rho * L.u, mR = R.rho * R.u;
            const double TrrL = L.rho * G * (L.Fr * L.Fr * L.Ar - 1.0);
            const double TrrR = R.rho * G * (R.Fr * R.Fr * R.Ar - 1.0);
            const double PiL = mL * L.u + (eval_p0(L.rho, params) - p_bar) - TrrL;
            const double PiR = mR * R.u + (eval_p0(R.rho, params) - p_bar) - TrrR;
            flux_rho[f] = 0.5 * (mL + mR) - 0.5 * speed * (R.rho - L.rho);
            flux_mom[f] = 0.5 * (PiL + PiR) - 0.5 * speed * (mR - mL);
        }

        const double ubar = 0.5 * (L.u + R.u);
        const double du = R.u - L.u;
        for (int k = T_only ? TRR : AR; k < nv; ++k) {
            const double dX = qR[k] - qL[k];
            double central = ubar * dX;
            if (k == FR) central -= 0.5 * (qL[FR] + qR[FR]) * du;
            if (k == TRR) central -= (0.5 * (qL[TRR] + qR[TRR]) + G * (L.rho + R.rho)) * du;
            if (k == TT) central += 0.5 * (qL[TT] + qR[TT]) * du;
            Dm[k * nf + f] = 0.5 * (central - speed * dX);
            Dp[k * nf + f] = 0.5 * (central + speed * dX);
        }
    }

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const std::size_t g = i + 2;
        const double r = s.grid.center(i);
        const double rl = s.grid.face(i), rr = s.grid.face(i + 1);
        const double measure = s.grid.volume(i);
        const double u = P[U * ng + g];
        const double su = S[U * ng + g];
        const double rho = s.rho[i];

        if (!T_only) {
            const RadialStress T = eval_stress(s.point(i), params);
            out.rho[i] = -(rr * rr * flux_rho[i + 1] - rl * rl * flux_rho[i]) / measure;
            // (r+^2 - r-^2) / volume approximates 2/r and balances a uniform pressure exactly
            out.mom[i] = -(rr * rr * flux_mom[i + 1] - rl * rl * flux_mom[i]) / measure +
                         (rr * rr - rl * rl) / measure * (eval_p0(rho, params) - p_bar - T.t);
        }
        for (int k = T_only ? TRR : AR; k < nv; ++k) {
            const double X = P[k * ng + g];
            double incell = u * S[k * ng + g];
            if (k == FR) incell -= X * su;
            if (k == TRR) incell -= (X + 2.0 * G * rho) * su;
            if (k == TT) incell += X * su;
            double d = -(Dp[k * nf + i] + Dm[k * nf + i + 1] + incell) / dr;
            switch (k) {
            case AR: d += (1.0 / (s.F_r[i] * s.F_r[i]) - X) / lambda; break;
            case AT: d += (1.0 / (s.F_t[i] * s.F_t[i]) - X) / lambda; break;
            case FT: d += X * u / r; break;
            case TRR: d += -2.0 * u / r * X - X / lambda; break;
            case TT: d += 2.0 * G * rho * u / r - X / lambda; break;
            default: break;
            }
            switch (k) {
            case AR: out.A_r[i] = d; break;
            case AT: out.A_t[i] = d; break;
            case FR: out.F_r[i] = d; break;
            case FT: out.F_t[i] = d; break;
            case TRR: out.T_rr[i] = d; break;
            case TT: out.T_t[i] = d; break;
            default: break;
            }
        }
    }
}

void relaxation_only(const RadialState& s, const Parameters& params, const std::vector<double>& T_rr,
                     const std::vector<double>& T_t, RadialFields& out, bool T_only) {
    const double lambda = params.lambda();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!T_only) {
            out.A_r[i] = (1.0 / (s.F_r[i] * s.F_r[i]) - s.A_r[i]) / lambda;
            out.A_t[i] = (1.0 / (s.F_t[i] * s.F_t[i]) - s.A_t[i]) / lambda;
        }
        if (!T_rr.empty()) {
            out.T_rr[i] = -T_rr[i] / lambda;
            out.T_t[i] = -T_t[i] / lambda;
        }
    }
}

} // namespace

RadialFields rhs_radial(const RadialState& state, const Parameters& params, bool pin_velocity) {
    require_valid_input(state);
    RadialFields out = RadialFields::zeros_like(state);
    if (pin_velocity) {
        relaxation_only(state, params, state.T_rr, state.T_t, out, false);
    } else {
        spatial_operator(state, params, state.T_rr, state.T_t, out, false);
    }
    return out;
}

RadialFields evolve_T_form(const RadialState& state, const Parameters& params) {
    require_valid_input(state);
    std::vector<double> T_rr = state.T_rr, T_t = state.T_t;
    if (!state.tracks_T_form()) {
        T_rr.resize(state.size());
        T_t.resize(state.size());
        for (std::size_t i = 0; i < state.size(); ++i) {
            const RadialStress T = state.reconstructed_stress(i, params);
            T_rr[i] = T.rr;
            T_t[i] = T.t;
        }
    }
    RadialFields out;
    out.T_rr.assign(state.size(), 0.0);
    out.T_t.assign(state.size(), 0.0);
    spatial_operator(state, params, T_rr, T_t, out, true);
    return out;
}

double cfl_dt(const RadialState& state, const Parameters& params, double cfl) {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl_number must lie in (0, 1]");
    double smax = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double s = char_speed_bound(state.point(i), params);
        if (!std::isfinite(s)) {
            throw BreakdownError(BreakdownReason::cfl_collapse,
                                 "non-finite characteristic speed at cell " + std::to_string(i));
        }
        smax = std::max(smax, s);
    }
    return cfl * state.grid.dr / smax;
}

// ---------------------------------------------------------------------------
// Time stepping

namespace {

void axpy_into(RadialFields& dst, const RadialFields& x, double a, const RadialFields& k) {
    for (auto mem : RadialFields::members) {
        auto& d = dst.*mem;
        const auto& xs = x.*mem;
        const auto& ks = k.*mem;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = xs[i] + a * ks[i];
    }
}

std::optional<std::string> positivity_violation(const RadialState& s, double floor) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double vals[] = {s.rho[i], s.A_r[i], s.A_t[i], s.F_r[i], s.F_t[i]};
        for (double v : vals) {
            if (!(v > floor) || !std::isfinite(v)) {
                return "positivity floor crossed at cell " + std::to_string(i) +
                       " (r = " + std::to_string(s.grid.center(i)) + ")";
            }
        }
        if (!std::isfinite(s.mom[i])) return "non-finite momentum at cell " + std::to_string(i);
        if (!s.T_rr.empty() && !std::isfinite(s.T_rr[i] + s.T_t[i])) {
            return "non-finite stress at cell " + std::to_string(i);
        }
    }
    return std::nullopt;
}

} // namespace

StepOutcome step(const RadialState& state, const Parameters& params, const SchemeConfig& config,
                 double dt_max) {
    auto fail = [&](BreakdownReason why, double t, std::string detail) {
        return StepOutcome{Breakdown{why, t, state.t, std::move(detail)}};
    };
    double dt = 0.0;
    try {
        require_valid_input(state);
        const double dt_cfl = cfl_dt(state, params, config.cfl);
        if (dt_cfl < config.thresholds.dt_floor_factor * state.grid.dr) {
            return fail(BreakdownReason::cfl_collapse, state.t, "CFL time step below floor");
        }
        dt = std::min(dt_cfl, dt_max);
        if (!(dt > 0.0)) throw ConfigError("step: non-positive dt_max");

        RadialState stage = state;
        axpy_into(stage, state, dt, rhs_radial(state, params, config.pin_velocity));
        if (auto bad = positivity_violation(stage, config.thresholds.positivity_floor)) {
            return fail(BreakdownReason::positivity_loss, state.t + dt, *bad);
        }
        const RadialFields k2 = rhs_radial(stage, params, config.pin_velocity);
        RadialState next = state;
        for (auto mem : RadialFields::members) {
            auto& out = next.*mem;
            const auto& q0 = state.*mem;
            const auto& q1 = stage.*mem;
            const auto& k = k2.*mem;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * q0[i] + 0.5 * (q1[i] + dt * k[i]);
        }
        next.t = state.t + dt;
        if (auto bad = positivity_violation(next, config.thresholds.positivity_floor)) {
            return fail(BreakdownReason::positivity_loss, next.t, *bad);
        }
        if (config.gradient_reference > 0.0) {
            const double g = sup_grad_u(next);
            if (g > config.thresholds.gradient_factor * config.gradient_reference) {
                return fail(BreakdownReason::gradient_threshold, next.t,
                            "sup|du/dr| = " + std::to_string(g) + " exceeds " +
                                std::to_string(config.thresholds.gradient_factor) + " x reference " +
                                std::to_string(config.gradient_reference));
            }
        }
        return next;
    } catch (const BreakdownError& e) {
        return fail(e.reason(), state.t + dt, e.what());
    }
}

// ---------------------------------------------------------------------------
// Driver

DiagnosticsContext make_context(const InitialData& data, const Parameters& params, double sigma_est) {
    return DiagnosticsContext{params, data.R, sigma_est, data.H0, data.max_rho0, data.u0_norm2};
}

RunResult run(const InitialData& data, const Parameters& params, const RunConfig& config) {
    return run_from(RadialState::from_initial(data, params, config.track_T_form),
                    make_context(data, params, config.sigma_est), config);
}

RunResult run_from(RadialState state, const DiagnosticsContext& ctx, const RunConfig& config) {
    if (!(config.cfl > 0.0 && config.cfl <= 1.0)) throw ConfigError("solver.cfl must lie in (0, 1]");
    if (!(config.t_end >= 0.0) || !std::isfinite(config.t_end)) throw ConfigError("solver.t_end must be >= 0");
    if (!(config.output_interval > 0.0)) throw ConfigError("solver.output_interval must be > 0");
    if (!(config.sigma_est > 0.0)) throw ConfigError("sigma_est must be > 0");
    const double needed = ctx.R + config.sigma_est * config.t_end;
    if (state.grid.r_max() < needed) {
        throw ConfigError("domain too small: r_max = " + std::to_string(state.grid.r_max()) +
                          " < R + sigma_est t_end = " + std::to_string(needed));
    }

    RunResult result;
    result.initial_sup_grad_u = sup_grad_u(state);
    SchemeConfig scheme;
    scheme.cfl = config.cfl;
    scheme.thresholds = config.thresholds;
    scheme.pin_velocity = config.pin_velocity;
    scheme.gradient_reference = std::max(result.initial_sup_grad_u, 1.0 / ctx.params.lambda());

    result.records.push_back(record_snapshot(state, ctx, nullptr));
    std::size_t output_index = 1;
    auto next_output = [&] {
        return std::min(static_cast<double>(output_index) * config.output_interval, config.t_end);
    };

    while (state.t < config.t_end) {
        if (result.steps >= config.max_steps) throw ConfigError("solver.max_steps exhausted");
        const double target = next_output();
        StepOutcome out = step(state, ctx.params, scheme, target - state.t);
        ++result.steps;
        if (auto* b = std::get_if<Breakdown>(&out)) {
            result.breakdown = *b;
            break;
        }
        state = std::move(std::get<RadialState>(out));
        if (state.t >= target - 1e-12 * std::max(1.0, target)) {
            state.t = target;
            result.records.push_back(record_snapshot(state, ctx, &result.records.back()));
            ++output_index;
        }
    }
    finalize_series(result.records, ctx);
    result.final_state = std::move(state);
    return result;
}

} // namespace ucm
