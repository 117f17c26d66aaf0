#include "ucm/cart3d.hpp"

#include "ucm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ucm {

using Eigen::Matrix3d;
using Eigen::Vector3d;

Vector3d CartesianState::center(std::size_t idx) const {
    const std::size_t k = idx % n, j = (idx / n) % n, i = idx / (n * n);
    const double hh = h();
    auto c = [&](std::size_t q) { return -half_width + (static_cast<double>(q) + 0.5) * hh; };
    return {c(i), c(j), c(k)};
}

PointState CartesianState::point(std::size_t idx) const {
    return {rho[idx], mom[idx] / rho[idx], A[idx], F[idx]};
}

CartesianState CartesianState::background(std::size_t n, double half_width) {
    if (n < 2) throw std::invalid_argument("CartesianState: need n >= 2");
    if (!(half_width > 0.0)) throw std::invalid_argument("CartesianState: half_width must be > 0");
    CartesianState s;
    s.n = n;
    s.half_width = half_width;
    const std::size_t N = n * n * n;
    s.rho.assign(N, 1.0);
    s.mom.assign(N, Vector3d::Zero());
    s.A.assign(N, Matrix3d::Identity());
    s.F.assign(N, Matrix3d::Identity());
    return s;
}

namespace {

// Radial fields at an arbitrary radius: linear between cell centres, mirrored
// at the origin, background beyond r_max.
RadialPointState sample(const RadialState& s, double r) {
    const auto& g = s.grid;
    if (r >= g.r_max()) return {};
    const double x = r / g.dr - 0.5;
    if (x <= 0.0) {
        RadialPointState p = s.point(0);
        p.u *= r / g.center(0);
        return p;
    }
    const auto i = std::min(static_cast<std::size_t>(x), s.size() - 1);
    if (i + 1 >= s.size()) return s.point(s.size() - 1);
    const double w = x - static_cast<double>(i);
    const RadialPointState a = s.point(i), b = s.point(i + 1);
    auto lerp = [w](double p, double q) { return (1.0 - w) * p + w * q; };
    return {lerp(a.rho, b.rho), lerp(a.u, b.u), lerp(a.A_r, b.A_r),
            lerp(a.A_t, b.A_t), lerp(a.F_r, b.F_r), lerp(a.F_t, b.F_t)};
}

Matrix3d frame_tensor(double radial, double tangential, const Vector3d& e) {
    return tangential * Matrix3d::Identity() + (radial - tangential) * e * e.transpose();
}

struct Face {
    double rho = 0.0;
    Vector3d mom = Vector3d::Zero();
    Matrix3d DmA = Matrix3d::Zero(), DpA = Matrix3d::Zero();
    Matrix3d DmF = Matrix3d::Zero(), DpF = Matrix3d::Zero();
};

const PointState kBackground = PointState::background();

Face face_terms(const PointState& L, const PointState& R, int d, const Parameters& params) {
    const double s = std::max(char_speed_bound(L, params), char_speed_bound(R, params));
    const double p_bar = params.p_bar();
    auto momentum_flux = [&](const PointState& q) -> Vector3d {
        Vector3d flux = q.rho * q.u * q.u[d] - eval_stress(q, params).T.col(d);
        flux[d] += eval_p0(q.rho, params) - p_bar;
        return flux;
    };
    Face f;
    f.rho = 0.5 * (L.rho * L.u[d] + R.rho * R.u[d]) - 0.5 * s * (R.rho - L.rho);
    f.mom = 0.5 * (momentum_flux(L) + momentum_flux(R)) - 0.5 * s * (R.rho * R.u - L.rho * L.u);

    const double ubar = 0.5 * (L.u[d] + R.u[d]);
    const Vector3d du = R.u - L.u;
    const Matrix3d dA = R.A - L.A;
    const Matrix3d dF = R.F - L.F;
    const Matrix3d CA = ubar * dA;
    // (grad u F)_ij gets du_i/dx_d F_dj from this direction
    const Matrix3d CF = ubar * dF - du * (0.5 * (L.F.row(d) + R.F.row(d)));
    f.DmA = 0.5 * (CA - s * dA);
    f.DpA = 0.5 * (CA + s * dA);
    f.DmF = 0.5 * (CF - s * dF);
    f.DpF = 0.5 * (CF + s * dF);
    return f;
}

} // namespace

CartesianState embed(const RadialState& radial, std::size_t n, double half_width) {
    CartesianState c = CartesianState::background(n, half_width);
    c.t = radial.t;
    for (std::size_t idx = 0; idx < c.size(); ++idx) {
        const Vector3d x = c.center(idx);
        const double r = x.norm();
        const RadialPointState p = sample(radial, r);
        const Vector3d e = r > 0.0 ? Vector3d(x / r) : Vector3d::UnitX();
        c.rho[idx] = p.rho;
        c.mom[idx] = p.rho * p.u * e;
        c.A[idx] = frame_tensor(p.A_r, p.A_t, e);
        c.F[idx] = frame_tensor(p.F_r, p.F_t, e);
    }
    return c;
}

CartDerivative rhs_cart(const CartesianState& s, const Parameters& params) {
    const std::size_t N = s.size();
    for (std::size_t idx = 0; idx < N; ++idx) {
        if (!(s.rho[idx] > 0.0) || !std::isfinite(s.rho[idx] + s.mom[idx].sum() + s.A[idx].sum() + s.F[idx].sum())) {
            throw BreakdownError(BreakdownReason::positivity_loss, "invalid Cartesian cell " + std::to_string(idx));
        }
    }
    CartDerivative out;
    out.rho.assign(N, 0.0);
    out.mom.assign(N, Vector3d::Zero());
    out.A.assign(N, Matrix3d::Zero());
    out.F.assign(N, Matrix3d::Zero());

    const std::size_t n = s.n;
    const double h = s.h();
    const std::size_t stride[3] = {n * n, n, 1};
    const double inv_lambda = 1.0 / params.lambda();

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(N); ++ii) {
        const auto idx = static_cast<std::size_t>(ii);
        const std::size_t coord[3] = {idx / (n * n), (idx / n) % n, idx % n};
        const PointState c = s.point(idx);
        double drho = 0.0;
        Vector3d dm = Vector3d::Zero();
        Matrix3d dA = Matrix3d::Zero(), dF = Matrix3d::Zero();
        for (int d = 0; d < 3; ++d) {
            const PointState lo = coord[d] > 0 ? s.point(idx - stride[d]) : kBackground;
            const PointState hi = coord[d] + 1 < n ? s.point(idx + stride[d]) : kBackground;
            const Face fl = face_terms(lo, c, d, params);
            const Face fr = face_terms(c, hi, d, params);
            drho -= (fr.rho - fl.rho) / h;
            dm -= (fr.mom - fl.mom) / h;
            dA -= (fl.DpA + fr.DmA) / h;
            dF -= (fl.DpF + fr.DmF) / h;
        }
        const Matrix3d Finv = c.F.inverse();
        dA += (Finv * Finv.transpose() - c.A) * inv_lambda;
        out.rho[idx] = drho;
        out.mom[idx] = dm;
        out.A[idx] = dA;
        out.F[idx] = dF;
    }
    return out;
}

namespace {

void add_scaled(CartesianState& dst, const CartesianState& x, double a, const CartDerivative& k) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst.rho[i] = x.rho[i] + a * k.rho[i];
        dst.mom[i] = x.mom[i] + a * k.mom[i];
        dst.A[i] = x.A[i] + a * k.A[i];
        dst.F[i] = x.F[i] + a * k.F[i];
    }
}

bool healthy(const CartesianState& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s.rho[i] > 0.0) || !std::isfinite(s.mom[i].sum() + s.A[i].sum() + s.F[i].sum())) return false;
    }
    return true;
}

} // namespace

CartStepOutcome step_cart(const CartesianState& state, const Parameters& params, double cfl, double dt_max) {
    auto fail = [&](BreakdownReason why, double t, std::string detail) {
        return CartStepOutcome{Breakdown{why, t, state.t, std::move(detail)}};
    };
    double smax = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) smax = std::max(smax, char_speed_bound(state.point(i), params));
    if (!std::isfinite(smax)) return fail(BreakdownReason::cfl_collapse, state.t, "non-finite speed");
    const double dt = std::min(cfl * state.h() / smax, dt_max);
    try {
        CartesianState q1 = state;
        add_scaled(q1, state, dt, rhs_cart(state, params));
        if (!healthy(q1)) return fail(BreakdownReason::positivity_loss, state.t + dt, "first stage");
        const CartDerivative k2 = rhs_cart(q1, params);
        CartesianState next = state;
        for (std::size_t i = 0; i < next.size(); ++i) {
            next.rho[i] = 0.5 * state.rho[i] + 0.5 * (q1.rho[i] + dt * k2.rho[i]);
            next.mom[i] = 0.5 * state.mom[i] + 0.5 * (q1.mom[i] + dt * k2.mom[i]);
            next.A[i] = 0.5 * state.A[i] + 0.5 * (q1.A[i] + dt * k2.A[i]);
            next.F[i] = 0.5 * state.F[i] + 0.5 * (q1.F[i] + dt * k2.F[i]);
        }
        next.t = state.t + dt;
        if (!healthy(next)) return fail(BreakdownReason::positivity_loss, next.t, "second stage");
        return next;
    } catch (const BreakdownError& e) {
        return fail(e.reason(), state.t + dt, e.what());
    }
}

CompareResult discrepancy(const CartesianState& cart, const RadialState& radial) {
    CompareResult r;
    r.n = cart.n;
    r.t = cart.t;
    r.half_width = cart.half_width;
    double e_rho = 0.0, n_rho = 0.0, e_u = 0.0, n_u = 0.0;
    for (std::size_t idx = 0; idx < cart.size(); ++idx) {
        const Vector3d x = cart.center(idx);
        const RadialPointState p = sample(radial, x.norm());
        const double speed = (cart.mom[idx] / cart.rho[idx]).norm();
        e_rho += std::pow(cart.rho[idx] - p.rho, 2);
        n_rho += std::pow(p.rho - 1.0, 2);
        e_u += std::pow(speed - std::abs(p.u), 2);
        n_u += p.u * p.u;
    }
    r.rho_error = n_rho > 0.0 ? std::sqrt(e_rho / n_rho) : std::sqrt(e_rho);
    r.speed_error = n_u > 0.0 ? std::sqrt(e_u / n_u) : std::sqrt(e_u);
    r.discrepancy = std::max(r.rho_error, r.speed_error);
    return r;
}

CompareResult run_compare(const InitialData& data, const Parameters& params, std::size_t n, double t_short,
                          const CompareOptions& options) {
    if (n < 2 || n > 64) throw std::invalid_argument("run_compare: n must lie in [2, 64]");
    if (!(t_short >= 0.0)) throw std::invalid_argument("run_compare: t_short must be >= 0");
    const double sigma = options.sigma_est > 0.0 ? options.sigma_est : default_sigma_est(params);
    double X = options.half_width;
    if (!(X > 0.0)) {
        const double reach = data.R + sigma * t_short;
        X = reach * static_cast<double>(n) / (static_cast<double>(n) - 4.0);
    }

    RunConfig rc;
    rc.cfl = options.cfl;
    rc.t_end = t_short;
    rc.output_interval = t_short > 0.0 ? t_short : 1.0;
    rc.sigma_est = sigma;
    const RunResult radial = run(data, params, rc);

    CartesianState cart = embed(RadialState::from_initial(data, params), n, X);
    CompareResult result;
    if (radial.breakdown) {
        result.n = n;
        result.half_width = X;
        result.breakdown = radial.breakdown;
        result.discrepancy = std::numeric_limits<double>::quiet_NaN();
        return result;
    }
    while (cart.t < t_short) {
        CartStepOutcome out = step_cart(cart, params, options.cfl, t_short - cart.t);
        if (auto* b = std::get_if<Breakdown>(&out)) {
            result.n = n;
            result.half_width = X;
            result.breakdown = *b;
            result.discrepancy = std::numeric_limits<double>::quiet_NaN();
            return result;
        }
        const double target = t_short;
        cart = std::move(std::get<CartesianState>(out));
        if (cart.t >= target - 1e-12 * std::max(1.0, target)) cart.t = target;
    }
    return discrepancy(cart, radial.final_state);
}

} // namespace ucm
