#include "ucm/initial_data.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ucm {

namespace {

constexpr double pi = std::numbers::pi;

double quad(auto&& f, double a, double b, double tol = 1e-14, unsigned depth = 12) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, depth, tol);
}

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double f0 = std::exp(-1.0 / x);
    const double f1 = std::exp(-1.0 / (1.0 - x));
    return f0 / (f0 + f1);
}

double mollifier(double s, double w) {
    const double x = s / w;
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

double origin_cutoff(double r) { return smooth_step((r - 0.25) / 0.25); }

} // namespace

void ProfileSpec::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConstructionError("invalid profile: " + what);
    };
    require(std::isfinite(L) && L > 0.0, "L must be > 0");
    require(std::isfinite(R) && R >= 5.0,
            "R must be >= 5 so that (R-2)^4 - 2^4 > R^4/32 (got R = " + std::to_string(R) + ")");
    require(std::isfinite(mollifier_width) && mollifier_width > 0.0 && mollifier_width <= 0.25,
            "mollifier_width must lie in (0, 1/4]");
    require(std::isfinite(rho0_amplitude) && rho0_amplitude >= 0.0, "rho0_amplitude must be >= 0");
    require(std::isfinite(delta_A) && delta_A >= 0.0, "delta_A must be >= 0");
}

double tilde_v(double r, double L, double R) {
    if (r <= 1.0) return L * std::cos(0.5 * pi * (r - 1.0));
    if (r <= R - 1.0) return L;
    if (r <= R) return 0.5 * L * std::cos(pi * (r - R + 1.0)) + 0.5 * L;
    return 0.0;
}

double tilde_v_norm2(double L, double R) {
    auto f = [&](double r) {
        const double v = tilde_v(r, L, R);
        return v * v * r * r;
    };
    const double plateau = L * L * ((R - 1.0) * (R - 1.0) * (R - 1.0) - 1.0) / 3.0;
    return 4.0 * pi * (quad(f, 0.0, 1.0) + plateau + quad(f, R - 1.0, R));
}

VelocityProfile::VelocityProfile(const ProfileSpec& spec)
    : L_(spec.L), R_(spec.R), w_(spec.mollifier_width) {
    spec.validate();
    kernel_mass_ = quad([&](double s) { return mollifier(s, w_); }, -w_, w_);
}

double VelocityProfile::operator()(double r) const {
    if (r >= R_ - w_) return 0.0;
    const double eta = origin_cutoff(r);
    if (eta == 0.0) return 0.0;
    const double shift = r + 2.0 * w_;
    // window of v~ arguments: [r + w, r + 3w]
    if (r + w_ > 1.0 && r + 3.0 * w_ <= R_ - 1.0) return eta * L_;

    std::array<double, 5> cuts{-w_, w_, 0.0, 0.0, 0.0};
    std::size_t n = 2;
    for (double kink : {1.0, R_ - 1.0, R_}) {
        const double s = shift - kink;
        if (s > -w_ && s < w_) cuts[n++] = s;
    }
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(n));
    auto integrand = [&](double s) { return mollifier(s, w_) * tilde_v(shift - s, L_, R_); };
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) acc += quad(integrand, cuts[k], cuts[k + 1]);
    return eta * acc / kernel_mass_;
}

double rho0_profile(double r, const ProfileSpec& spec) {
    return 1.0 + spec.rho0_amplitude * (1.0 - smooth_step(r / (spec.R - spec.mollifier_width)));
}

double delta_A_profile(double r, const ProfileSpec& spec) {
    const double w = spec.mollifier_width;
    return spec.delta_A * (1.0 - smooth_step((r - (spec.R - 1.0)) / (1.0 - w)));
}

std::vector<double> mollify_profile(const ProfileSpec& spec, const RadialGrid& grid) {
    spec.validate();
    if (spec.mollifier_width < 8.0 * grid.dr * (1.0 - 1e-12)) {
        throw ConstructionError("grid does not resolve the mollifier: need dr <= width/8 (dr = " +
                                std::to_string(grid.dr) +
                                ", width = " + std::to_string(spec.mollifier_width) + ")");
    }
    const VelocityProfile v(spec);
    std::vector<double> out(grid.n_cells);
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double r = grid.center(i);
        out[i] = v(r);
        if (r > 2.0 && r < spec.R - 2.0 && out[i] < spec.L) {
            throw ConstructionError("mollified velocity drops below L on (2, R-2); mollifier too wide");
        }
        if (r >= spec.R && out[i] != 0.0) {
            throw ConstructionError("mollified velocity not supported in [0, R]");
        }
    }
    return out;
}

InitialData assemble_initial_data(const RadialGrid& grid, double R, std::vector<double> rho0,
                                  std::vector<double> u0, std::vector<double> A0_r,
                                  std::vector<double> A0_t, std::vector<double> F0_r,
                                  std::vector<double> F0_t, const Parameters& params) {
    const std::size_t n = grid.n_cells;
    for (const auto* f : {&rho0, &u0, &A0_r, &A0_t, &F0_r, &F0_t}) {
        if (f->size() != n) throw ConstructionError("initial field size does not match the grid");
    }
    if (!(R > 0.0) || grid.r_max() < R) {
        throw ConstructionError("grid must cover the support radius R");
    }
    constexpr double bg_tol = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        const RadialPointState s{rho0[i], u0[i], A0_r[i], A0_t[i], F0_r[i], F0_t[i]};
        if (!std::isfinite(s.rho + s.u + s.A_r + s.A_t + s.F_r + s.F_t)) {
            throw ConstructionError("non-finite initial value at cell " + std::to_string(i));
        }
        if (!(s.rho > 0.0 && s.A_r > 0.0 && s.A_t > 0.0 && s.F_r > 0.0 && s.F_t > 0.0)) {
            throw ConstructionError("initial data must have rho, A, F > 0 (cell " + std::to_string(i) + ")");
        }
        if (grid.center(i) > R) {
            const double dev = std::max({std::abs(s.rho - 1.0), std::abs(s.u), std::abs(s.A_r - 1.0),
                                         std::abs(s.A_t - 1.0), std::abs(s.F_r - 1.0),
                                         std::abs(s.F_t - 1.0)});
            if (dev > bg_tol) {
                throw ConstructionError("initial data not compactly supported in B_R (cell " +
                                        std::to_string(i) + ")");
            }
        }
    }

    InitialData d;
    d.grid = grid;
    d.R = R;
    d.rho0 = std::move(rho0);
    d.u0 = std::move(u0);
    d.A0_r = std::move(A0_r);
    d.A0_t = std::move(A0_t);
    d.F0_r = std::move(F0_r);
    d.F0_t = std::move(F0_t);

    d.m0 = compute_m0(d);
    d.H0 = compute_H0(d, params);
    d.W0 = compute_W0(d);
    d.u0_norm2 = compute_u0_norm2(d);
    const auto [lo, hi] = std::minmax_element(d.rho0.begin(), d.rho0.end());
    d.min_rho0 = std::min(*lo, Parameters::rho_bar);
    d.max_rho0 = std::max(*hi, Parameters::rho_bar);

    d.ass1_holds = d.m0 >= 0.0;
    d.ass2_holds = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (eval_stress(d.point(i), params).trace() < 0.0) {
            d.ass2_holds = false;
            break;
        }
    }
    return d;
}

void require_admissible(const InitialData& data) {
    if (!data.ass1_holds) {
        throw ConstructionError("condition (ass1) violated: m0 = " + std::to_string(data.m0) + " < 0");
    }
    if (!data.ass2_holds) {
        throw ConstructionError("condition (ass2) violated: tr(T0) < 0 somewhere");
    }
}

InitialData build_initial_state(const ProfileSpec& spec, const Parameters& params,
                                const RadialGrid& grid) {
    spec.validate();
    const std::size_t n = grid.n_cells;
    std::vector<double> u0 = mollify_profile(spec, grid);
    std::vector<double> rho0(n), A0(n), ones(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.center(i);
        rho0[i] = rho0_profile(r, spec);
        A0[i] = 1.0 + delta_A_profile(r, spec);
    }
    InitialData d = assemble_initial_data(grid, spec.R, std::move(rho0), std::move(u0), A0, A0,
                                          ones, ones, params);
    d.profile = spec;
    require_admissible(d);
    return d;
}

RadialGrid grid_for_spec(const ProfileSpec& spec, double r_max, int cells_per_width) {
    const double target = spec.mollifier_width / cells_per_width;
    const auto n = static_cast<std::size_t>(std::ceil(r_max / target - 1e-9));
    return RadialGrid::covering(r_max, std::max<std::size_t>(n, 4));
}

double compute_m0(const InitialData& data) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.rho0.size(); ++i) sum += (data.rho0[i] - 1.0) * data.grid.weight(i);
    return sum;
}

double compute_H0(const InitialData& data, const Parameters& params) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.rho0.size(); ++i) {
        const double rho = data.rho0[i];
        const double h = 2.0 * pressure_potential(rho, params) + 2.0 * entropy_potential(rho, params) +
                         eval_stress(data.point(i), params).trace();
        sum += h * data.grid.weight(i);
    }
    return sum;
}

double compute_W0(const InitialData& data) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.rho0.size(); ++i) {
        sum += data.rho0[i] * data.u0[i] * data.grid.center(i) * data.grid.weight(i);
    }
    return sum;
}

double compute_u0_norm2(const InitialData& data) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.u0.size(); ++i) sum += data.u0[i] * data.u0[i] * data.grid.weight(i);
    return sum;
}

double profile_H0(const ProfileSpec& spec, const Parameters& params) {
    spec.validate();
    auto f = [&](double r) {
        const double rho = rho0_profile(r, spec);
        const double trT = rho * params.G() * 3.0 * delta_A_profile(r, spec);
        return (2.0 * pressure_potential(rho, params) + 2.0 * entropy_potential(rho, params) + trT) * r * r;
    };
    const double end = spec.R - spec.mollifier_width;
    double acc = 0.0;
    // fixed panels so the adaptive rule sees the plateau edge for any R
    const double panel = std::max(1.0, end / 4096.0);
    // the integrand cancels to round-off where rho0 -> 1, so a purely relative
    // tolerance is unreachable there; bound the refinement instead
    for (double a = 0.0; a < end; a += panel) acc += quad(f, a, std::min(a + panel, end), 1e-12, 6);
    return 4.0 * pi * acc;
}

ProfileSpec choose_L_R(const Parameters& params, double sigma_est, const ProfileSpec& base,
                       const SearchLimits& limits) {
    if (!(sigma_est > 0.0) || !std::isfinite(sigma_est)) {
        throw ConstructionError("choose_L_R: sigma_est must be > 0");
    }
    const double min_rho = 1.0;
    const double max_rho = 1.0 + base.rho0_amplitude;

    const double L_needed = 1.1 * (16.0 * sigma_est * pi * max_rho / 3.0) / (pi * min_rho / 64.0);
    const double L = std::exp2(std::ceil(std::log2(L_needed)));
    if (L > limits.L_max) {
        throw SearchFailure("L-size", "choose_L_R: L = " + std::to_string(L) + " exceeds cap " +
                                        std::to_string(limits.L_max) + " (binding constraint: L-size)");
    }

    ProfileSpec spec = base;
    spec.L = L;
    for (double R = 8.0; R <= limits.R_max; R *= 2.0) {
        spec.R = R;
        spec.validate();
        const double H0 = profile_H0(spec, params);
        const double lhs = pi * min_rho / 64.0 * L * R * R * R * R;
        const double rhs = params.lambda() * (H0 + max_rho * 4.0 * L * L * (4.0 * pi / 3.0) * R * R * R);
        if (lhs >= rhs) return spec;
    }
    throw SearchFailure("R-size", "choose_L_R: no R <= " + std::to_string(limits.R_max) +
                                    " satisfies the R-size condition with L = " + std::to_string(L) +
                                    " (binding constraint: R-size)");
}

} // namespace ucm
