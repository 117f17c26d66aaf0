#pragma once

// Large-data initial states for the blow-up experiments.
//
// The radial velocity is the piecewise-cosine profile
//
//            { L cos(pi/2 (r-1))            0 <= r <= 1
//   v~(r) =  { L                            1 <  r <= R-1
//            { L/2 cos(pi (r-R+1)) + L/2    R-1 < r <= R
//            { 0                            r > R
//
// smoothed by a compact mollifier and cut off near the origin. Density and
// conformation carry compactly supported bumps; F0 = I.

#include "ucm/grid.hpp"
#include "ucm/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucm {

class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// choose_L_R could not satisfy a sizing condition within its caps.
class SearchFailure : public ConstructionError {
public:
    SearchFailure(std::string binding, const std::string& what)
        : ConstructionError(what), binding_(std::move(binding)) {}
    const std::string& binding_constraint() const { return binding_; }

private:
    std::string binding_;
};

struct ProfileSpec {
    double L = 1.0;
    double R = 5.0;
    double mollifier_width = 0.125;
    double rho0_amplitude = 0.1;
    double delta_A = 0.0;

    /// Throws ConstructionError on L <= 0, R < 5, width outside (0, 1/4],
    /// negative amplitudes.
    void validate() const;
};

/// Unsmoothed piecewise-cosine velocity.
double tilde_v(double r, double L, double R);

/// 4 pi int v~(r)^2 r^2 dr, the squared L2(R^3) norm of v~(|x|) x/|x|.
double tilde_v_norm2(double L, double R);

/// The smoothed velocity v(r) = eta(r) (phi_w * v~)(r + 2w).
///
/// The shift by 2w keeps supp v inside [0, R - w]; eta vanishes on [0, 1/4]
/// and equals 1 from r = 1/2. v = L exactly on (2, R-2).
class VelocityProfile {
public:
    explicit VelocityProfile(const ProfileSpec& spec);
    double operator()(double r) const;
    double support_end() const { return R_ - w_; }

private:
    double L_, R_, w_;
    double kernel_mass_;
};

/// rho0(r) = 1 + amplitude * bump(r), bump smooth, 1 at the origin, 0 from R - w.
double rho0_profile(double r, const ProfileSpec& spec);
/// Conformation perturbation: A0 = (1 + delta_A_profile(r)) I; equals delta_A on
/// [0, R-1] and vanishes from R - w.
double delta_A_profile(double r, const ProfileSpec& spec);

/// Samples the smoothed velocity on the grid. Requires mollifier_width >= 8 dr;
/// verifies v >= L on (2, R-2) and v = 0 for r >= R.
std::vector<double> mollify_profile(const ProfileSpec& spec, const RadialGrid& grid);

struct InitialData {
    RadialGrid grid;
    double R = 0.0; ///< support radius: background for r > R
    std::vector<double> rho0, u0, A0_r, A0_t, F0_r, F0_t;
    std::optional<ProfileSpec> profile;

    double m0 = 0.0;
    double H0 = 0.0;
    double W0 = 0.0;
    double u0_norm2 = 0.0; ///< ||u0||^2_{L2(R^3)}
    double min_rho0 = 1.0; ///< inf over R^3 (includes the background)
    double max_rho0 = 1.0; ///< sup over R^3 (includes the background)

    bool ass1_holds = false; ///< m0 >= 0
    bool ass2_holds = false; ///< tr(T0) >= 0 pointwise

    RadialPointState point(std::size_t i) const {
        return {rho0[i], u0[i], A0_r[i], A0_t[i], F0_r[i], F0_t[i]};
    }
};

/// Wraps grid fields into InitialData: checks shapes, positivity and the
/// background condition outside R, then fills the summary functionals and
/// admissibility flags. Does not reject inadmissible data.
InitialData assemble_initial_data(const RadialGrid& grid, double R, std::vector<double> rho0,
                                  std::vector<double> u0, std::vector<double> A0_r,
                                  std::vector<double> A0_t, std::vector<double> F0_r,
                                  std::vector<double> F0_t, const Parameters& params);

/// Throws ConstructionError naming (ass1) or (ass2) when violated.
void require_admissible(const InitialData& data);

InitialData build_initial_state(const ProfileSpec& spec, const Parameters& params,
                                const RadialGrid& grid);

/// Grid on [0, r_max] with at least `cells_per_width` cells per mollifier width.
RadialGrid grid_for_spec(const ProfileSpec& spec, double r_max, int cells_per_width = 8);

double compute_m0(const InitialData& data);
double compute_H0(const InitialData& data, const Parameters& params);
double compute_W0(const InitialData& data);
double compute_u0_norm2(const InitialData& data);

/// H0 of the profile data by adaptive quadrature of the closed-form profiles
/// (grid independent).
double profile_H0(const ProfileSpec& spec, const Parameters& params);

struct SearchLimits {
    double L_max = 1048576.0;
    double R_max = 67108864.0;
};

/// Sizes (L, R) so that
///   (pi min rho0 / 64) L      >= 16 sigma pi max rho0 / 3          (with 10% margin)
///   (pi min rho0 / 64) L R^4  >= lambda (H0 + max rho0 4 L^2 (4pi/3) R^3)
/// L is the smallest power of two meeting the first; R doubles from 8 until the
/// second holds. Other fields are taken from `base`.
ProfileSpec choose_L_R(const Parameters& params, double sigma_est, const ProfileSpec& base = {},
                       const SearchLimits& limits = {});

} // namespace ucm
