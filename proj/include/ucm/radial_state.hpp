#pragma once

#include "ucm/grid.hpp"
#include "ucm/model.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace ucm {

struct InitialData;

/// Per-cell arrays of the radial unknowns. The evolved momentum is rho*u.
/// T_rr / T_t are the optional stress eigenvalues carried by the independent
/// T-form evolution (empty when not tracked).
struct RadialFields {
    std::vector<double> rho, mom, A_r, A_t, F_r, F_t;
    std::vector<double> T_rr, T_t;

    static constexpr std::array<std::vector<double> RadialFields::*, 8> members{
        &RadialFields::rho, &RadialFields::mom, &RadialFields::A_r, &RadialFields::A_t,
        &RadialFields::F_r, &RadialFields::F_t, &RadialFields::T_rr, &RadialFields::T_t};

    std::size_t size() const { return rho.size(); }
    bool tracks_T_form() const { return !T_rr.empty(); }

    /// Same shape as `shape`, all zeros.
    static RadialFields zeros_like(const RadialFields& shape);
};

struct RadialState : RadialFields {
    RadialGrid grid;
    double t = 0.0;

    double velocity(std::size_t i) const { return mom[i] / rho[i]; }
    RadialPointState point(std::size_t i) const {
        return {rho[i], mom[i] / rho[i], A_r[i], A_t[i], F_r[i], F_t[i]};
    }

    static RadialState background(const RadialGrid& grid, bool track_T_form = false);
    static RadialState from_initial(const InitialData& data, const Parameters& params,
                                    bool track_T_form = false);

    /// T_rr, T_t reconstructed from (rho, A, F).
    RadialStress reconstructed_stress(std::size_t i, const Parameters& params) const {
        return eval_stress(point(i), params);
    }
};

} // namespace ucm
