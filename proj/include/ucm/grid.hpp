#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>

namespace ucm {

/// Uniform cell-centred radial mesh on [0, r_max]: r_i = (i + 1/2) dr.
struct RadialGrid {
    std::size_t n_cells = 0;
    double dr = 0.0;

    static RadialGrid make(std::size_t n_cells, double dr) {
        if (n_cells < 4) throw std::invalid_argument("RadialGrid: need at least 4 cells");
        if (!(dr > 0.0) || !std::isfinite(dr)) throw std::invalid_argument("RadialGrid: dr must be > 0");
        return {n_cells, dr};
    }
    static RadialGrid covering(double r_max, std::size_t n_cells) {
        return make(n_cells, r_max / static_cast<double>(n_cells));
    }

    double r_max() const { return dr * static_cast<double>(n_cells); }
    double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dr; }
    double face(std::size_t i) const { return static_cast<double>(i) * dr; }

    /// (r_{i+1/2}^3 - r_{i-1/2}^3) / 3 = r_i^2 dr + dr^3 / 12: the shell volume per steradian.
    double volume(std::size_t i) const {
        const double r = center(i);
        return r * r * dr + dr * dr * dr / 12.0;
    }

    /// Quadrature weight of cell i for a radial integral over R^3: the exact
    /// volume 4 pi (r_{i+1/2}^3 - r_{i-1/2}^3) / 3 of the shell.
    double weight(std::size_t i) const { return 4.0 * std::numbers::pi * volume(i); }

    bool operator==(const RadialGrid&) const = default;
};

/// sum f_i * weight(i): second order for smooth f, exact for cellwise constant
/// f, and the measure in which the solver conserves mass.
inline double integrate_3d(const RadialGrid& grid, std::span<const double> f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * grid.weight(i);
    return sum;
}

} // namespace ucm
