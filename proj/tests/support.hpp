#pragma once

#include "ucm/initial_data.hpp"
#include "ucm/model.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace ucm::testing {

enum class PulseShape { cos6, poly };

/// Smooth compactly supported perturbation of the background, isotropic at the
/// origin so the solution stays smooth there:
///
///   rho = 1 + eps b,  u = eps (r/Rp) b,  A_r = 1 + 0.1 b,
///   A_t = 1 + 0.1 b - 0.03 (r/Rp)^2 b,  F = I
///
/// with b = cos^6(pi r / 2Rp) or (1 - (r/Rp)^2)^3 on [0, Rp].
inline double pulse_bump(double r, double Rp, PulseShape shape) {
    if (r >= Rp) return 0.0;
    const double x = r / Rp;
    if (shape == PulseShape::poly) return std::pow(1.0 - x * x, 3);
    return std::pow(std::cos(std::numbers::pi * x / 2.0), 6);
}

inline InitialData make_pulse(const RadialGrid& grid, const Parameters& params, double Rp = 2.0,
                              double eps = 0.2, PulseShape shape = PulseShape::cos6) {
    const std::size_t n = grid.n_cells;
    std::vector<double> rho(n), u(n), Ar(n), At(n), F(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.center(i);
        const double b = pulse_bump(r, Rp, shape);
        const double x = r / Rp;
        rho[i] = 1.0 + eps * b;
        u[i] = eps * x * b;
        Ar[i] = 1.0 + 0.1 * b;
        At[i] = 1.0 + 0.1 * b - 0.03 * x * x * b;
    }
    return assemble_initial_data(grid, Rp, rho, u, Ar, At, F, F, params);
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("ucm-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline double relative_change(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace ucm::testing
