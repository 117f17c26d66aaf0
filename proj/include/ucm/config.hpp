#pragma once

// Flat key=value configuration with dotted section prefixes:
//
//   # comment
//   params.gamma = 1.4
//   profile.R = auto
//   solver.n_cells = 4096
//
// Unknown keys are rejected so that typos do not silently fall back to defaults.

#include "ucm/initial_data.hpp"
#include "ucm/model.hpp"
#include "ucm/radial_solver.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace ucm {

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::optional<double> get_optional_double(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    const std::map<std::string, std::string>& entries() const { return values_; }
    /// Canonical text: sorted keys, one "key = value" per line.
    std::string dump() const;

private:
    std::map<std::string, std::string> values_;
};

struct VerifyTolerances {
    double mass_rel = 1e-10;     ///< |m - m0| <= mass_rel (|m0| + |B_R|)
    double jensen_rel = 1e-8;    ///< margin >= -jensen_rel (1 + max|margin|)
    double trT_rel = 1e-6;       ///< slack >= -trT_rel * budget
    double energy_rel = 5e-2;    ///< |residual| <= energy_rel * (max|dE/dt| + max int tr(T) / 2 lambda)
    double W_ineq_rel = 1e-4;    ///< residual >= -W_ineq_rel * max|W'|
    double W_V_rel = 1e-3;       ///< W - V >= -W_V_rel * max|W|
    double support_abs = 0.0;    ///< support_radius <= R + sigma t + support_abs
};

enum class ProfileKind { cosine, background };

struct ExperimentConfig {
    Parameters params = Parameters::make(1.0, 1.4, 1.0, 1.0);
    ProfileKind profile_kind = ProfileKind::cosine;
    ProfileSpec profile;
    bool L_auto = false;
    bool R_auto = false;
    std::optional<double> sigma_override;

    std::optional<std::size_t> n_cells;
    std::optional<double> dr;
    std::optional<double> r_max;
    double cfl = 0.5;
    double t_end = 1.0;
    double output_interval = 0.01;
    Thresholds thresholds;
    bool pin_velocity = false;
    bool track_T_form = false;

    VerifyTolerances verify;

    std::optional<double> bound_U0, bound_c2, bound_c3;
    std::size_t bound_samples = 200;

    /// sigma_est if given, otherwise the characteristic-speed bound at the background.
    double sigma_est() const;
    RunConfig run_config() const;
    /// Grid for constructing data with a resolved profile: uses n_cells, dr
    /// and r_max when given; r_max defaults to R + sigma_est t_end + 1 and dr
    /// to mollifier_width / 16.
    RadialGrid grid(const ProfileSpec& resolved) const;
};

/// Validates every key and value; throws ConfigError naming the offending key.
ExperimentConfig resolve_config(const KeyValueConfig& kv);

/// Resolves "auto" L/R through choose_L_R and returns the concrete profile.
ProfileSpec resolve_profile(const ExperimentConfig& config);

} // namespace ucm
