#include "ucm/config.hpp"

#include "ucm/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace ucm {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

constexpr std::array<std::string_view, 34> kKnownKeys{
    "params.a",
    "params.gamma",
    "params.lambda",
    "params.mu0",
    "profile.kind",
    "profile.L",
    "profile.R",
    "profile.mollifier_width",
    "profile.rho0_amplitude",
    "profile.delta_A",
    "sigma_est",
    "solver.n_cells",
    "solver.dr",
    "solver.r_max",
    "solver.cfl",
    "solver.t_end",
    "solver.output_interval",
    "solver.gradient_factor",
    "solver.positivity_floor",
    "solver.dt_floor_factor",
    "solver.pin_velocity",
    "solver.track_T_form",
    "verify.mass_rel",
    "verify.jensen_rel",
    "verify.trT_rel",
    "verify.energy_rel",
    "verify.W_ineq_rel",
    "verify.W_V_rel",
    "verify.support_abs",
    "bound.U0",
    "bound.c2",
    "bound.c3",
    "bound.samples",
    "output.dir",
};

double positive(const KeyValueConfig& kv, const std::string& key, double fallback) {
    const double v = kv.get_double(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key + " must be a positive number");
    return v;
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (cfg.has(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);
        cfg.values_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    return parse(read_text_file(path));
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto v = get_optional_double(key);
    return v ? *v : fallback;
}

std::optional<double> KeyValueConfig::get_optional_double(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    try {
        return parse_double(*v);
    } catch (const std::invalid_argument&) {
        throw ConfigError(key + ": not a number: '" + *v + "'");
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + *v + "'");
}

std::string KeyValueConfig::dump() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

double ExperimentConfig::sigma_est() const {
    return sigma_override ? *sigma_override : default_sigma_est(params);
}

RunConfig ExperimentConfig::run_config() const {
    RunConfig rc;
    rc.cfl = cfl;
    rc.t_end = t_end;
    rc.output_interval = output_interval;
    rc.thresholds = thresholds;
    rc.sigma_est = sigma_est();
    rc.pin_velocity = pin_velocity;
    rc.track_T_form = track_T_form;
    return rc;
}

RadialGrid ExperimentConfig::grid(const ProfileSpec& resolved) const {
    const double R = resolved.R;
    const double reach = r_max ? *r_max : R + sigma_est() * t_end + 1.0;
    if (n_cells && dr) return RadialGrid::make(*n_cells, *dr);
    if (n_cells) return RadialGrid::covering(reach, *n_cells);
    const double h = dr ? *dr : resolved.mollifier_width / 16.0;
    const auto n = static_cast<std::size_t>(std::ceil(reach / h - 1e-9));
    return RadialGrid::make(std::max<std::size_t>(n, 4), h);
}

ExperimentConfig resolve_config(const KeyValueConfig& kv) {
    for (const auto& [key, value] : kv.entries()) {
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
            throw ConfigError("unknown configuration key: " + key);
        }
    }
    ExperimentConfig c;
    try {
        c.params = Parameters::make(kv.get_double("params.a", 1.0), kv.get_double("params.gamma", 1.4),
                                    kv.get_double("params.lambda", 1.0), kv.get_double("params.mu0", 1.0));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }

    const std::string kind = kv.get("profile.kind").value_or("cosine");
    if (kind == "cosine") {
        c.profile_kind = ProfileKind::cosine;
    } else if (kind == "background") {
        c.profile_kind = ProfileKind::background;
    } else {
        throw ConfigError("profile.kind must be cosine or background");
    }
    auto length = [&](const std::string& key, double fallback, bool& is_auto) {
        const auto v = kv.get(key);
        if (v && *v == "auto") {
            is_auto = true;
            return fallback;
        }
        return kv.get_double(key, fallback);
    };
    c.profile.L = length("profile.L", c.profile.L, c.L_auto);
    c.profile.R = length("profile.R", c.profile.R, c.R_auto);
    c.profile.mollifier_width = kv.get_double("profile.mollifier_width", c.profile.mollifier_width);
    c.profile.rho0_amplitude = kv.get_double("profile.rho0_amplitude", c.profile.rho0_amplitude);
    c.profile.delta_A = kv.get_double("profile.delta_A", c.profile.delta_A);
    if (c.L_auto != c.R_auto) throw ConfigError("profile.L and profile.R must both be auto or both be numbers");

    if (kv.has("sigma_est")) c.sigma_override = positive(kv, "sigma_est", 1.0);

    if (const auto n = kv.get_optional_double("solver.n_cells")) {
        if (!(*n >= 4.0) || *n != std::floor(*n)) throw ConfigError("solver.n_cells must be an integer >= 4");
        c.n_cells = static_cast<std::size_t>(*n);
    }
    if (kv.has("solver.dr")) c.dr = positive(kv, "solver.dr", 1.0);
    if (kv.has("solver.r_max")) c.r_max = positive(kv, "solver.r_max", 1.0);
    if (c.n_cells && c.dr && c.r_max) throw ConfigError("give at most two of solver.n_cells, solver.dr, solver.r_max");
    c.cfl = kv.get_double("solver.cfl", c.cfl);
    if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("solver.cfl must lie in (0, 1]");
    c.t_end = kv.get_double("solver.t_end", c.t_end);
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw ConfigError("solver.t_end must be >= 0");
    c.output_interval = positive(kv, "solver.output_interval", c.output_interval);
    c.thresholds.gradient_factor = positive(kv, "solver.gradient_factor", c.thresholds.gradient_factor);
    c.thresholds.positivity_floor = kv.get_double("solver.positivity_floor", c.thresholds.positivity_floor);
    if (!(c.thresholds.positivity_floor >= 0.0)) throw ConfigError("solver.positivity_floor must be >= 0");
    c.thresholds.dt_floor_factor = positive(kv, "solver.dt_floor_factor", c.thresholds.dt_floor_factor);
    c.pin_velocity = kv.get_bool("solver.pin_velocity", false);
    c.track_T_form = kv.get_bool("solver.track_T_form", false);

    auto& v = c.verify;
    v.mass_rel = positive(kv, "verify.mass_rel", v.mass_rel);
    v.jensen_rel = positive(kv, "verify.jensen_rel", v.jensen_rel);
    v.trT_rel = positive(kv, "verify.trT_rel", v.trT_rel);
    v.energy_rel = positive(kv, "verify.energy_rel", v.energy_rel);
    v.W_ineq_rel = positive(kv, "verify.W_ineq_rel", v.W_ineq_rel);
    v.W_V_rel = positive(kv, "verify.W_V_rel", v.W_V_rel);
    v.support_abs = kv.get_double("verify.support_abs", v.support_abs);
    if (!(v.support_abs >= 0.0)) throw ConfigError("verify.support_abs must be >= 0");

    c.bound_U0 = kv.get_optional_double("bound.U0");
    c.bound_c2 = kv.get_optional_double("bound.c2");
    c.bound_c3 = kv.get_optional_double("bound.c3");
    const int injected = int(c.bound_U0.has_value()) + int(c.bound_c2.has_value()) + int(c.bound_c3.has_value());
    if (injected != 0 && injected != 3) throw ConfigError("bound.U0, bound.c2 and bound.c3 go together");
    if (const auto s = kv.get_optional_double("bound.samples")) {
        if (!(*s >= 2.0) || *s != std::floor(*s)) throw ConfigError("bound.samples must be an integer >= 2");
        c.bound_samples = static_cast<std::size_t>(*s);
    }

    return c;
}

ProfileSpec resolve_profile(const ExperimentConfig& config) {
    if (!config.L_auto) return config.profile;
    return choose_L_R(config.params, config.sigma_est(), config.profile);
}

} // namespace ucm
