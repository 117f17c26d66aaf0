#include "ucm/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

namespace ucm {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
    if (text == "nan" || text == "NaN" || text == "-nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double x = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return x;
}

// ---------------------------------------------------------------------------

json to_json(const Parameters& p) {
    return json{{"a", p.a()}, {"gamma", p.gamma()}, {"lambda", p.lambda()}, {"mu0", p.mu0()}, {"G", p.G()},
                {"rho_bar", Parameters::rho_bar}};
}

Parameters parameters_from_json(const json& j) {
    return Parameters::make(j.at("a").get<double>(), j.at("gamma").get<double>(),
                            j.at("lambda").get<double>(), j.at("mu0").get<double>());
}

json to_json(const ProfileSpec& s) {
    return json{{"L", s.L},
                {"R", s.R},
                {"mollifier_width", s.mollifier_width},
                {"rho0_amplitude", s.rho0_amplitude},
                {"delta_A", s.delta_A}};
}

ProfileSpec profile_from_json(const json& j) {
    ProfileSpec s;
    s.L = j.at("L").get<double>();
    s.R = j.at("R").get<double>();
    s.mollifier_width = j.at("mollifier_width").get<double>();
    s.rho0_amplitude = j.at("rho0_amplitude").get<double>();
    s.delta_A = j.at("delta_A").get<double>();
    return s;
}

namespace {

json grid_json(const RadialGrid& g) {
    return json{{"n_cells", g.n_cells}, {"dr", g.dr}, {"r_max", g.r_max()}};
}

RadialGrid grid_from_json(const json& j) {
    return RadialGrid::make(j.at("n_cells").get<std::size_t>(), j.at("dr").get<double>());
}

json header(std::string_view kind, double t, const Parameters& params, const RadialGrid& grid, double R) {
    return json{{"format", kFieldFileFormat},
                {"format_version", kFieldFileVersion},
                {"kind", kind},
                {"time", t},
                {"params", to_json(params)},
                {"grid", grid_json(grid)},
                {"support_radius_R", R}};
}

void check_header(const json& j, std::string_view kind) {
    if (!j.is_object() || j.value("format", std::string{}) != kFieldFileFormat) {
        throw IoError("not a " + std::string(kFieldFileFormat) + " file");
    }
    if (j.at("format_version").get<int>() != kFieldFileVersion) {
        throw IoError("unsupported format_version " + j.at("format_version").dump());
    }
    if (j.at("kind").get<std::string>() != kind) {
        throw IoError("expected kind '" + std::string(kind) + "', found '" + j.at("kind").get<std::string>() + "'");
    }
}

std::vector<double> field(const json& j, const char* name, std::size_t n) {
    const json& f = j.at("fields").at(name);
    std::vector<double> v;
    v.reserve(f.size());
    for (const auto& x : f) {
        if (!x.is_number()) throw IoError(std::string("non-numeric entry in field ") + name);
        v.push_back(x.get<double>());
    }
    if (v.size() != n) throw IoError(std::string("field ") + name + " has the wrong length");
    return v;
}

} // namespace

json initial_data_to_json(const InitialData& d, const Parameters& params) {
    json j = header("initial_data", 0.0, params, d.grid, d.R);
    j["profile"] = d.profile ? to_json(*d.profile) : json(nullptr);
    j["summary"] = json{{"m0", d.m0},
                        {"H0", d.H0},
                        {"W0", d.W0},
                        {"u0_norm2", d.u0_norm2},
                        {"min_rho0", d.min_rho0},
                        {"max_rho0", d.max_rho0},
                        {"ass1", d.ass1_holds},
                        {"ass2", d.ass2_holds}};
    j["field_names"] = {"rho", "u", "A_r", "A_t", "F_r", "F_t"};
    j["fields"] = json{{"rho", d.rho0}, {"u", d.u0},     {"A_r", d.A0_r},
                       {"A_t", d.A0_t}, {"F_r", d.F0_r}, {"F_t", d.F0_t}};
    return j;
}

LoadedInitialData initial_data_from_json(const json& j) {
    check_header(j, "initial_data");
    try {
        const Parameters params = parameters_from_json(j.at("params"));
        const RadialGrid grid = grid_from_json(j.at("grid"));
        const std::size_t n = grid.n_cells;
        InitialData d = assemble_initial_data(grid, j.at("support_radius_R").get<double>(), field(j, "rho", n),
                                              field(j, "u", n), field(j, "A_r", n), field(j, "A_t", n),
                                              field(j, "F_r", n), field(j, "F_t", n), params);
        if (j.contains("profile") && !j.at("profile").is_null()) d.profile = profile_from_json(j.at("profile"));
        if (j.contains("summary")) {
            const json& s = j.at("summary");
            const double stored[] = {s.at("m0").get<double>(), s.at("H0").get<double>(), s.at("W0").get<double>(),
                                     s.at("u0_norm2").get<double>()};
            const double fresh[] = {d.m0, d.H0, d.W0, d.u0_norm2};
            for (int k = 0; k < 4; ++k) {
                if (stored[k] != fresh[k]) throw IoError("stored summary does not match the fields");
            }
        }
        return {std::move(d), params};
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed initial data file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("malformed initial data file: ") + e.what());
    }
}

json checkpoint_to_json(const RadialState& s, const Parameters& params, double R) {
    json j = header("checkpoint", s.t, params, s.grid, R);
    json names = {"rho", "mom", "A_r", "A_t", "F_r", "F_t"};
    json fields = json{{"rho", s.rho}, {"mom", s.mom}, {"A_r", s.A_r},
                       {"A_t", s.A_t}, {"F_r", s.F_r}, {"F_t", s.F_t}};
    if (s.tracks_T_form()) {
        names.push_back("T_rr");
        names.push_back("T_t");
        fields["T_rr"] = s.T_rr;
        fields["T_t"] = s.T_t;
    }
    j["field_names"] = std::move(names);
    j["fields"] = std::move(fields);
    return j;
}

LoadedCheckpoint checkpoint_from_json(const json& j) {
    check_header(j, "checkpoint");
    try {
        LoadedCheckpoint c{RadialState{}, parameters_from_json(j.at("params")), j.at("support_radius_R").get<double>()};
        RadialState& s = c.state;
        s.grid = grid_from_json(j.at("grid"));
        s.t = j.at("time").get<double>();
        const std::size_t n = s.grid.n_cells;
        s.rho = field(j, "rho", n);
        s.mom = field(j, "mom", n);
        s.A_r = field(j, "A_r", n);
        s.A_t = field(j, "A_t", n);
        s.F_r = field(j, "F_r", n);
        s.F_t = field(j, "F_t", n);
        if (j.at("fields").contains("T_rr")) {
            s.T_rr = field(j, "T_rr", n);
            s.T_t = field(j, "T_t", n);
        }
        return c;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed checkpoint file: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string sha256_file(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
        throw IoError("sha256 failed for " + path.string());
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

} // namespace ucm
