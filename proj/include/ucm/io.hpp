#pragma once

// Text formatting and the structured field files used for initial data and
// checkpoints. Doubles are written in shortest round-trip form, so reading a
// file back reproduces every grid value bit for bit.

#include "ucm/initial_data.hpp"
#include "ucm/model.hpp"
#include "ucm/radial_state.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ucm {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double ("nan", "inf", "-inf" for non-finite).
std::string format_double(double x);
/// Inverse of format_double; throws std::invalid_argument on malformed text.
double parse_double(std::string_view text);

inline constexpr std::string_view kFieldFileFormat = "ucm-radial-fields";
inline constexpr int kFieldFileVersion = 1;

nlohmann::json to_json(const Parameters& params);
Parameters parameters_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProfileSpec& spec);
ProfileSpec profile_from_json(const nlohmann::json& j);

nlohmann::json initial_data_to_json(const InitialData& data, const Parameters& params);

struct LoadedInitialData {
    InitialData data;
    Parameters params;
};

/// Rebuilds InitialData from its file representation; summaries are recomputed
/// from the fields and must match the stored ones.
LoadedInitialData initial_data_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const RadialState& state, const Parameters& params, double R);

struct LoadedCheckpoint {
    RadialState state;
    Parameters params;
    double R = 0.0;
};

LoadedCheckpoint checkpoint_from_json(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

} // namespace ucm
