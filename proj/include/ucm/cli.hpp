#pragma once

// Command-line orchestration: make-ic, run, verify, bound, report.
//
// Each command writes JSON (and CSV where relevant) into the --out directory
// and returns one of the exit codes below. The verification logic is exposed
// here so that it can be exercised without going through files.

#include "ucm/config.hpp"
#include "ucm/diagnostics.hpp"
#include "ucm/initial_data.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ucm {

enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 1,
    kExitConfig = 2,
    kExitConstruction = 3,
    kExitBreakdown = 4,
    kExitVerification = 5,
};

inline constexpr const char* kVersion = "1.0.0";

struct VerifyRow {
    std::string check;
    bool passed = true;
    bool skipped = false;
    double value = 0.0;     ///< the quantity compared against the tolerance
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool passed() const;
};

/// Runs every check on a record series produced from `data`.
VerifyReport verify_records(const std::vector<DiagnosticsRecord>& records, const InitialData& data,
                            const Parameters& params, double sigma_est, const VerifyTolerances& tol);

nlohmann::json to_json(const VerifyReport& report);
void print_verify_table(std::ostream& os, const VerifyReport& report);

/// Fills the V_lower column from the comparison ODE (NaN where V is undefined).
void fill_V_lower(std::vector<DiagnosticsRecord>& records, const InitialData& data, const Parameters& params,
                  double sigma_est);

struct CliPaths {
    std::filesystem::path config;
    std::filesystem::path out = ".";
    std::filesystem::path data;
    std::filesystem::path csv;
};

int cmd_make_ic(const CliPaths& paths, std::ostream& log);
int cmd_run(const CliPaths& paths, std::ostream& log);
int cmd_verify(const CliPaths& paths, std::ostream& log);
int cmd_bound(const CliPaths& paths, std::ostream& log);
int cmd_report(const CliPaths& paths, std::ostream& log);

/// Parses arguments, dispatches, and maps exceptions to exit codes.
int run_cli(int argc, char** argv);

} // namespace ucm
