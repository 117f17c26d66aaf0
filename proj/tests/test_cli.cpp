#include "support.hpp"

#include "ucm/cli.hpp"
#include "ucm/io.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace ucm;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSmallConfig = R"(# small smooth run
params.gamma = 1.4
profile.L = 1
profile.R = 5
solver.t_end = 0.2
solver.output_interval = 0.02
)";

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "ucm");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string read_all(const fs::path& p) { return read_text_file(p); }

} // namespace

TEST_CASE("full pipeline through the command line") {
    ucm::testing::TempDir dir("cli");
    const auto cfg = dir / "run.cfg";
    write_text_file(cfg, kSmallConfig);
    const std::string out = dir.path().string();

    REQUIRE(cli({"make-ic", "--config", cfg.string(), "--out", out}) == kExitOk);
    CHECK(fs::exists(dir / "initial_data.json"));
    const auto ic = read_json_file(dir / "make_ic.json");
    CHECK(ic.at("ass1").get<bool>());
    CHECK(ic.at("ass2").get<bool>());
    CHECK(ic.at("data_sha256").get<std::string>() == sha256_file(dir / "initial_data.json"));

    REQUIRE(cli({"run", "--config", cfg.string(), "--out", out}) == kExitOk);
    const auto outcome = read_json_file(dir / "outcome.json");
    CHECK(outcome.at("status") == "completed");
    CHECK(outcome.at("breakdown").is_null());
    CHECK(outcome.at("records").get<int>() == 11);

    REQUIRE(cli({"verify", "--config", cfg.string(), "--out", out}) == kExitOk);
    const auto ver = read_json_file(dir / "verify.json");
    CHECK(ver.at("passed").get<bool>());

    REQUIRE(cli({"bound", "--config", cfg.string(), "--out", out}) == kExitOk);
    CHECK(read_json_file(dir / "bound.json").at("T_star").is_null());

    REQUIRE(cli({"report", "--out", out}) == kExitOk);
    const auto rep = read_json_file(dir / "report.json");
    CHECK(rep.at("missing").empty());
    CHECK(rep.at("stages").at("verify").at("status") == "pass");
    CHECK(read_all(dir / "report.csv").find("run,true,completed") != std::string::npos);
}

TEST_CASE("verify rejects a diagnostics file with the W column negated") {
    ucm::testing::TempDir dir("corrupt");
    const auto cfg = dir / "run.cfg";
    write_text_file(cfg, kSmallConfig);
    const std::string out = dir.path().string();
    REQUIRE(cli({"make-ic", "--config", cfg.string(), "--out", out}) == kExitOk);
    REQUIRE(cli({"run", "--config", cfg.string(), "--out", out}) == kExitOk);

    std::vector<DiagnosticsRecord> rec;
    {
        std::ifstream in(dir / "diagnostics.csv");
        rec = read_csv(in);
    }
    for (auto& r : rec) r.W = -r.W;
    {
        std::ofstream os(dir / "diagnostics.csv", std::ios::trunc);
        write_csv(os, rec);
    }
    CHECK(cli({"verify", "--config", cfg.string(), "--out", out}) == kExitVerification);
    const auto ver = read_json_file(dir / "verify.json");
    CHECK_FALSE(ver.at("passed").get<bool>());
}

TEST_CASE("verify notices a data file that differs from the run") {
    ucm::testing::TempDir dir("swap");
    const auto cfg = dir / "run.cfg";
    write_text_file(cfg, kSmallConfig);
    const std::string out = dir.path().string();
    REQUIRE(cli({"make-ic", "--config", cfg.string(), "--out", out}) == kExitOk);
    REQUIRE(cli({"run", "--config", cfg.string(), "--out", out}) == kExitOk);
    auto j = read_json_file(dir / "outcome.json");
    j["data_sha256"] = "0000";
    write_json_file(dir / "outcome.json", j);
    CHECK(cli({"verify", "--config", cfg.string(), "--out", out}) == kExitVerification);
}

TEST_CASE("exit codes") {
    ucm::testing::TempDir dir("codes");
    const std::string out = dir.path().string();

    write_text_file(dir / "typo.cfg", "params.gama = 2\n");
    CHECK(cli({"make-ic", "--config", (dir / "typo.cfg").string(), "--out", out}) == kExitConfig);
    CHECK(cli({"make-ic", "--config", (dir / "absent.cfg").string(), "--out", out}) == kExitIo);
    CHECK(cli({"frobnicate"}) == kExitConfig);

    write_text_file(dir / "small.cfg", "profile.R = 4\n");
    CHECK(cli({"make-ic", "--config", (dir / "small.cfg").string(), "--out", out}) == kExitConstruction);

    write_text_file(dir / "steep.cfg", std::string(kSmallConfig) + "solver.gradient_factor = 0.5\n");
    REQUIRE(cli({"make-ic", "--config", (dir / "steep.cfg").string(), "--out", out}) == kExitOk);
    CHECK(cli({"run", "--config", (dir / "steep.cfg").string(), "--out", out}) == kExitBreakdown);
    CHECK(read_json_file(dir / "outcome.json").at("status") == "breakdown");

    CHECK(cli({"run", "--out", (dir / "empty").string()}) == kExitIo);
}

TEST_CASE("bound from injected constants") {
    ucm::testing::TempDir dir("bound");
    write_text_file(dir / "b.cfg", "bound.U0 = 1\nbound.c2 = 1\nbound.c3 = 8\nbound.samples = 50\n");
    std::ostringstream log;
    CliPaths paths;
    paths.config = dir / "b.cfg";
    paths.out = dir.path();
    CHECK(cmd_bound(paths, log) == kExitOk);
    CHECK(log.str().find("lifespan <= T* = ") != std::string::npos);
    const auto j = read_json_file(dir / "bound.json");
    CHECK(j.at("injected_constants").get<bool>());
    CHECK(j.at("T_star").get<double>() == Approx(std::pow(2.0, 0.25) - 1.0).epsilon(1e-12));
    CHECK(j.at("V_series").at("t").size() == 50);
}

TEST_CASE("report lists absent stages") {
    ucm::testing::TempDir dir("report");
    std::ostringstream log;
    CliPaths paths;
    paths.out = dir.path();
    CHECK(cmd_report(paths, log) == kExitOk);
    CHECK(read_json_file(dir / "report.json").at("missing").size() == 4);
    CHECK(log.str().find("stage absent: run") != std::string::npos);
}
