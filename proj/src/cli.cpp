#include "ucm/cli.hpp"

#include "ucm/io.hpp"
#include "ucm/radial_solver.hpp"
#include "ucm/riccati.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

namespace ucm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

json number(double x) {
    return std::isfinite(x) ? json(x) : json(format_double(x));
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

VerifyRow skipped(std::string name, std::string why) {
    VerifyRow r;
    r.check = std::move(name);
    r.skipped = true;
    r.value = nan;
    r.tolerance = nan;
    r.detail = std::move(why);
    return r;
}

} // namespace

bool VerifyReport::passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.passed; });
}

VerifyReport verify_records(const std::vector<DiagnosticsRecord>& records, const InitialData& data,
                            const Parameters& params, double sigma_est, const VerifyTolerances& tol) {
    VerifyReport rep;
    const DiagnosticsContext ctx = make_context(data, params, sigma_est);
    if (records.empty()) {
        rep.rows.push_back({"records", false, false, 0.0, 0.0, "no diagnostics records"});
        return rep;
    }

    {
        VerifyRow r{"mass_conservation"};
        for (const auto& rec : records) r.value = std::max(r.value, std::abs(rec.m - data.m0));
        r.tolerance = tol.mass_rel * (std::abs(data.m0) + 4.0 / 3.0 * std::numbers::pi * std::pow(data.R, 3));
        r.passed = r.value <= r.tolerance;
        r.detail = "max |m(t) - m0|";
        rep.rows.push_back(r);
    }
    {
        VerifyRow r{"mass_nonnegative"};
        r.value = std::numeric_limits<double>::infinity();
        for (const auto& rec : records) r.value = std::min(r.value, rec.m);
        r.tolerance = tol.mass_rel * (std::abs(data.m0) + 4.0 / 3.0 * std::numbers::pi * std::pow(data.R, 3));
        r.passed = r.value >= -r.tolerance;
        r.detail = "min m(t)";
        rep.rows.push_back(r);
    }
    {
        VerifyRow r{"jensen_margin"};
        double scale = 0.0;
        r.value = std::numeric_limits<double>::infinity();
        for (const auto& rec : records) {
            r.value = std::min(r.value, rec.jensen_margin);
            scale = std::max(scale, std::abs(rec.jensen_margin));
        }
        r.tolerance = tol.jensen_rel * (1.0 + scale);
        r.passed = r.value >= -r.tolerance;
        r.detail = "min over B(t) of int (p - p(1))";
        rep.rows.push_back(r);
    }
    {
        const SlackVerdict s = check_trT_bound(records, ctx, tol.trT_rel);
        VerifyRow r{"trT_cumulative_bound", s.passed, false, s.min_slack, s.tolerance,
                    "min of lambda (H0 + max rho0 ||u0||^2) - int_0^t int tr(T)"};
        rep.rows.push_back(r);
    }
    if (records.size() < 3) {
        rep.rows.push_back(skipped("energy_identity", "fewer than 3 records"));
        rep.rows.push_back(skipped("W_inequality", "fewer than 3 records"));
    } else {
        const ResidualSeries e = check_energy_identity(records, params);
        const std::vector<double> dE = time_derivative(records, &DiagnosticsRecord::E);
        double trT_scale = 0.0;
        for (const auto& rec : records) trT_scale = std::max(trT_scale, std::abs(rec.int_trT));
        VerifyRow re{"energy_identity"};
        re.value = e.max_abs;
        re.tolerance = tol.energy_rel * (max_abs(dE) + trT_scale / (2.0 * params.lambda()));
        re.passed = re.value <= re.tolerance;
        re.detail = "max |dE/dt + int tr(T) / 2 lambda|";
        rep.rows.push_back(re);

        const ResidualSeries w = check_W_inequality(records, ctx);
        const std::vector<double> dW = time_derivative(records, &DiagnosticsRecord::W);
        VerifyRow rw{"W_inequality"};
        rw.value = w.min;
        rw.tolerance = tol.W_ineq_rel * max_abs(dW);
        rw.passed = rw.value >= -rw.tolerance;
        rw.detail = "min of W' - W^2 / (4/3 pi (R + sigma t)^5 max rho0) + int tr(T)";
        rep.rows.push_back(rw);
    }
    {
        const double U0 = compute_U0(data, params);
        if (U0 < 0.0) {
            rep.rows.push_back(skipped("W_ge_V", "U0 < 0: no comparison function"));
        } else {
            std::vector<double> t;
            for (const auto& rec : records) t.push_back(rec.t);
            const VSeries V = integrate_V(U0, compute_c2(sigma_est, data.R), compute_c3(data.max_rho0, data.R), t);
            const ComparisonVerdict c = compare_W_V(records, V, tol.W_V_rel);
            VerifyRow r{"W_ge_V", c.passed, false, c.min_margin, c.tolerance, "min of W(t) - V(t)"};
            rep.rows.push_back(r);
        }
    }
    {
        VerifyRow r{"support_containment"};
        r.value = -std::numeric_limits<double>::infinity();
        for (const auto& rec : records) r.value = std::max(r.value, rec.support_radius - ctx.ball_radius(rec.t));
        r.tolerance = tol.support_abs;
        r.passed = r.value <= r.tolerance;
        r.detail = "max of support_radius - (R + sigma t)";
        rep.rows.push_back(r);
    }
    return rep;
}

json to_json(const VerifyReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows) {
        rows.push_back(json{{"check", r.check},
                            {"status", r.skipped ? "skipped" : (r.passed ? "pass" : "fail")},
                            {"value", number(r.value)},
                            {"tolerance", number(r.tolerance)},
                            {"detail", r.detail}});
    }
    return json{{"passed", rep.passed()}, {"checks", rows}};
}

void print_verify_table(std::ostream& os, const VerifyReport& rep) {
    os << std::left << std::setw(24) << "check" << std::setw(9) << "status" << std::setw(26) << "value"
       << "tolerance\n";
    for (const auto& r : rep.rows) {
        os << std::setw(24) << r.check << std::setw(9) << (r.skipped ? "skipped" : (r.passed ? "pass" : "FAIL"))
           << std::setw(26) << format_double(r.value) << format_double(r.tolerance) << '\n';
    }
}

void fill_V_lower(std::vector<DiagnosticsRecord>& records, const InitialData& data, const Parameters& params,
                  double sigma_est) {
    const double U0 = compute_U0(data, params);
    for (auto& r : records) r.V_lower = nan;
    if (U0 < 0.0) return;
    std::vector<double> t;
    for (const auto& r : records) t.push_back(r.t);
    const VSeries V = integrate_V(U0, compute_c2(sigma_est, data.R), compute_c3(data.max_rho0, data.R), t);
    for (std::size_t k = 0; k < V.V.size(); ++k) records[k].V_lower = V.V[k];
}

// ---------------------------------------------------------------------------

namespace {

struct Loaded {
    KeyValueConfig kv;
    ExperimentConfig cfg;
};

Loaded load_config(const CliPaths& paths) {
    Loaded l;
    if (!paths.config.empty()) l.kv = KeyValueConfig::load(paths.config.string());
    l.cfg = resolve_config(l.kv);
    return l;
}

json config_echo(const KeyValueConfig& kv) {
    json j = json::object();
    for (const auto& [k, v] : kv.entries()) j[k] = v;
    return j;
}

fs::path data_path(const CliPaths& paths) {
    if (!paths.data.empty()) return paths.data;
    return paths.out / "initial_data.json";
}

json criterion_json(const CriterionVerdict& c) {
    return json{{"satisfied", c.satisfied}, {"U0", c.U0},           {"c2", c.c2},
                {"c3", c.c3},               {"threshold", c.threshold}, {"lhs", c.lhs},
                {"rhs", c.rhs}};
}

} // namespace

int cmd_make_ic(const CliPaths& paths, std::ostream& log) {
    const Loaded l = load_config(paths);
    const ExperimentConfig& cfg = l.cfg;
    fs::create_directories(paths.out);

    InitialData data;
    ProfileSpec spec = cfg.profile;
    if (cfg.profile_kind == ProfileKind::background) {
        const RadialGrid grid = cfg.grid(spec);
        const std::vector<double> ones(grid.n_cells, 1.0), zeros(grid.n_cells, 0.0);
        data = assemble_initial_data(grid, spec.R, ones, zeros, ones, ones, ones, ones, cfg.params);
    } else {
        spec = resolve_profile(cfg);
        spec.validate();
        data = build_initial_state(spec, cfg.params, cfg.grid(spec));
    }
    const fs::path file = paths.out / "initial_data.json";
    write_json_file(file, initial_data_to_json(data, cfg.params));

    const double sigma = cfg.sigma_est();
    const CriterionVerdict crit = check_criterion(data, cfg.params, sigma);
    json summary{{"stage", "make-ic"},
                 {"config", config_echo(l.kv)},
                 {"profile_kind", cfg.profile_kind == ProfileKind::background ? "background" : "cosine"},
                 {"profile", to_json(spec)},
                 {"sigma_est", sigma},
                 {"grid", json{{"n_cells", data.grid.n_cells}, {"dr", data.grid.dr}, {"r_max", data.grid.r_max()}}},
                 {"m0", data.m0},
                 {"H0", data.H0},
                 {"W0", data.W0},
                 {"u0_norm2", data.u0_norm2},
                 {"min_rho0", data.min_rho0},
                 {"max_rho0", data.max_rho0},
                 {"ass1", data.ass1_holds},
                 {"ass2", data.ass2_holds},
                 {"criterion", criterion_json(crit)},
                 {"data_file", file.filename().string()},
                 {"data_sha256", sha256_file(file)}};
    write_json_file(paths.out / "make_ic.json", summary);

    log << "L = " << format_double(spec.L) << ", R = " << format_double(spec.R)
        << ", sigma_est = " << format_double(sigma) << "\n"
        << "m0 = " << format_double(data.m0) << "\nH0 = " << format_double(data.H0)
        << "\nW0 = " << format_double(data.W0) << "\n"
        << "(ass1) m0 >= 0: " << (data.ass1_holds ? "holds" : "violated") << "\n"
        << "(ass2) tr(T0) >= 0: " << (data.ass2_holds ? "holds" : "violated") << "\n"
        << "criterion U0 > 4 c2 / c3: " << (crit.satisfied ? "satisfied" : "not satisfied")
        << " (U0 = " << format_double(crit.U0) << ", 4 c2 / c3 = " << format_double(crit.threshold) << ")\n";
    return kExitOk;
}

int cmd_run(const CliPaths& paths, std::ostream& log) {
    const Loaded l = load_config(paths);
    const ExperimentConfig& cfg = l.cfg;
    const fs::path file = data_path(paths);
    const LoadedInitialData loaded = initial_data_from_json(read_json_file(file));
    const InitialData& data = loaded.data;
    const Parameters& params = loaded.params;
    if (!(params == cfg.params) && !l.kv.entries().empty()) {
        bool any_param_key = false;
        for (const auto& [k, v] : l.kv.entries()) any_param_key |= k.rfind("params.", 0) == 0;
        if (any_param_key) throw ConfigError("params.* in the config differ from the data file");
    }
    fs::create_directories(paths.out);

    const double sigma = cfg.sigma_override ? *cfg.sigma_override : default_sigma_est(params);
    RunConfig rc = cfg.run_config();
    rc.sigma_est = sigma;
    RunResult res = run(data, params, rc);
    fill_V_lower(res.records, data, params, sigma);

    {
        std::ofstream csv(paths.out / "diagnostics.csv", std::ios::binary | std::ios::trunc);
        if (!csv) throw IoError("cannot write diagnostics.csv");
        write_csv(csv, res.records);
    }
    write_json_file(paths.out / "checkpoint_final.json", checkpoint_to_json(res.final_state, params, data.R));

    const CriterionVerdict crit = check_criterion(data, params, sigma);
    std::optional<double> T_star;
    if (crit.satisfied) T_star = blowup_bound_Tstar(crit.U0, crit.c2, crit.c3);
    const double final_grad = res.records.back().sup_grad_u;
    json outcome{{"stage", "run"},
                 {"config", config_echo(l.kv)},
                 {"status", res.breakdown ? "breakdown" : "completed"},
                 {"t_end", rc.t_end},
                 {"last_healthy_time", res.final_state.t},
                 {"steps", res.steps},
                 {"records", res.records.size()},
                 {"sigma_est", sigma},
                 {"initial_sup_grad_u", res.initial_sup_grad_u},
                 {"final_sup_grad_u", final_grad},
                 {"gradient_growth", res.initial_sup_grad_u > 0.0 ? number(final_grad / res.initial_sup_grad_u)
                                                                  : json(nullptr)},
                 {"criterion", criterion_json(crit)},
                 {"T_star", T_star ? json(*T_star) : json(nullptr)},
                 {"data_file", file.string()},
                 {"data_sha256", sha256_file(file)}};
    if (res.breakdown) {
        outcome["breakdown"] = json{{"reason", to_string(res.breakdown->reason)},
                                    {"time", res.breakdown->time},
                                    {"last_valid_time", res.breakdown->last_valid_time},
                                    {"detail", res.breakdown->detail}};
    } else {
        outcome["breakdown"] = nullptr;
    }
    write_json_file(paths.out / "outcome.json", outcome);

    log << "steps: " << res.steps << ", records: " << res.records.size() << "\n";
    if (T_star) log << "lifespan <= T* = " << format_double(*T_star) << "\n";
    if (res.breakdown) {
        log << "breakdown (" << to_string(res.breakdown->reason) << ") at t = " << format_double(res.breakdown->time)
            << "; last healthy time " << format_double(res.breakdown->last_valid_time) << "\n";
        return kExitBreakdown;
    }
    log << "completed at t = " << format_double(res.final_state.t) << "\n";
    return kExitOk;
}

int cmd_verify(const CliPaths& paths, std::ostream& log) {
    const Loaded l = load_config(paths);
    const fs::path file = data_path(paths);
    const LoadedInitialData loaded = initial_data_from_json(read_json_file(file));
    const fs::path csv_path = paths.csv.empty() ? paths.out / "diagnostics.csv" : paths.csv;
    std::vector<DiagnosticsRecord> records;
    {
        std::ifstream in(csv_path, std::ios::binary);
        if (!in) throw IoError("cannot open " + csv_path.string());
        records = read_csv(in);
    }
    const double sigma = l.cfg.sigma_override ? *l.cfg.sigma_override : default_sigma_est(loaded.params);
    VerifyReport rep = verify_records(records, loaded.data, loaded.params, sigma, l.cfg.verify);

    const std::string data_hash = sha256_file(file);
    const fs::path outcome_path = csv_path.parent_path() / "outcome.json";
    if (fs::exists(outcome_path)) {
        const json outcome = read_json_file(outcome_path);
        VerifyRow r{"input_consistency"};
        r.passed = outcome.value("data_sha256", std::string{}) == data_hash;
        r.value = r.passed ? 0.0 : 1.0;
        r.detail = "data sha256 matches the run outcome";
        rep.rows.insert(rep.rows.begin(), r);
    }

    fs::create_directories(paths.out);
    json j = to_json(rep);
    j["stage"] = "verify";
    j["config"] = config_echo(l.kv);
    j["sigma_est"] = sigma;
    j["data_sha256"] = data_hash;
    j["csv_sha256"] = sha256_file(csv_path);
    write_json_file(paths.out / "verify.json", j);
    print_verify_table(log, rep);
    return rep.passed() ? kExitOk : kExitVerification;
}

int cmd_bound(const CliPaths& paths, std::ostream& log) {
    const Loaded l = load_config(paths);
    const ExperimentConfig& cfg = l.cfg;
    fs::create_directories(paths.out);

    auto grid_for = [&](std::optional<double> T_star) {
        const double horizon = T_star ? 0.99 * *T_star : cfg.t_end;
        std::vector<double> t(cfg.bound_samples);
        for (std::size_t k = 0; k < t.size(); ++k) {
            t[k] = horizon * static_cast<double>(k) / static_cast<double>(t.size() - 1);
        }
        return t;
    };

    BlowupReport report{cfg.params};
    if (cfg.bound_U0) {
        const double U0 = *cfg.bound_U0, c2 = *cfg.bound_c2, c3 = *cfg.bound_c3;
        const std::optional<double> T = criterion_holds(U0, c2, c3) ? std::optional(blowup_bound_Tstar(U0, c2, c3))
                                                                    : std::nullopt;
        report = make_blowup_report(U0, c2, c3, cfg.params, cfg.sigma_est(), grid_for(T));
    } else {
        const fs::path file = data_path(paths);
        const LoadedInitialData loaded = initial_data_from_json(read_json_file(file));
        const double sigma = cfg.sigma_override ? *cfg.sigma_override : default_sigma_est(loaded.params);
        const CriterionVerdict c = check_criterion(loaded.data, loaded.params, sigma);
        const std::optional<double> T =
            c.satisfied ? std::optional(blowup_bound_Tstar(c.U0, c.c2, c.c3)) : std::nullopt;
        report = make_blowup_report(loaded.data, loaded.params, sigma, grid_for(T));
    }
    json j = to_json(report);
    j["stage"] = "bound";
    j["config"] = config_echo(l.kv);
    j["injected_constants"] = cfg.bound_U0.has_value();
    write_json_file(paths.out / "bound.json", j);

    if (report.T_star) {
        log << "criterion satisfied: lifespan <= T* = " << format_double(*report.T_star) << "\n";
    } else {
        log << "criterion not satisfied (U0 = " << format_double(report.criterion.U0)
            << ", 4 c2 / c3 = " << format_double(report.criterion.threshold) << "): no lifespan bound\n";
    }
    return kExitOk;
}

int cmd_report(const CliPaths& paths, std::ostream& log) {
    const fs::path dir = paths.out;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    struct Stage {
        const char* name;
        const char* file;
    };
    const Stage stages[] = {{"make_ic", "make_ic.json"},
                            {"run", "outcome.json"},
                            {"verify", "verify.json"},
                            {"bound", "bound.json"}};
    json bundle{{"tool", "ucm"}, {"version", kVersion}};
    json blocks = json::object();
    json missing = json::array();
    std::ostringstream csv;
    csv << "stage,present,status\n";
    for (const auto& s : stages) {
        const fs::path p = dir / s.file;
        if (!fs::exists(p)) {
            blocks[s.name] = json{{"present", false}};
            missing.push_back(s.name);
            csv << s.name << ",false,absent\n";
            continue;
        }
        json content = read_json_file(p);
        std::string status = "ok";
        if (std::string(s.name) == "make_ic") {
            status = content.at("criterion").at("satisfied").get<bool>() ? "criterion_satisfied" : "criterion_not_satisfied";
        } else if (std::string(s.name) == "run") {
            status = content.at("status").get<std::string>();
        } else if (std::string(s.name) == "verify") {
            status = content.at("passed").get<bool>() ? "pass" : "fail";
        } else {
            status = content.at("T_star").is_null() ? "no_bound" : "bounded";
        }
        blocks[s.name] = json{{"present", true}, {"status", status}, {"sha256", sha256_file(p)}, {"content", content}};
        csv << s.name << ",true," << status << '\n';
    }
    bundle["stages"] = blocks;
    bundle["missing"] = missing;
    write_json_file(dir / "report.json", bundle);
    write_text_file(dir / "report.csv", csv.str());
    for (const auto& m : missing) log << "stage absent: " << m.get<std::string>() << "\n";
    log << "wrote " << (dir / "report.json").string() << "\n";
    return kExitOk;
}

int run_cli(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* threads = std::getenv("UCM_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
    CLI::App app{"Spherically symmetric compressible UCM laboratory"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    CliPaths paths;
    auto add_common = [&](CLI::App* sub, bool with_data) {
        sub->add_option("--config", paths.config, "key=value configuration file");
        sub->add_option("--out", paths.out, "output directory");
        if (with_data) sub->add_option("--data", paths.data, "initial data file (default: OUT/initial_data.json)");
    };
    auto* make_ic = app.add_subcommand("make-ic", "build initial data and print its summary");
    add_common(make_ic, false);
    auto* run = app.add_subcommand("run", "evolve initial data and record diagnostics");
    add_common(run, true);
    auto* verify = app.add_subcommand("verify", "check identities and inequalities on a diagnostics CSV");
    add_common(verify, true);
    verify->add_option("--csv", paths.csv, "diagnostics CSV (default: OUT/diagnostics.csv)");
    auto* bound = app.add_subcommand("bound", "blow-up criterion and lifespan bound");
    add_common(bound, true);
    auto* report = app.add_subcommand("report", "bundle the outputs of a run directory");
    add_common(report, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*make_ic) return cmd_make_ic(paths, std::cout);
        if (*run) return cmd_run(paths, std::cout);
        if (*verify) return cmd_verify(paths, std::cout);
        if (*bound) return cmd_bound(paths, std::cout);
        if (*report) return cmd_report(paths, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConstructionError& e) {
        std::cerr << "construction error: " << e.what() << "\n";
        return kExitConstruction;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

} // namespace ucm
