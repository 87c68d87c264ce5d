// twpa: multimode scattering and Floquet analysis of Josephson travelling-wave amplifiers.
//
//   twpa presets [--show NAME]
//   twpa run --config <file|preset> [--out DIR] [--threads N] [--seed S] [--modes M] [--substeps K]
//   twpa check --device <device> [--drive I] [--frequency HZ]
//   twpa convergence --config <file|preset>
//
// Exit codes: 0 ok, 1 configuration error, 2 numerical failure, 3 invariant violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "twpa/kernels.hpp"
#include "twpa/scenarios.hpp"

#ifndef TWPA_VERSION
#define TWPA_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitInvariant = 3;

struct Overrides {
    std::string config;
    std::string out;
    int threads = 0;
    long long seed = -1;
    int modes = 0;
    int substeps = 0;
    std::string isa = "auto";
};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw twpa::ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_preset(const std::string& ref) {
    const auto names = twpa::preset_names();
    return std::find(names.begin(), names.end(), ref) != names.end();
}

std::string config_text(const std::string& ref) { return is_preset(ref) ? twpa::preset_text(ref) : read_text(ref); }

std::vector<twpa::Scenario> load_with_overrides(const Overrides& o) {
    auto list = twpa::load_scenarios(o.config);
    for (auto& s : list) {
        if (o.seed >= 0) s.seed = static_cast<std::uint64_t>(o.seed);
        if (o.modes > 0) twpa::ladder_for_mode_count(o.modes, s.n_min, s.n_max);
        if (o.substeps > 0) s.substeps = o.substeps;
        s.validate();
    }
    return list;
}

void select_isa(const std::string& name) {
    if (name == "auto") return;
    if (name == "scalar")
        twpa::kernels::set_isa(twpa::kernels::Isa::scalar);
    else if (name == "avx2")
        twpa::kernels::set_isa(twpa::kernels::Isa::avx2);
    else
        throw twpa::ConfigError("unknown --isa '" + name + "' (auto, scalar, avx2)");
}

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string q = "\"";
    for (char c : v) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw twpa::ConfigError("cannot write '" + path.string() + "'");
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int cmd_presets(const std::string& show) {
    if (!show.empty()) {
        std::fputs(twpa::preset_text(show).c_str(), stdout);
        return 0;
    }
    for (const auto& name : twpa::preset_names()) {
        std::istringstream in(twpa::preset_text(name));
        std::string first, line;
        while (std::getline(in, line)) {
            const auto t = twpa::trim_copy(line);
            if (t.rfind('#', 0) == 0) {
                first = twpa::trim_copy(t.substr(1));
                break;
            }
        }
        std::printf("%-6s %s\n", name.c_str(), first.c_str());
    }
    return 0;
}

int cmd_run(const Overrides& o) {
    select_isa(o.isa);
    const auto scenarios = load_with_overrides(o);
    const fs::path out_dir = o.out;
    fs::create_directories(out_dir);
    const int threads = o.threads > 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency());

    json summary;
    summary["software"] = {{"name", "twpa"}, {"version", TWPA_VERSION},
                           {"isa", twpa::kernels::isa_name(twpa::kernels::active_isa())}};
    summary["config"] = {{"source", o.config}, {"text", config_text(o.config)}};
    summary["overrides"] = {{"threads", threads}, {"seed", o.seed}, {"modes", o.modes}, {"substeps", o.substeps}};
    summary["scenarios"] = json::array();

    std::size_t failures = 0, violations = 0;
    int worst_kind = 0;
    const auto t_all = std::chrono::steady_clock::now();
    for (const auto& s : scenarios) {
        const auto t0 = std::chrono::steady_clock::now();
        const twpa::ScenarioResult r = twpa::run_scenario(s, {threads});
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        std::vector<std::vector<std::string>> rows;
        for (const auto& p : r.points) rows.push_back(twpa::csv_row(s, p));
        const fs::path csv = out_dir / (s.name + ".csv");
        write_csv(csv, twpa::csv_columns(s), rows);

        json entry = {{"name", s.name}, {"csv", csv.string()}, {"points", r.points.size()},
                      {"failures", r.failures()}, {"exclusions", r.exclusions()},
                      {"invariant_violations", r.invariant_violations()},
                      {"max_residual", r.max_residual()}, {"wall_seconds", wall}};
        json devices = json::array();
        for (const auto& d : s.devices) devices.push_back(d.name);
        entry["devices"] = devices;
        entry["ladder"] = {s.n_min, s.n_max};
        entry["substeps"] = s.substeps;
        entry["seed"] = s.seed;
        entry["trials"] = s.trials;

        if (s.trials > 1) {
            const fs::path stats = out_dir / (s.name + "_stats.csv");
            std::vector<std::vector<std::string>> srows;
            for (const auto& t : twpa::trial_statistics(r))
                srows.push_back({t.device, num(t.series_value), num(t.axis_value), std::to_string(t.samples),
                                 num(t.gain_p10), num(t.gain_median), num(t.gain_p90), num(t.reflection_p10),
                                 num(t.reflection_median), num(t.reflection_p90), num(t.eta_bar_p10),
                                 num(t.eta_bar_median), num(t.eta_bar_p90)});
            write_csv(stats,
                      {"device", "series_value", "axis_value", "samples_count", "gain_p10_dB", "gain_median_dB",
                       "gain_p90_dB", "reflection_p10_dB", "reflection_median_dB", "reflection_p90_dB",
                       "eta_bar_p10_dimensionless", "eta_bar_median_dimensionless", "eta_bar_p90_dimensionless"},
                      srows);
            entry["stats_csv"] = stats.string();
        }

        json errors = json::array();
        for (const auto& p : r.points)
            if (!p.ok && !p.excluded) {
                worst_kind = std::max(worst_kind, p.error_kind);
                if (errors.size() < 20) errors.push_back({{"index", p.index}, {"error", p.error}, {"kind", p.error_kind}});
            }
        entry["errors"] = errors;
        summary["scenarios"].push_back(entry);
        failures += r.failures();
        violations += r.invariant_violations();
        std::printf("%-20s points=%zu failures=%zu excluded=%zu max_residual=%.3g (%.1f s)\n", s.name.c_str(),
                    r.points.size(), r.failures(), r.exclusions(), r.max_residual(), wall);
    }

    int code = 0;
    if (violations > 0)
        code = kExitInvariant;
    else if (failures > 0)
        code = worst_kind == kExitConfig ? kExitConfig : kExitNumerical;
    summary["invariants"] = {{"lossless_tolerance", twpa::residual_tolerance(false)},
                             {"lossy_tolerance", twpa::residual_tolerance(true)},
                             {"violations", violations},
                             {"passed", violations == 0}};
    summary["failures"] = failures;
    summary["exit_code"] = code;
    summary["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_all).count();
    const fs::path js = out_dir / "summary.json";
    std::ofstream(js) << summary.dump(2) << '\n';
    std::printf("summary: %s\n", js.string().c_str());
    return code;
}

struct CheckOptions {
    std::string config;
    double drive = 0.0;
    double frequency = 6e9;
    double loss_tangent = 3.4e-3;
    int modes = 0;
    int substeps = 0;
};

int cmd_check(const CheckOptions& c) {
    twpa::Scenario s;
    s.name = "check";
    s.devices.push_back(twpa::resolve_device(c.config, ""));
    s.grid = {c.frequency};
    s.outputs = {twpa::Output::gain};
    s.drive = c.drive;
    if (c.modes > 0) twpa::ladder_for_mode_count(c.modes, s.n_min, s.n_max);
    if (c.substeps > 0) s.substeps = c.substeps;
    s.validate();
    const auto& dev = s.devices.front();

    auto solve = [&](const twpa::Scenario& sc, bool zero_pump) {
        twpa::PointSetup ps = twpa::setup_point(sc, dev, 0.0, c.frequency, 0);
        if (zero_pump)
            ps.pump = twpa::solve_pump(ps.profile, ps.pump.pump_frequency, 0.0, twpa::WavevectorMode::adiabatic_formula);
        return twpa::solve_scattering(ps.profile, ps.pump, ps.ladder, ps.options);
    };

    bool all = true;
    auto report = [&](const char* name, double value, double threshold) {
        const bool ok = value < threshold;
        all = all && ok;
        std::printf("%s  %-28s %.3e  (< %.1e)\n", ok ? "PASS" : "FAIL", name, value, threshold);
    };

    twpa::Scenario lossless = s;
    lossless.loss_tangent = 0.0;
    const auto r0 = solve(lossless, false);
    const double g0 = twpa::gain_and_reflection(r0).signal_gain_db;
    std::printf("device %s: %d cells, ladder [%d, %d], signal %.4g GHz, gain %.4f dB\n", dev.name.c_str(),
                dev.spec.length_cells, s.n_min, s.n_max, c.frequency / 1e9, g0);
    report("lossless pseudo-unitarity", twpa::pseudo_unitarity_residual(r0), twpa::residual_tolerance(false));

    twpa::Scenario lossy = s;
    lossy.loss_tangent = c.loss_tangent;
    report("lossy sum rule", twpa::pseudo_unitarity_residual(solve(lossy, false)), twpa::residual_tolerance(true));

    // Without a pump no power moves between ladder modes.
    const auto rz = solve(lossless, true);
    const int m = rz.ladder.m();
    double mixing = 0.0;
    for (int i = 0; i < 2 * m; ++i)
        for (int j = 0; j < 2 * m; ++j)
            if (i % m != j % m) mixing = std::max(mixing, std::abs(rz.s0(i, j)));
    report("zero-pump mode mixing", mixing, 1e-12);
    report("zero-pump residual", twpa::pseudo_unitarity_residual(rz), twpa::residual_tolerance(false));

    twpa::Scenario fine = lossless;
    fine.substeps = 2 * s.substeps;
    report("substep doubling |dG| dB", std::abs(twpa::gain_and_reflection(solve(fine, false)).signal_gain_db - g0),
           0.01);
    return all ? 0 : kExitInvariant;
}

int cmd_convergence(const Overrides& o) {
    const auto scenarios = load_with_overrides(o);
    const fs::path out_dir = o.out;
    fs::create_directories(out_dir);
    std::vector<std::vector<std::string>> rows;
    bool all = true;
    for (const auto& s : scenarios) {
        for (const auto& row : twpa::convergence_report(s)) {
            all = all && row.pass;
            std::printf("%s  %-18s %-10s %-12s %-8s base=%.6g refined=%.6g delta=%.3e (< %.1e) %s\n",
                        row.pass ? "PASS" : "FAIL", s.name.c_str(), row.device.c_str(), row.study.c_str(),
                        row.quantity.c_str(), row.base, row.refined, row.delta, row.threshold, row.note.c_str());
            rows.push_back({s.name, row.device, num(row.axis_value), row.study, row.quantity, num(row.base),
                            num(row.refined), num(row.delta), num(row.threshold), row.pass ? "pass" : "fail",
                            row.note});
        }
    }
    write_csv(out_dir / "convergence.csv",
              {"scenario", "device", "axis_value", "study", "quantity", "base", "refined", "delta", "threshold",
               "result", "note"},
              rows);
    return all ? 0 : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimode scattering and Floquet analysis of Josephson travelling-wave amplifiers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", TWPA_VERSION);

    const char* env_out = std::getenv("TWPA_OUT_DIR");
    Overrides run_opts, conv_opts;
    run_opts.out = conv_opts.out = env_out && *env_out ? env_out : "twpa_out";

    std::string show;
    auto* presets = app.add_subcommand("presets", "List builtin scenario presets");
    presets->add_option("--show", show, "Print the scenario text of one preset");

    auto* run = app.add_subcommand("run", "Evaluate the scenarios of a config file or preset");
    run->add_option("config,--config", run_opts.config, "Scenario file or preset name")->required();
    run->add_option("--out", run_opts.out, "Output directory (default $TWPA_OUT_DIR or ./twpa_out)");
    run->add_option("--threads", run_opts.threads, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);
    run->add_option("--seed", run_opts.seed, "Base seed for perturbed devices")->check(CLI::NonNegativeNumber);
    run->add_option("--modes", run_opts.modes, "Ladder size m")->check(CLI::PositiveNumber);
    run->add_option("--substeps", run_opts.substeps, "Integrator substeps per cell")->check(CLI::PositiveNumber);
    run->add_option("--isa", run_opts.isa, "Kernel selection: auto, scalar, avx2");

    CheckOptions check_opts;
    auto* check = app.add_subcommand("check", "Invariant checks on one device");
    check->add_option("--config,--device", check_opts.config, "Device file or builtin device name")->required();
    check->add_option("--drive", check_opts.drive, "Reference drive I_p/I_0 (default: device value)");
    check->add_option("--frequency", check_opts.frequency, "Signal frequency in Hz");
    check->add_option("--loss-tangent", check_opts.loss_tangent, "Loss tangent for the sum-rule check");
    check->add_option("--modes", check_opts.modes, "Ladder size m")->check(CLI::PositiveNumber);
    check->add_option("--substeps", check_opts.substeps, "Integrator substeps per cell")->check(CLI::PositiveNumber);

    auto* conv = app.add_subcommand("convergence", "Mode-count, substep and quadrature convergence");
    conv->add_option("config,--config", conv_opts.config, "Scenario file or preset name")->required();
    conv->add_option("--out", conv_opts.out, "Output directory");
    conv->add_option("--modes", conv_opts.modes, "Base ladder size m")->check(CLI::PositiveNumber);
    conv->add_option("--substeps", conv_opts.substeps, "Base substeps per cell")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (presets->parsed()) return cmd_presets(show);
        if (run->parsed()) return cmd_run(run_opts);
        if (check->parsed()) return cmd_check(check_opts);
        if (conv->parsed()) return cmd_convergence(conv_opts);
    } catch (const twpa::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const twpa::InvariantError& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kExitInvariant;
    } catch (const twpa::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
