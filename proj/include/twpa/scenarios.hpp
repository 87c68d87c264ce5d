#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "twpa/device_file.hpp"
#include "twpa/floquet.hpp"
#include "twpa/metrics.hpp"

namespace twpa {

enum class SweepAxis { frequency, drive, loss_tangent, out_of_band_impedance, device_length, sigma_ic };
SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis a);

enum class Output { gain, reflection, eta_bar, floquet, noise_budget, pump_reflection, p1db };
Output parse_output(const std::string& name);
std::string output_name(Output o);

// Bundled devices: table1, table2_floquet, table2_conventional, tlr.
std::vector<std::string> builtin_device_names();
DeviceDescription builtin_device(const std::string& name);
// A builtin name, or a path to a device file (relative paths resolve against base_dir).
DeviceDescription resolve_device(const std::string& ref, const std::string& base_dir);

struct Scenario {
    std::string name;
    std::vector<std::string> device_refs;
    std::vector<DeviceDescription> devices;
    int n_min = -3, n_max = 2;
    double signal_frequency_hz = 6e9;
    double pump_frequency_hz = 0.0;  // 0: take the device value
    double drive = 0.0;              // 0: take the device value
    double loss_tangent = -1.0;      // < 0: take the device value
    std::string wavevector;          // empty: take the device value
    double port_impedance = 50.0;
    double out_of_band_impedance = 50.0;
    double band_limit_hz = 16e9;
    int substeps = 4;
    Integrator integrator = Integrator::magnus4;
    bool forward_backward = true;
    SweepAxis axis = SweepAxis::frequency;
    std::vector<double> grid;
    bool has_series = false;
    SweepAxis series_axis = SweepAxis::out_of_band_impedance;
    std::vector<double> series;
    std::vector<Output> outputs;
    std::uint64_t seed = 1;
    int trials = 1;
    double sigma_ic = 0.0;

    void validate() const;
    bool wants(Output o) const;
};

// Sectioned key/value text: keys before the first "[name]" header are shared defaults.
std::vector<Scenario> parse_scenarios(const std::string& text, const std::string& base_dir,
                                      const std::string& origin = "<string>");
std::vector<Scenario> load_scenarios(const std::string& path);

// linspace(a,b,n), logspace(a,b,n) (decades), or a bracketed list.
std::vector<double> parse_grid(const std::string& text);

std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);
std::vector<Scenario> preset_scenarios(const std::string& name);

struct PointResult {
    std::size_t index = 0;
    std::string device;
    double series_value = 0.0;
    double axis_value = 0.0;
    int trial = 0;
    bool ok = false;
    std::string error;
    int error_kind = 0;  // exit code class of the failure
    bool excluded = false;  // ladder touches the PMR gap or the band edge
    double gain_db = 0.0;
    double reflection_db = 0.0;
    double eta = 0.0;
    double eta_bar = 0.0;
    double added_noise = 0.0;
    double residual = 0.0;
    bool lossy = false;
    double condition = 0.0;
    double pump_reflection_db = 0.0;
    double p1db_dbm = 0.0;
    double gain_coefficient = 0.0;  // Re r_a per cell at the reference cell
    double spectral_gap = 0.0;
    int unstable_exponents = 0;
    double signal_share = 0.0, idler_share = 0.0, sideband_share = 0.0, loss_share = 0.0;
};

// Pseudo-unitarity tolerance: 1e-9 lossless, 1e-6 with loss.
double residual_tolerance(bool lossy);

struct ScenarioResult {
    Scenario scenario;
    std::vector<PointResult> points;  // ordered by grid index
    std::size_t failures() const;    // excluded points do not count
    std::size_t exclusions() const;
    double max_residual() const;
    std::size_t invariant_violations() const;
};

struct RunOptions {
    int threads = 1;
};

ScenarioResult run_scenario(const Scenario& s, const RunOptions& opt = {});

// Column names and row values for CSV output; names carry unit suffixes.
std::vector<std::string> csv_columns(const Scenario& s);
std::vector<std::string> csv_row(const Scenario& s, const PointResult& p);

// Median and 10/90 percentiles over trials per (device, series, axis) group.
struct TrialStatistics {
    std::string device;
    double series_value = 0.0, axis_value = 0.0;
    int samples = 0;
    double gain_p10 = 0, gain_median = 0, gain_p90 = 0;
    double reflection_p10 = 0, reflection_median = 0, reflection_p90 = 0;
    double eta_bar_p10 = 0, eta_bar_median = 0, eta_bar_p90 = 0;
};
std::vector<TrialStatistics> trial_statistics(const ScenarioResult& r);

struct ConvergenceRow {
    std::string device;
    double axis_value = 0.0;
    std::string study;  // modes, substeps, quadrature
    std::string quantity;
    double base = 0.0, refined = 0.0, delta = 0.0, threshold = 0.0;
    bool pass = false;
    std::string note;
};

std::vector<ConvergenceRow> convergence_report(const Scenario& s);

// m modes -> n in [-ceil(m/2), floor(m/2) - 1]; m = 6 gives [-3, 2], m = 1 gives [0, 0].
void ladder_for_mode_count(int m, int& n_min, int& n_max);

// Solves one point; exposed for tests and the CLI check command.
struct PointSetup {
    NormalizedProfile profile;
    PumpSolution pump;
    ModeLadder ladder;
    SolverOptions options;
};
PointSetup setup_point(const Scenario& s, const DeviceDescription& dev, double series_value, double axis_value,
                       int trial);

}  // namespace twpa
