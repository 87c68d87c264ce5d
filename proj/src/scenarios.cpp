#include "twpa/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace twpa {

namespace {

const std::map<std::string, SweepAxis>& axis_table() {
    static const std::map<std::string, SweepAxis> t{
        {"frequency", SweepAxis::frequency},
        {"drive", SweepAxis::drive},
        {"loss_tangent", SweepAxis::loss_tangent},
        {"out_of_band_impedance", SweepAxis::out_of_band_impedance},
        {"device_length", SweepAxis::device_length},
        {"sigma_ic", SweepAxis::sigma_ic},
    };
    return t;
}

const std::map<std::string, Output>& output_table() {
    static const std::map<std::string, Output> t{
        {"gain", Output::gain},
        {"reflection", Output::reflection},
        {"eta_bar", Output::eta_bar},
        {"floquet", Output::floquet},
        {"noise_budget", Output::noise_budget},
        {"pump_reflection", Output::pump_reflection},
        {"p1db", Output::p1db},
    };
    return t;
}

// Builtin device files. configs/*.dev carry the same text.
const std::map<std::string, std::string>& device_texts() {
    static const std::map<std::string, std::string> t{
        {"table1", R"(name = table1
length = 2037
i0 = 4.55e-6
cj = 55e-15
cg = 45e-15
cc = 20e-15
lr = 170e-12
cr = 2.82e-12
pmr_period = 3
junctions_per_cell = 1
profile = homogeneous
drive = 0.52
pump_frequency = 6716847447.63
wavevector = fitted
)"},
        {"table2_floquet", R"(name = table2_floquet
length = 2000
i0 = 3.5e-6
cj = 40e-15
cg = 76.2e-15
cc = 40e-15
lr = 247e-12
cr = 1.533e-12
pmr_period = 8
junctions_per_cell = 2
profile = gaussian(0.6, 0.62)
drive = 0.6
pump_frequency = 7.875e9
wavevector = adiabatic
)"},
        {"table2_conventional", R"(name = table2_conventional
length = 700
i0 = 3.5e-6
cj = 40e-15
cg = 76.2e-15
cc = 40e-15
lr = 247e-12
cr = 1.533e-12
pmr_period = 8
junctions_per_cell = 2
profile = homogeneous
drive = 0.6
pump_frequency = 7.875e9
wavevector = adiabatic
)"},
        {"tlr", R"(name = table2_tlr
length = 2000
i0 = 3.5e-6
cj = 40e-15
cg = 76.2e-15
cc = 5e-15
lr = 247e-12
cr = 1.533e-12
pmr_period = 1
junctions_per_cell = 2
pmr_kind = quarter_wave_tlr
tlr_impedance = 50
tlr_velocity = 1.3e8
profile = gaussian(0.6, 0.62)
drive = 0.6
pump_frequency = 7.875e9
wavevector = adiabatic
)"},
    };
    return t;
}

const std::map<std::string, std::string>& preset_texts() {
    static const std::map<std::string, std::string> t{
        {"fig3", R"(# Homogeneous line versus drive: Floquet exponents and output-noise budget at 6 GHz
[fig3]
devices = table1
axis = drive
grid = linspace(0, 0.6, 201)
signal_frequency = 6e9
outputs = gain, eta_bar, floquet, noise_budget
)"},
        {"fig4", R"(# Gain and quantum inefficiency spectra of the three designs
[fig4]
devices = table2_floquet, table2_conventional, table1
axis = frequency
grid = linspace(3e9, 12e9, 201)
outputs = gain, reflection, eta_bar, noise_budget
)"},
        {"fig5", R"(# Dielectric loss and directionality
[fig5_loss]
devices = table1, table2_floquet, table2_conventional
axis = loss_tangent
grid = logspace(-7, -2, 201)
signal_frequency = 6e9
outputs = gain, eta_bar, noise_budget

[fig5_reflection]
devices = table2_floquet, table2_conventional
axis = frequency
grid = linspace(3e9, 12e9, 201)
outputs = gain, reflection, pump_reflection

[fig5_decoupled]
devices = table2_floquet
axis = frequency
grid = linspace(3e9, 12e9, 201)
forward_backward = false
outputs = gain, reflection
)"},
        {"fig7", R"(# Stepwise port impedance: 50 Ohm up to 16 GHz, Z_ob beyond
[fig7]
devices = table2_conventional, table2_floquet
axis = frequency
grid = linspace(3e9, 12e9, 201)
series_axis = out_of_band_impedance
series = [50, 100, 1000]
band_limit = 16e9
outputs = gain, reflection, eta_bar
)"},
        {"fig8", R"(# Gain scaling at 6 GHz with drive and with device length
[fig8_drive]
devices = table2_floquet
axis = drive
grid = linspace(0.5, 0.65, 201)
signal_frequency = 6e9
outputs = gain, reflection, eta_bar

[fig8_length]
devices = table2_floquet
axis = device_length
grid = linspace(2000, 2100, 101)
signal_frequency = 6e9
outputs = gain, reflection, eta_bar
)"},
        {"fig9", R"(# Lumped LC against quarter-wave resonators
[fig9]
devices = table2_floquet, tlr
axis = frequency
grid = linspace(3e9, 12e9, 201)
outputs = gain, reflection, eta_bar
)"},
        {"fig10", R"(# Critical-current variation, 20 random profiles per level
[fig10]
devices = table2_floquet
axis = frequency
grid = linspace(3e9, 12e9, 201)
series_axis = sigma_ic
series = [0, 0.02, 0.05, 0.1]
trials = 20
seed = 1
outputs = gain, reflection, eta_bar
)"},
    };
    return t;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

Scenario scenario_from_keys(const KeyValueFile& kv, const std::string& name, const std::string& base_dir) {
    static const std::set<std::string> known{
        "devices", "ladder", "signal_frequency", "pump_frequency", "drive", "loss_tangent", "wavevector",
        "port_impedance", "out_of_band_impedance", "band_limit", "substeps", "integrator", "forward_backward",
        "axis", "grid", "series_axis", "series", "outputs", "seed", "trials", "sigma_ic"};
    for (const auto& [k, v] : kv.values())
        if (!known.count(k)) throw ConfigError(name + ": unknown key '" + k + "'");
    Scenario s;
    s.name = name;
    s.device_refs = split_list(kv.get("devices"));
    for (const auto& ref : s.device_refs) s.devices.push_back(resolve_device(ref, base_dir));
    if (kv.has("ladder")) {
        const auto l = kv.numbers("ladder");
        if (l.size() != 2) throw ConfigError(name + ": ladder takes [n_min, n_max]");
        s.n_min = static_cast<int>(l[0]);
        s.n_max = static_cast<int>(l[1]);
    }
    s.signal_frequency_hz = kv.number_or("signal_frequency", s.signal_frequency_hz);
    s.pump_frequency_hz = kv.number_or("pump_frequency", 0.0);
    s.drive = kv.number_or("drive", 0.0);
    s.loss_tangent = kv.number_or("loss_tangent", -1.0);
    s.wavevector = kv.get_or("wavevector", "");
    s.port_impedance = kv.number_or("port_impedance", s.port_impedance);
    s.out_of_band_impedance = kv.number_or("out_of_band_impedance", s.out_of_band_impedance);
    s.band_limit_hz = kv.number_or("band_limit", s.band_limit_hz);
    s.substeps = static_cast<int>(kv.integer_or("substeps", s.substeps));
    const std::string integ = kv.get_or("integrator", "magnus4");
    if (integ == "magnus4")
        s.integrator = Integrator::magnus4;
    else if (integ == "rk4")
        s.integrator = Integrator::rk4;
    else
        throw ConfigError(name + ": integrator must be magnus4 or rk4");
    s.forward_backward = parse_bool(kv.get_or("forward_backward", "true"), "forward_backward");
    s.axis = parse_axis(kv.get("axis"));
    s.grid = parse_grid(kv.get("grid"));
    if (kv.has("series_axis")) {
        s.has_series = true;
        s.series_axis = parse_axis(kv.get("series_axis"));
        s.series = parse_grid(kv.get("series"));
    }
    for (const auto& o : split_list(kv.get("outputs"))) s.outputs.push_back(parse_output(o));
    const long long seed = kv.integer_or("seed", 1);
    if (seed < 0) throw ConfigError(name + ": seed must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
    s.trials = static_cast<int>(kv.integer_or("trials", 1));
    s.sigma_ic = kv.number_or("sigma_ic", 0.0);
    s.validate();
    return s;
}

}  // namespace

SweepAxis parse_axis(const std::string& name) {
    const auto it = axis_table().find(name);
    if (it == axis_table().end()) throw ConfigError("unknown sweep axis '" + name + "'");
    return it->second;
}

std::string axis_name(SweepAxis a) {
    for (const auto& [k, v] : axis_table())
        if (v == a) return k;
    return "?";
}

Output parse_output(const std::string& name) {
    const auto it = output_table().find(name);
    if (it == output_table().end()) throw ConfigError("unknown output '" + name + "'");
    return it->second;
}

std::string output_name(Output o) {
    for (const auto& [k, v] : output_table())
        if (v == o) return k;
    return "?";
}

std::vector<std::string> builtin_device_names() {
    std::vector<std::string> out;
    for (const auto& kv : device_texts()) out.push_back(kv.first);
    return out;
}

DeviceDescription builtin_device(const std::string& name) {
    const auto it = device_texts().find(name);
    if (it == device_texts().end()) throw ConfigError("unknown builtin device '" + name + "'");
    return device_from_keys(KeyValueFile::parse(it->second, name));
}

DeviceDescription resolve_device(const std::string& ref, const std::string& base_dir) {
    if (device_texts().count(ref)) return builtin_device(ref);
    std::filesystem::path p(ref);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    return load_device(p.string());
}

void Scenario::validate() const {
    if (devices.empty()) throw ConfigError(name + ": no devices");
    if (grid.empty()) throw ConfigError(name + ": empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ConfigError(name + ": grid must be strictly increasing");
    if (outputs.empty()) throw ConfigError(name + ": no outputs requested");
    if (has_series && series.empty()) throw ConfigError(name + ": empty series");
    if (has_series && series_axis == axis) throw ConfigError(name + ": series axis equals sweep axis");
    if (substeps < 1) throw ConfigError(name + ": substeps must be >= 1");
    if (trials < 1) throw ConfigError(name + ": trials must be >= 1");
    if (!(n_min <= -1 && n_max >= 0) && !(n_min == 0 && n_max == 0))
        throw ConfigError(name + ": ladder must contain n = 0 and n = -1");
    if (signal_frequency_hz <= 0.0) throw ConfigError(name + ": signal frequency must be positive");
    auto check_axis = [&](SweepAxis a, const std::vector<double>& v) {
        for (double x : v) {
            switch (a) {
            case SweepAxis::frequency:
            case SweepAxis::out_of_band_impedance:
                if (!(x > 0.0)) throw ConfigError(name + ": " + axis_name(a) + " values must be positive");
                break;
            case SweepAxis::drive:
            case SweepAxis::loss_tangent:
            case SweepAxis::sigma_ic:
                if (!(x >= 0.0)) throw ConfigError(name + ": " + axis_name(a) + " values must be >= 0");
                break;
            case SweepAxis::device_length:
                if (!(x >= 1.0) || x != std::floor(x)) throw ConfigError(name + ": device lengths must be whole cells");
                break;
            }
        }
    };
    check_axis(axis, grid);
    if (has_series) check_axis(series_axis, series);
}

bool Scenario::wants(Output o) const { return std::find(outputs.begin(), outputs.end(), o) != outputs.end(); }

std::vector<double> parse_grid(const std::string& text) {
    const std::string t = trim_copy(text);
    if (!t.empty() && t.front() == '[') {
        std::vector<double> out;
        for (const auto& item : split_list(t)) {
            const Directive d = parse_directive("v(" + item + ")");
            if (d.args.size() != 1) throw ConfigError("grid list entries must be numbers");
            out.push_back(d.args[0]);
        }
        return out;
    }
    const Directive d = parse_directive(t);
    if ((d.name != "linspace" && d.name != "logspace") || d.args.size() != 3)
        throw ConfigError("grid must be linspace(a,b,n), logspace(a,b,n) or a list");
    const double a = d.args[0], b = d.args[1];
    const int n = static_cast<int>(d.args[2]);
    if (n < 1 || n != d.args[2]) throw ConfigError("grid point count must be a positive integer");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = n == 1 ? a : a + (b - a) * i / (n - 1);
        out[static_cast<std::size_t>(i)] = d.name == "logspace" ? std::pow(10.0, u) : u;
    }
    return out;
}

std::vector<Scenario> parse_scenarios(const std::string& text, const std::string& base_dir,
                                      const std::string& origin) {
    std::string shared;
    std::vector<std::pair<std::string, std::string>> sections;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim_copy(line);
        if (t.size() > 2 && t.front() == '[' && t.back() == ']' && t.find('=') == std::string::npos) {
            sections.emplace_back(t.substr(1, t.size() - 2), "");
            continue;
        }
        (sections.empty() ? shared : sections.back().second) += line + "\n";
    }
    if (sections.empty()) sections.emplace_back(std::filesystem::path(origin).stem().string(), "");
    std::vector<Scenario> out;
    for (const auto& [name, body] : sections) {
        // Section keys override shared ones.
        KeyValueFile base = KeyValueFile::parse(shared, origin);
        KeyValueFile local = KeyValueFile::parse(body, origin + ":" + name);
        std::string merged;
        for (const auto& [k, v] : base.values())
            if (!local.has(k)) merged += k + " = " + v + "\n";
        for (const auto& [k, v] : local.values()) merged += k + " = " + v + "\n";
        out.push_back(scenario_from_keys(KeyValueFile::parse(merged, origin + ":" + name), name, base_dir));
    }
    return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    if (preset_texts().count(path)) return preset_scenarios(path);
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenarios(ss.str(), std::filesystem::path(path).parent_path().string(), path);
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& kv : preset_texts()) out.push_back(kv.first);
    std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
        return std::stoi(a.substr(3)) < std::stoi(b.substr(3));
    });
    return out;
}

std::string preset_text(const std::string& name) {
    const auto it = preset_texts().find(name);
    if (it == preset_texts().end()) throw ConfigError("unknown preset '" + name + "'");
    return it->second;
}

std::vector<Scenario> preset_scenarios(const std::string& name) { return parse_scenarios(preset_text(name), "", name); }

namespace {

struct PointKey {
    std::size_t device = 0;
    double series_value = 0.0;
    double axis_value = 0.0;
    int trial = 0;
};

// Applies one axis value to the mutable pieces of a point.
struct PointState {
    DeviceDescription dev;
    double signal_hz = 0.0, pump_hz = 0.0, drive = 0.0, loss = -1.0, oob = 50.0;
    double sigma = 0.0;
    int length = 0;
};

void apply_axis(PointState& st, SweepAxis a, double v) {
    switch (a) {
    case SweepAxis::frequency: st.signal_hz = v; break;
    case SweepAxis::drive: st.drive = v; break;
    case SweepAxis::loss_tangent: st.loss = v; break;
    case SweepAxis::out_of_band_impedance: st.oob = v; break;
    case SweepAxis::device_length: st.length = static_cast<int>(v); break;
    case SweepAxis::sigma_ic: st.sigma = v; break;
    }
}

int ladder_index_count(int m, int& n_min, int& n_max) {
    if (m < 1) throw ConfigError("mode count must be >= 1");
    if (m == 1) {
        n_min = n_max = 0;
    } else {
        n_min = -((m + 1) / 2);
        n_max = m / 2 - 1;
    }
    return m;
}

}  // namespace

PointSetup setup_point(const Scenario& s, const DeviceDescription& dev, double series_value, double axis_value,
                       int trial) {
    PointState st;
    st.dev = dev;
    st.signal_hz = s.signal_frequency_hz;
    st.pump_hz = s.pump_frequency_hz > 0.0 ? s.pump_frequency_hz : dev.pump_frequency_hz;
    st.drive = s.drive > 0.0 ? s.drive : dev.nominal_drive;
    st.loss = s.loss_tangent;
    st.oob = s.out_of_band_impedance;
    st.sigma = s.sigma_ic > 0.0 ? s.sigma_ic : dev.perturb_sigma;
    st.length = dev.spec.length_cells;
    if (s.has_series) apply_axis(st, s.series_axis, series_value);
    apply_axis(st, s.axis, axis_value);

    if (st.pump_hz <= 0.0) throw ConfigError("device '" + dev.name + "' has no pump frequency");
    if (st.length != dev.spec.length_cells) {
        if (st.length < dev.spec.length_cells) throw ConfigError("device_length below the base device length");
        st.dev.spec = extend_center(dev.spec, st.length - dev.spec.length_cells);
    }
    st.dev.perturb_sigma = st.sigma;
    // Scenario trials draw seed + trial; a device's own seed applies only to single runs.
    if (s.trials > 1 || s.sigma_ic > 0.0 || (s.has_series && s.series_axis == SweepAxis::sigma_ic) ||
        s.axis == SweepAxis::sigma_ic)
        st.dev.perturb_seed = s.seed + static_cast<std::uint64_t>(trial);

    PointSetup ps;
    ps.profile = device_profile(st.dev);
    if (st.loss >= 0.0) ps.profile.loss_tangent = st.loss;
    const double wp = ps.profile.to_normalized_frequency(st.pump_hz);
    const std::string kmode = s.wavevector.empty() ? dev.wavevector : s.wavevector;
    ps.pump = solve_pump(ps.profile, wp, st.drive,
                         kmode == "fitted" ? WavevectorMode::fitted_polynomial : WavevectorMode::adiabatic_formula);
    ps.ladder = build_mode_ladder(ps.profile.to_normalized_frequency(st.signal_hz), wp, s.n_min, s.n_max);
    ps.options.substeps = s.substeps;
    ps.options.integrator = s.integrator;
    ps.options.forward_backward = s.forward_backward;
    ps.options.port.in_band = s.port_impedance;
    ps.options.port.out_of_band = st.oob;
    ps.options.port.band_limit_hz = s.band_limit_hz;
    return ps;
}

namespace {

void evaluate(const Scenario& s, const PointSetup& ps, PointResult& out) {
    const ScatteringResult r = solve_scattering(ps.profile, ps.pump, ps.ladder, ps.options);
    out.residual = pseudo_unitarity_residual(r);
    out.lossy = r.lossy();
    out.condition = r.condition;
    const GainReflection g = gain_and_reflection(r);
    out.gain_db = g.signal_gain_db;
    out.reflection_db = g.signal_reflection_db;
    const auto in = NoiseInputs::vacuum(2 * ps.ladder.m());
    const QuantumEfficiency q = quantum_efficiency(r, in);
    out.eta = q.eta;
    out.eta_bar = q.eta_bar;
    out.added_noise = q.added_noise;
    if (s.wants(Output::noise_budget)) {
        const NoiseBudget b = noise_decomposition(r, in);
        const int sig = ps.ladder.signal_slot();
        const int idl = ps.ladder.m() > 1 ? ps.ladder.idler_slot() : -1;
        for (const auto& f : b.flows) {
            const double w = b.total > 0.0 ? f.weight / b.total : 0.0;
            if (f.loss_port)
                out.loss_share += w;
            else if (f.slot == sig)
                out.signal_share += w;
            else if (f.slot == idl)
                out.idler_share += w;
            else
                out.sideband_share += w;
        }
    }
    if (s.wants(Output::pump_reflection)) out.pump_reflection_db = pump_reflection_db(ps.pump, s.port_impedance);
    if (s.wants(Output::p1db)) {
        const double g0 = std::norm(r.s0(ps.ladder.signal_slot(), ps.ladder.signal_slot()));
        const double ip = ps.pump.drive[static_cast<std::size_t>(ps.profile.reference_cell)] * ps.profile.i0_ref;
        out.p1db_dbm = g0 > 1.0 ? estimate_dynamic_range(g0, ip, ps.pump.impedance.front()) : std::nan("");
    }
    if (s.wants(Output::floquet)) {
        const int ref = ps.profile.reference_cell;
        const double kp = ps.pump.wavevector[static_cast<std::size_t>(ref)];
        const int len = static_cast<int>(std::ceil(kPi / kp)) + 2;
        const NormalizedProfile fp = frozen_profile(ps.profile, ref, len);
        PumpSolution pump = solve_pump(fp, ps.pump.pump_frequency, ps.pump.drive[static_cast<std::size_t>(ref)],
                                       WavevectorMode::adiabatic_formula);
        // Keep the wavevector the full solve used at this cell.
        std::fill(pump.wavevector.begin(), pump.wavevector.end(), kp);
        for (std::size_t j = 0; j < pump.accumulated_phase.size(); ++j) pump.accumulated_phase[j] = kp * j;
        const LineModel lm(fp, pump, ps.ladder, ps.options);
        const FloquetAnalysis fa = analyze_floquet(lm);
        const FloquetClassification c = classify_modes(fa);
        out.gain_coefficient = c.amplifying >= 0 ? fa.exponents(c.amplifying).real() : 0.0;
        out.spectral_gap = std::isfinite(c.spectral_gap) ? c.spectral_gap : 0.0;
        out.unstable_exponents = static_cast<int>(std::count_if(c.labels.begin(), c.labels.end(),
                                                                [](FloquetLabel l) { return l != FloquetLabel::stable; }));
    }
    out.ok = true;
}

}  // namespace

std::size_t ScenarioResult::failures() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const PointResult& p) { return !p.ok && !p.excluded; }));
}

double residual_tolerance(bool lossy) { return lossy ? 1e-6 : 1e-9; }

std::size_t ScenarioResult::invariant_violations() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const PointResult& p) {
        return p.ok && !(p.residual < residual_tolerance(p.lossy));
    }));
}

std::size_t ScenarioResult::exclusions() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const PointResult& p) { return p.excluded; }));
}

double ScenarioResult::max_residual() const {
    double r = 0.0;
    for (const auto& p : points)
        if (p.ok) r = std::max(r, p.residual);
    return r;
}

ScenarioResult run_scenario(const Scenario& s, const RunOptions& opt) {
    s.validate();
    std::vector<PointKey> keys;
    const std::vector<double> series = s.has_series ? s.series : std::vector<double>{0.0};
    for (double sv : series)
        for (std::size_t d = 0; d < s.devices.size(); ++d)
            for (double av : s.grid)
                for (int t = 0; t < s.trials; ++t) keys.push_back({d, sv, av, t});

    ScenarioResult res;
    res.scenario = s;
    res.points.resize(keys.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < keys.size(); i = next++) {
            const PointKey& k = keys[i];
            PointResult& p = res.points[i];
            p.index = i;
            p.device = s.devices[k.device].name;
            p.series_value = k.series_value;
            p.axis_value = k.axis_value;
            p.trial = k.trial;
            try {
                evaluate(s, setup_point(s, s.devices[k.device], k.series_value, k.axis_value, k.trial), p);
            } catch (const LadderError& e) {
                p.error = e.what();
                p.excluded = true;
            } catch (const ConfigError& e) {
                p.error = e.what();
                p.error_kind = 1;
            } catch (const InvariantError& e) {
                p.error = e.what();
                p.error_kind = 3;
            } catch (const std::exception& e) {
                p.error = e.what();
                p.error_kind = 2;
            }
        }
    };
    const int nt = std::max(1, std::min<int>(opt.threads, static_cast<int>(keys.size())));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return res;
}

namespace {

std::string axis_column(SweepAxis a) {
    switch (a) {
    case SweepAxis::frequency: return "frequency_GHz";
    case SweepAxis::drive: return "drive_dimensionless";
    case SweepAxis::loss_tangent: return "loss_tangent_dimensionless";
    case SweepAxis::out_of_band_impedance: return "out_of_band_impedance_ohm";
    case SweepAxis::device_length: return "device_length_cells";
    case SweepAxis::sigma_ic: return "sigma_ic_dimensionless";
    }
    return "axis";
}

double axis_display(SweepAxis a, double v) { return a == SweepAxis::frequency ? v / 1e9 : v; }

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::vector<std::string> csv_columns(const Scenario& s) {
    std::vector<std::string> c{"scenario", "device"};
    if (s.has_series) c.push_back("series_" + axis_column(s.series_axis));
    c.push_back(axis_column(s.axis));
    c.push_back("trial");
    c.push_back("status");
    if (s.wants(Output::gain)) c.push_back("gain_dB");
    if (s.wants(Output::reflection)) c.push_back("reflection_dB");
    if (s.wants(Output::eta_bar)) {
        c.push_back("eta_dimensionless");
        c.push_back("eta_bar_dimensionless");
        c.push_back("added_noise_quanta");
    }
    if (s.wants(Output::noise_budget)) {
        c.push_back("signal_share_dimensionless");
        c.push_back("idler_share_dimensionless");
        c.push_back("sideband_share_dimensionless");
        c.push_back("loss_share_dimensionless");
    }
    if (s.wants(Output::pump_reflection)) c.push_back("pump_reflection_dB");
    if (s.wants(Output::p1db)) c.push_back("p1db_dBm");
    if (s.wants(Output::floquet)) {
        c.push_back("gain_coefficient_per_cell");
        c.push_back("spectral_gap_per_cell");
        c.push_back("unstable_exponents_count");
    }
    c.push_back("residual_dimensionless");
    c.push_back("condition_dimensionless");
    return c;
}

std::vector<std::string> csv_row(const Scenario& s, const PointResult& p) {
    std::vector<std::string> r{s.name, p.device};
    if (s.has_series) r.push_back(num(axis_display(s.series_axis, p.series_value)));
    r.push_back(num(axis_display(s.axis, p.axis_value)));
    r.push_back(std::to_string(p.trial));
    r.push_back(p.ok ? "ok" : (p.excluded ? "excluded: " : "error: ") + p.error);
    auto v = [&](double x) { return p.ok ? num(x) : std::string("nan"); };
    if (s.wants(Output::gain)) r.push_back(v(p.gain_db));
    if (s.wants(Output::reflection)) r.push_back(v(p.reflection_db));
    if (s.wants(Output::eta_bar)) {
        r.push_back(v(p.eta));
        r.push_back(v(p.eta_bar));
        r.push_back(v(p.added_noise));
    }
    if (s.wants(Output::noise_budget)) {
        r.push_back(v(p.signal_share));
        r.push_back(v(p.idler_share));
        r.push_back(v(p.sideband_share));
        r.push_back(v(p.loss_share));
    }
    if (s.wants(Output::pump_reflection)) r.push_back(v(p.pump_reflection_db));
    if (s.wants(Output::p1db)) r.push_back(v(p.p1db_dbm));
    if (s.wants(Output::floquet)) {
        r.push_back(v(p.gain_coefficient));
        r.push_back(v(p.spectral_gap));
        r.push_back(p.ok ? std::to_string(p.unstable_exponents) : "nan");
    }
    r.push_back(v(p.residual));
    r.push_back(v(p.condition));
    return r;
}

std::vector<TrialStatistics> trial_statistics(const ScenarioResult& r) {
    std::vector<TrialStatistics> out;
    const auto& pts = r.points;
    const auto trials = static_cast<std::size_t>(r.scenario.trials);
    for (std::size_t i = 0; i + trials <= pts.size(); i += trials) {
        TrialStatistics t;
        t.device = pts[i].device;
        t.series_value = pts[i].series_value;
        t.axis_value = pts[i].axis_value;
        std::vector<double> g, rf, eb;
        for (std::size_t k = i; k < i + trials; ++k)
            if (pts[k].ok) {
                g.push_back(pts[k].gain_db);
                rf.push_back(pts[k].reflection_db);
                eb.push_back(pts[k].eta_bar);
            }
        t.samples = static_cast<int>(g.size());
        if (!g.empty()) {
            t.gain_p10 = percentile(g, 0.1), t.gain_median = percentile(g, 0.5), t.gain_p90 = percentile(g, 0.9);
            t.reflection_p10 = percentile(rf, 0.1), t.reflection_median = percentile(rf, 0.5),
            t.reflection_p90 = percentile(rf, 0.9);
            t.eta_bar_p10 = percentile(eb, 0.1), t.eta_bar_median = percentile(eb, 0.5),
            t.eta_bar_p90 = percentile(eb, 0.9);
        }
        out.push_back(t);
    }
    return out;
}

std::vector<ConvergenceRow> convergence_report(const Scenario& s) {
    s.validate();
    std::vector<ConvergenceRow> rows;
    const double av = s.axis == SweepAxis::frequency && s.grid.front() <= s.signal_frequency_hz &&
                              s.signal_frequency_hz <= s.grid.back()
                          ? s.signal_frequency_hz
                          : s.grid[s.grid.size() / 2];
    const double sv = s.has_series ? s.series.front() : 0.0;
    for (const auto& dev : s.devices) {
        auto measure = [&](const Scenario& sc, const SolverOptions* override_opts) {
            PointSetup ps = setup_point(sc, dev, sv, av, 0);
            if (override_opts) {
                ps.options.noise_samples_per_cell = override_opts->noise_samples_per_cell;
                ps.options.substeps = override_opts->substeps;
            }
            const ScatteringResult r = solve_scattering(ps.profile, ps.pump, ps.ladder, ps.options);
            return std::pair{gain_and_reflection(r).signal_gain_db, quantum_efficiency(r).eta};
        };
        auto add = [&](const std::string& study, const std::string& qty, double a, double b, double thr,
                       const std::string& note) {
            ConvergenceRow row{dev.name, av, study, qty, a, b, std::abs(b - a), thr, std::abs(b - a) < thr, note};
            rows.push_back(row);
        };
        try {
            const auto base = measure(s, nullptr);

            // Mode count: double m, backing off while the extra sidebands sit above the band edge.
            Scenario wide = s;
            const int m = s.n_max - s.n_min + 1;
            std::string note;
            int target = 2 * m;
            for (; target > m; --target) {
                ladder_index_count(target, wide.n_min, wide.n_max);
                try {
                    measure(wide, nullptr);
                    break;
                } catch (const LadderError&) {
                }
            }
            if (target > m) {
                if (target != 2 * m) note = "m=" + std::to_string(2 * m) + " exceeds the band edge; used m=" + std::to_string(target);
                add("modes", "gain_dB", base.first, measure(wide, nullptr).first, 0.05, note);
            } else {
                add("modes", "gain_dB", base.first, base.first, 0.05, "no wider valid ladder");
            }

            SolverOptions fine;
            fine.substeps = 2 * s.substeps;
            fine.noise_samples_per_cell = 2;
            add("substeps", "gain_dB", base.first, measure(s, &fine).first, 0.01, "");

            SolverOptions quad;
            quad.substeps = s.substeps;
            quad.noise_samples_per_cell = 4;
            add("quadrature", "eta", base.second, measure(s, &quad).second, 1e-5, "");
        } catch (const std::exception& e) {
            rows.push_back({dev.name, av, "all", "error", 0, 0, 0, 0, false, e.what()});
        }
    }
    return rows;
}

void ladder_for_mode_count(int m, int& n_min, int& n_max) { ladder_index_count(m, n_min, n_max); }

}  // namespace twpa
