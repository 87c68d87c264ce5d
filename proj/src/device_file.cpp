#include "twpa/device_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace twpa {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double to_double(const std::string& raw, const std::string& key) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': not a number: '" + s + "'");
    return v;
}

std::vector<double> split_numbers(const std::string& body, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double(item, key));
    }
    return out;
}

PmrKind parse_kind(const std::string& s) {
    if (s == "lumped_lc") return PmrKind::lumped_lc;
    if (s == "quarter_wave_tlr") return PmrKind::quarter_wave_tlr;
    if (s == "coplanar_stub") return PmrKind::coplanar_stub;
    throw ConfigError("unknown pmr_kind '" + s + "'");
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::stringstream in(text);
    std::string line, pending_key, pending;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        // A list may continue over several lines until its closing bracket.
        if (!pending_key.empty()) {
            pending += " " + line;
            if (line.find(']') != std::string::npos) {
                kv.values_[pending_key] = trim(pending);
                pending_key.clear();
            }
            continue;
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (kv.values_.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
        if (!val.empty() && val.front() == '[' && val.find(']') == std::string::npos) {
            pending_key = key;
            pending = val;
            continue;
        }
        kv.values_[key] = val;
    }
    if (!pending_key.empty()) throw ConfigError(origin + ": unterminated list for key " + pending_key);
    return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

std::string KeyValueFile::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
    return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::number(const std::string& key) const { return to_double(get(key), key); }

double KeyValueFile::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long long KeyValueFile::integer_or(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != static_cast<double>(static_cast<long long>(v))) throw ConfigError("key '" + key + "' must be an integer");
    return static_cast<long long>(v);
}

std::vector<double> KeyValueFile::numbers(const std::string& key) const {
    std::string v = get(key);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError("key '" + key + "': malformed list");
        return split_numbers(v.substr(1, v.size() - 2), key);
    }
    return {to_double(v, key)};
}

std::string trim_copy(const std::string& s) { return trim(s); }

std::vector<std::string> split_list(const std::string& s) {
    std::string body = trim(s);
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') throw ConfigError("malformed list '" + s + "'");
        body = body.substr(1, body.size() - 2);
    }
    std::vector<std::string> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Directive parse_directive(const std::string& text) {
    Directive d;
    const std::string s = trim(text);
    const auto open = s.find('(');
    if (open == std::string::npos) {
        d.name = s;
        return d;
    }
    if (s.back() != ')') throw ConfigError("malformed directive '" + s + "'");
    d.name = trim(s.substr(0, open));
    d.args = split_numbers(s.substr(open + 1, s.size() - open - 2), d.name);
    return d;
}

DeviceDescription device_from_keys(const KeyValueFile& kv) {
    DeviceDescription dev;
    dev.name = kv.get_or("name", "device");
    const long long length = kv.integer_or("length", 0);
    if (length <= 0) throw ConfigError(kv.origin() + ": 'length' must be a positive integer");
    const auto n = static_cast<std::size_t>(length);

    auto per_cell = [&](const std::string& key, bool required, double fallback) {
        if (!kv.has(key)) {
            if (required) throw ConfigError(kv.origin() + ": missing key '" + key + "'");
            return std::vector<double>(n, fallback);
        }
        auto v = kv.numbers(key);
        if (v.size() == 1) return std::vector<double>(n, v[0]);
        if (v.size() != n) throw ConfigError(kv.origin() + ": '" + key + "' list length must equal length");
        return v;
    };

    CircuitSpec& s = dev.spec;
    s.length_cells = static_cast<int>(length);
    s.critical_current = per_cell("i0", true, 0.0);
    s.junction_capacitance = per_cell("cj", true, 0.0);
    s.ground_capacitance = per_cell("cg", true, 0.0);
    s.coupling_capacitance = per_cell("cc", true, 0.0);
    s.resonator_inductance = kv.number("lr");
    s.resonator_capacitance = kv.number("cr");
    s.pmr_period = static_cast<int>(kv.integer_or("pmr_period", 1));
    s.junctions_per_cell = static_cast<int>(kv.integer_or("junctions_per_cell", 1));
    s.loss_tangent = kv.number_or("loss_tangent", 0.0);
    s.pmr_kind = parse_kind(kv.get_or("pmr_kind", "lumped_lc"));
    s.tlr_phase_velocity = kv.number_or("tlr_velocity", 1.3e8);
    s.tlr_length = kv.number_or("tlr_length", 0.0);
    if (s.pmr_kind != PmrKind::lumped_lc) s.tlr_impedance = per_cell("tlr_impedance", true, 0.0);
    dev.nominal_drive = kv.number_or("drive", 0.0);

    const Directive prof = parse_directive(kv.get_or("profile", "homogeneous"));
    dev.profile = prof.name;
    if (prof.name == "gaussian") {
        if (prof.args.size() != 2) throw ConfigError("gaussian(peak, fwhm_frac) takes two arguments");
        const auto drive = gaussian_drive_profile(prof.args[0], s.length_cells, prof.args[1]);
        s = shape_for_drive(s, drive);
        if (dev.nominal_drive == 0.0) dev.nominal_drive = prof.args[0];
    } else if (prof.name != "homogeneous") {
        throw ConfigError("unknown profile directive '" + prof.name + "'");
    }
    s.validate();

    dev.pump_frequency_hz = kv.number_or("pump_frequency", 0.0);
    if (dev.pump_frequency_hz < 0.0) throw ConfigError(kv.origin() + ": pump_frequency must be positive");
    dev.wavevector = kv.get_or("wavevector", "adiabatic");
    if (dev.wavevector != "fitted" && dev.wavevector != "adiabatic")
        throw ConfigError(kv.origin() + ": wavevector must be 'fitted' or 'adiabatic'");

    if (kv.has("perturb")) {
        const Directive pert = parse_directive(kv.get("perturb"));
        if (pert.name != "perturb" || pert.args.size() != 2)
            throw ConfigError("expected perturb(sigma, seed)");
        if (pert.args[1] < 0 || pert.args[1] != static_cast<double>(static_cast<std::uint64_t>(pert.args[1])))
            throw ConfigError("perturb seed must be a non-negative integer");
        dev.perturb_sigma = pert.args[0];
        dev.perturb_seed = static_cast<std::uint64_t>(pert.args[1]);
        if (!(dev.perturb_sigma >= 0.0)) throw ConfigError("perturb sigma must be >= 0");
    }
    return dev;
}

NormalizedProfile device_profile(const DeviceDescription& dev) {
    const auto& i0 = dev.spec.critical_current;
    const int ref = static_cast<int>(std::min_element(i0.begin(), i0.end()) - i0.begin());
    return perturb_critical_current(normalize_circuit(dev.spec, ref), dev.perturb_sigma, dev.perturb_seed);
}

DeviceDescription load_device(const std::string& path) { return device_from_keys(KeyValueFile::load(path)); }

CircuitSpec extend_center(const CircuitSpec& spec, int extra) {
    if (extra < 0) throw ConfigError("cannot shorten a device by extension");
    CircuitSpec out = spec;
    const auto mid = static_cast<std::ptrdiff_t>(spec.length_cells / 2);
    auto grow = [&](std::vector<double>& v) {
        if (v.size() != static_cast<std::size_t>(spec.length_cells)) return;
        const double c = v[static_cast<std::size_t>(mid)];
        v.insert(v.begin() + mid, static_cast<std::size_t>(extra), c);
    };
    grow(out.critical_current);
    grow(out.junction_capacitance);
    grow(out.ground_capacitance);
    grow(out.coupling_capacitance);
    grow(out.tlr_impedance);
    out.length_cells += extra;
    return out;
}

}  // namespace twpa
