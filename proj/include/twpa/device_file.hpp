#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "twpa/circuit.hpp"

namespace twpa {

// Flat `key = value` text. '#' starts a comment; values may be bracketed lists.
class KeyValueFile {
public:
    static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
    static KeyValueFile load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    long long integer_or(const std::string& key, long long fallback) const;
    std::vector<double> numbers(const std::string& key) const;
    const std::map<std::string, std::string>& values() const { return values_; }
    const std::string& origin() const { return origin_; }

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

std::string trim_copy(const std::string& s);
// "a, b, c" or "[a, b, c]" -> trimmed items.
std::vector<std::string> split_list(const std::string& s);

struct Directive {
    std::string name;
    std::vector<double> args;
};
Directive parse_directive(const std::string& text);

struct DeviceDescription {
    std::string name;
    CircuitSpec spec;  // shaped, not perturbed
    std::string profile = "homogeneous";
    double nominal_drive = 0.0;  // I_pn at the reference cell, 0 if the file gives none
    double perturb_sigma = 0.0;
    std::uint64_t perturb_seed = 0;
    double pump_frequency_hz = 0.0;  // 0 if the file gives none
    std::string wavevector = "adiabatic";  // "fitted" or "adiabatic"
};

DeviceDescription device_from_keys(const KeyValueFile& kv);

// Normalized at the smallest-I_0 cell, then perturbed.
NormalizedProfile device_profile(const DeviceDescription& dev);
DeviceDescription load_device(const std::string& path);

// Inserts `extra` copies of the middle cell, lengthening the flat centre of the profile.
CircuitSpec extend_center(const CircuitSpec& spec, int extra);

}  // namespace twpa
