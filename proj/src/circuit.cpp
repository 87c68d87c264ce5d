#include "twpa/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace twpa {

namespace {

void require_positive(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + " must be strictly positive");
}

}  // namespace

void CircuitSpec::validate() const {
    if (length_cells <= 0) throw ConfigError("length_cells must be positive");
    if (pmr_period < 1) throw ConfigError("pmr_period must be >= 1");
    if (junctions_per_cell < 1) throw ConfigError("junctions_per_cell must be >= 1");
    const auto n = static_cast<std::size_t>(length_cells);
    if (critical_current.size() != n || junction_capacitance.size() != n || ground_capacitance.size() != n ||
        coupling_capacitance.size() != n)
        throw ConfigError("profile lengths must equal length_cells");
    require_positive(critical_current, "critical current");
    require_positive(junction_capacitance, "junction capacitance");
    require_positive(ground_capacitance, "ground capacitance");
    require_positive(coupling_capacitance, "coupling capacitance");
    if (!(resonator_inductance > 0.0) || !(resonator_capacitance > 0.0))
        throw ConfigError("resonator inductance and capacitance must be strictly positive");
    if (!(loss_tangent >= 0.0)) throw ConfigError("loss_tangent must be >= 0");
    if (pmr_kind != PmrKind::lumped_lc) {
        if (tlr_impedance.size() != n) throw ConfigError("tlr impedance profile length must equal length_cells");
        require_positive(tlr_impedance, "tlr impedance");
        if (!(tlr_phase_velocity > 0.0)) throw ConfigError("tlr phase velocity must be positive");
    }
}

CircuitSpec CircuitSpec::homogeneous(double i0, double cj, double cg, double cc, double lr, double cr, int length,
                                     int period, int junctions) {
    CircuitSpec s;
    const auto n = static_cast<std::size_t>(std::max(length, 0));
    s.critical_current.assign(n, i0);
    s.junction_capacitance.assign(n, cj);
    s.ground_capacitance.assign(n, cg);
    s.coupling_capacitance.assign(n, cc);
    s.resonator_inductance = lr;
    s.resonator_capacitance = cr;
    s.length_cells = length;
    s.pmr_period = period;
    s.junctions_per_cell = junctions;
    return s;
}

int argmax_cell(const std::vector<double>& v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

NormalizedProfile normalize_circuit(const CircuitSpec& spec, int reference_cell) {
    spec.validate();
    if (reference_cell < 0 || reference_cell >= spec.length_cells) throw ConfigError("reference cell out of range");
    const auto r = static_cast<std::size_t>(reference_cell);
    const double nj = spec.junctions_per_cell;

    NormalizedProfile p;
    p.length = spec.length_cells;
    p.reference_cell = reference_cell;
    p.pmr_period = spec.pmr_period;
    p.junctions_per_cell = spec.junctions_per_cell;
    p.pmr_kind = spec.pmr_kind;
    p.loss_tangent = spec.loss_tangent;
    p.i0_ref = spec.critical_current[r];
    p.cg0 = spec.ground_capacitance[r];
    p.lj0 = nj * kReducedFluxQuantum / p.i0_ref;
    p.ej0 = kReducedFluxQuantum * p.i0_ref;
    p.omega_c = 1.0 / std::sqrt(p.lj0 * p.cg0);
    p.z_char = std::sqrt(p.lj0 / p.cg0);
    p.beta = spec.junction_capacitance[r] / nj / p.cg0;
    p.lr_tilde = spec.resonator_inductance / p.lj0;
    p.cr_tilde = spec.resonator_capacitance / p.cg0;

    const double plasma_ratio = spec.junction_capacitance[r] / spec.critical_current[r];
    const double period = spec.pmr_period;
    p.mu.resize(spec.critical_current.size());
    p.nu.resize(p.mu.size());
    p.gamma_c.resize(p.mu.size());
    for (std::size_t j = 0; j < p.mu.size(); ++j) {
        p.mu[j] = spec.critical_current[j] / p.i0_ref;
        p.nu[j] = spec.ground_capacitance[j] / p.cg0;
        p.gamma_c[j] = spec.coupling_capacitance[j] / (period * p.cg0);
        const double ratio = spec.junction_capacitance[j] / spec.critical_current[j];
        if (std::abs(ratio / plasma_ratio - 1.0) > 1e-9)
            throw ConfigError("junction capacitance must scale with critical current (constant plasma frequency)");
    }
    p.omega_r = 1.0 / std::sqrt(p.lr_tilde * p.cr_tilde);
    p.omega_rt = 1.0 / std::sqrt(p.lr_tilde * (p.cr_tilde + p.gamma_c[r]));

    if (spec.pmr_kind != PmrKind::lumped_lc) {
        p.tlr_phase_velocity = spec.tlr_phase_velocity;
        p.cc_ztlr.resize(p.mu.size());
        for (std::size_t j = 0; j < p.mu.size(); ++j)
            p.cc_ztlr[j] = spec.coupling_capacitance[j] * spec.tlr_impedance[j];
        p.tlr_length = spec.tlr_length;
        if (p.tlr_length <= 0.0) {
            // Put the stub pole on omega_rt of the lumped resonator with the same coupling.
            const double w_pole = p.omega_rt * p.omega_c;
            const double kl = std::atan(1.0 / (w_pole * p.cc_ztlr[r]));
            p.tlr_length = kl * p.tlr_phase_velocity / w_pole;
        }
    }
    return p;
}

CircuitSpec denormalize(const NormalizedProfile& p) {
    CircuitSpec s;
    const double nj = p.junctions_per_cell;
    s.length_cells = p.length;
    s.pmr_period = p.pmr_period;
    s.junctions_per_cell = p.junctions_per_cell;
    s.loss_tangent = p.loss_tangent;
    s.pmr_kind = p.pmr_kind;
    s.resonator_inductance = p.lr_tilde * p.lj0;
    s.resonator_capacitance = p.cr_tilde * p.cg0;
    for (int j = 0; j < p.length; ++j) {
        s.critical_current.push_back(p.mu[j] * p.i0_ref);
        s.junction_capacitance.push_back(p.beta * nj * p.cg0 * p.mu[j]);
        s.ground_capacitance.push_back(p.nu[j] * p.cg0);
        s.coupling_capacitance.push_back(p.gamma_c[j] * p.pmr_period * p.cg0);
    }
    if (p.pmr_kind != PmrKind::lumped_lc) {
        s.tlr_phase_velocity = p.tlr_phase_velocity;
        s.tlr_length = p.tlr_length;
        for (int j = 0; j < p.length; ++j) s.tlr_impedance.push_back(p.cc_ztlr[j] / s.coupling_capacitance[j]);
    }
    return s;
}

std::vector<double> gaussian_drive_profile(double peak_drive, int length, double fwhm_fraction) {
    if (!(peak_drive > 0.0)) throw ConfigError("gaussian peak drive must be positive");
    if (peak_drive >= 1.0) throw ConfigError("gaussian peak drive must be below 1 (pump exceeds critical current)");
    if (!(fwhm_fraction > 0.0)) throw ConfigError("gaussian fwhm fraction must be positive");
    if (length <= 0) throw ConfigError("length must be positive");
    const double sigma = fwhm_fraction * length / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double centre = 0.5 * length;
    std::vector<double> out(static_cast<std::size_t>(length));
    for (int j = 0; j < length; ++j) {
        const double d = j - centre;
        out[static_cast<std::size_t>(j)] = peak_drive * std::exp(-d * d / (2.0 * sigma * sigma));
    }
    return out;
}

CircuitSpec shape_for_drive(const CircuitSpec& reference, const std::vector<double>& drive) {
    if (drive.size() != reference.critical_current.size()) throw ConfigError("drive profile length mismatch");
    const double peak = *std::max_element(drive.begin(), drive.end());
    CircuitSpec s = reference;
    for (std::size_t j = 0; j < drive.size(); ++j) {
        if (!(drive[j] > 0.0)) throw ConfigError("drive profile must be strictly positive");
        const double k = peak / drive[j];
        s.critical_current[j] *= k;
        s.junction_capacitance[j] *= k;
        s.ground_capacitance[j] /= k;
        s.coupling_capacitance[j] /= k;
        if (j < s.tlr_impedance.size()) s.tlr_impedance[j] *= k;
    }
    return s;
}

std::vector<double> standard_normal_samples(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> eps(static_cast<std::size_t>(std::max(n, 0)));
    for (double& e : eps) e = dist(rng);
    return eps;
}

CircuitSpec perturb_critical_current(const CircuitSpec& spec, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
    CircuitSpec s = spec;
    if (sigma == 0.0) return s;
    const auto eps = standard_normal_samples(spec.length_cells, seed);
    for (std::size_t j = 0; j < eps.size(); ++j) {
        const double f = 1.0 + sigma * eps[j];
        if (!(f > 0.0)) throw ConfigError("perturbed critical current is not positive");
        s.critical_current[j] *= f;
        s.junction_capacitance[j] *= f;
    }
    return s;
}

NormalizedProfile perturb_critical_current(const NormalizedProfile& profile, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
    NormalizedProfile p = profile;
    if (sigma == 0.0) return p;
    const auto eps = standard_normal_samples(p.length, seed);
    for (std::size_t j = 0; j < eps.size(); ++j) {
        const double f = 1.0 + sigma * eps[j];
        if (!(f > 0.0)) throw ConfigError("perturbed critical current is not positive");
        p.mu[j] *= f;
    }
    return p;
}

}  // namespace twpa

namespace twpa {

double integrate_samples(const std::vector<double>& v, double x) {
    // Pieces: flat on [0, 1/2], linear between centres, flat after the last centre.
    if (x <= 0.0) return 0.0;
    const double n = static_cast<double>(v.size());
    if (x <= 0.5) return v.front() * x;
    double acc = 0.5 * v.front();
    const double last_centre = n - 0.5;
    const double upto = std::min(x, last_centre);
    std::size_t j = 0;
    while (static_cast<double>(j) + 1.5 <= upto) {
        acc += 0.5 * (v[j] + v[j + 1]);
        ++j;
    }
    const double rem = upto - (static_cast<double>(j) + 0.5);
    if (rem > 0.0) acc += rem * (v[j] + 0.5 * rem * (v[j + 1] - v[j]));
    if (x > last_centre) acc += (x - last_centre) * v.back();
    return acc;
}

}  // namespace twpa
