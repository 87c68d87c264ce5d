#pragma once

#include <cstdint>
#include <vector>

#include "twpa/types.hpp"

namespace twpa {

enum class PmrKind { lumped_lc, quarter_wave_tlr, coplanar_stub };

// Physical per-cell description, SI units.
struct CircuitSpec {
    std::vector<double> critical_current;
    std::vector<double> junction_capacitance;
    std::vector<double> ground_capacitance;
    std::vector<double> coupling_capacitance;
    double resonator_inductance = 0.0;
    double resonator_capacitance = 0.0;
    int pmr_period = 1;
    int junctions_per_cell = 1;
    int length_cells = 0;
    double loss_tangent = 0.0;
    PmrKind pmr_kind = PmrKind::lumped_lc;
    double tlr_phase_velocity = 1.3e8;
    std::vector<double> tlr_impedance;
    // Physical stub length; zero means derive it from the lumped resonator.
    double tlr_length = 0.0;

    void validate() const;
    static CircuitSpec homogeneous(double i0, double cj, double cg, double cc, double lr, double cr,
                                   int length, int period, int junctions = 1);
};

struct NormalizedProfile {
    int length = 0;
    int reference_cell = 0;
    std::vector<double> mu;
    std::vector<double> nu;
    std::vector<double> gamma_c;  // coupling capacitance per cell, averaged over the PMR period
    double beta = 0.0;
    double lr_tilde = 0.0;
    double cr_tilde = 0.0;
    double omega_c = 0.0;
    double z_char = 0.0;
    double ej0 = 0.0;
    double lj0 = 0.0;
    double cg0 = 0.0;
    double i0_ref = 0.0;
    double omega_r = 0.0;
    double omega_rt = 0.0;
    double loss_tangent = 0.0;
    int pmr_period = 1;
    int junctions_per_cell = 1;
    PmrKind pmr_kind = PmrKind::lumped_lc;
    // Distributed resonators: per-cell C_c*Z_tlr (seconds), stub length and velocity.
    std::vector<double> cc_ztlr;
    double tlr_length = 0.0;
    double tlr_phase_velocity = 0.0;

    double to_normalized_frequency(double hz) const { return 2.0 * kPi * hz / omega_c; }
    double to_hz(double w) const { return w * omega_c / (2.0 * kPi); }
};

NormalizedProfile normalize_circuit(const CircuitSpec& spec, int reference_cell);
CircuitSpec denormalize(const NormalizedProfile& p);

// I_pn(x) = peak exp(-(x-L/2)^2 / 2 sigma^2) sampled at cell centers.
std::vector<double> gaussian_drive_profile(double peak_drive, int length, double fwhm_fraction);

// Scales critical current, junction, ground and coupling capacitance so that a
// constant input pump current produces the requested drive profile.
CircuitSpec shape_for_drive(const CircuitSpec& reference, const std::vector<double>& drive);

std::vector<double> standard_normal_samples(int n, std::uint64_t seed);

// I_0 -> I_0 (1 + sigma eps), with C_J following the junction area.
CircuitSpec perturb_critical_current(const CircuitSpec& spec, double sigma, std::uint64_t seed);
NormalizedProfile perturb_critical_current(const NormalizedProfile& profile, double sigma,
                                           std::uint64_t seed);

int argmax_cell(const std::vector<double>& v);

// Per-cell samples live at cell centres j + 1/2; linear in between, flat past the ends.
inline double sample_at(const std::vector<double>& v, double x) {
    const double t = x - 0.5;
    if (t <= 0.0) return v.front();
    const auto last = static_cast<double>(v.size() - 1);
    if (t >= last) return v.back();
    const auto j = static_cast<std::size_t>(t);
    const double f = t - static_cast<double>(j);
    return v[j] + f * (v[j + 1] - v[j]);
}

// Exact integral of the sample_at interpolant over [0, x].
double integrate_samples(const std::vector<double>& v, double x);

}  // namespace twpa
