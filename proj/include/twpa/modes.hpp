#pragma once

#include <vector>

#include "twpa/circuit.hpp"

namespace twpa {

struct ModeLadder {
    double signal_frequency = 0.0;  // normalized
    double pump_frequency = 0.0;
    int n_min = 0;
    int n_max = 0;
    std::vector<double> frequencies;
    std::vector<double> signs;

    int m() const { return n_max - n_min + 1; }
    int slot(int n) const { return n - n_min; }
    int signal_slot() const { return slot(0); }
    int idler_slot() const { return slot(-1); }
    int index(int slot) const { return slot + n_min; }
};

ModeLadder build_mode_ladder(double omega_s, double omega_p, int n_min, int n_max);

enum class ModeFlag { ok, in_pmr_gap, above_cutoff };

struct ModeValidity {
    std::vector<ModeFlag> flags;
    double band_edge = 0.0;  // normalized
    bool all_ok() const;
};

// Undriven lattice band edge per cell, minimum over the device.
double linear_band_edge(const NormalizedProfile& p);
ModeValidity validate_modes(const ModeLadder& ladder, const NormalizedProfile& p);

}  // namespace twpa
