#pragma once

#include <vector>

#include "twpa/circuit.hpp"
#include "twpa/coupling.hpp"

namespace twpa {

enum class WavevectorMode { fitted_polynomial, adiabatic_formula };

struct PumpSolution {
    double pump_frequency = 0.0;  // normalized
    std::vector<double> drive;        // I_pn per cell
    std::vector<double> amplitude;    // A_px0 per cell
    std::vector<double> wavevector;   // rad/cell
    std::vector<double> accumulated_phase;  // integral of k_p at cell boundaries 0..L
    std::vector<double> impedance;    // Z_p,nl per cell, ohm
};

// Largest drive reachable on the monotone branch, and the A where it occurs.
double max_drive(double beta, double omega_p, double* turning_amplitude = nullptr);
double drive_from_amplitude(double amplitude, double beta, double omega_p);
double amplitude_from_drive(double drive, double beta, double omega_p);

double fitted_wavevector(double drive);
double adiabatic_wavevector(double amplitude, double mu, double pump_capacitance, double beta, double omega_p);
double pump_capacitance(double omega_p, const LocalCell& c, const NormalizedProfile& p);
// Normalized to z_char.
double pump_impedance(double amplitude, double mu, double pump_capacitance, double beta, double omega_p);

// drive_ref is I_pn at the reference cell; elsewhere I_pn = drive_ref / mu.
PumpSolution solve_pump(const NormalizedProfile& p, double omega_p, double drive_ref, WavevectorMode mode);

double pump_reflection_db(const PumpSolution& pump, double z_port_ohm);

}  // namespace twpa
