#pragma once

#include <functional>
#include <limits>

#include "twpa/circuit.hpp"
#include "twpa/modes.hpp"
#include "twpa/types.hpp"

namespace twpa {

// Profile values at one position along the line.
struct LocalCell {
    double mu = 1.0;
    double nu = 1.0;
    double gamma_c = 0.0;
    double cc_ztlr = 0.0;
    double amplitude = 0.0;  // A_px0
};

LocalCell local_cell(const NormalizedProfile& p, int j, double amplitude = 0.0);

double pmr_factor(double omega, const NormalizedProfile& p);

// Diagonal capacitance entry for one (normalized) frequency.
double capacitance_entry(double omega, const LocalCell& c, const NormalizedProfile& p);
RVec assemble_capacitance(const ModeLadder& ladder, const LocalCell& c, const NormalizedProfile& p);

// Rotating-frame inverse inductance: mu J_{2(c-r)}(A) - delta_rc mu beta w_r^2 (real symmetric).
Eigen::MatrixXd assemble_inverse_inductance(const ModeLadder& ladder, double amplitude, double mu, double beta);

// Same matrix with the pump phase restored: element (r, c) times exp(2i (r - c) phase).
CMat inverse_inductance_with_phase(const ModeLadder& ladder, double amplitude, double mu, double beta,
                                   double pump_phase);

RVec nonlinear_impedance(const Eigen::MatrixXd& linv, const RVec& cap);

struct ModeMatrices {
    RVec w;
    RVec cap;
    Eigen::MatrixXd linv;
    Eigen::MatrixXd l;
    RVec z;
};

ModeMatrices assemble_mode_matrices(const ModeLadder& ladder, const LocalCell& c, const NormalizedProfile& p);

// 2m x 2m coupling matrix in the rotating frame. `half_log_slope` is Z_x / (2 Z) per mode.
CMat assemble_coupling(const ModeMatrices& mm, const RVec& half_log_slope, bool forward_backward = true);

// Lab-frame coupling: E K0 E^dagger with E = diag(exp(2 i n phase)) on both blocks.
CMat to_lab_frame(const CMat& k0, const ModeLadder& ladder, double pump_phase);

struct PortImpedance {
    double in_band = 50.0;
    double out_of_band = 50.0;
    double band_limit_hz = std::numeric_limits<double>::infinity();
    double operator()(double hz) const { return std::abs(hz) <= band_limit_hz ? in_band : out_of_band; }
};

// [[BC11, BC12], [BC12, BC11]] from normalized device and port impedances.
CMat boundary_matrix(const RVec& z_device, const RVec& z_port);

}  // namespace twpa
