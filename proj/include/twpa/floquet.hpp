#pragma once

#include <string>
#include <vector>

#include "twpa/solver.hpp"

namespace twpa {

// Uniform copy of cell j, `length` cells long. Used for constant-drive Floquet
// analysis and for the frozen-drive picture of tapered devices.
NormalizedProfile frozen_profile(const NormalizedProfile& p, int j, int length);

struct FloquetAnalysis {
    double period = 0.0;     // x_T = pi / k_p, cells
    double wavevector = 0.0;
    CMat generator;          // rotating-frame G, constant over the segment
    CMat monodromy;          // lab-frame Pi(x_T)
    CVec exponents;          // principal log(eig M0) / x_T, sorted
    CMat eigenbasis;         // unit columns, same order
    CVec generator_exponents;  // eig(G) in the same order (unwrapped branch)
    std::vector<int> branch;   // Im r = Im r_principal + 2 pi branch / x_T
    double reconstruction_error = 0.0;  // |M0 - V exp(x_T L) V^-1|_max
    double liouville_residual = 0.0;    // |sum r - tr K| modulo 2 pi i / x_T
    double min_relative_gap = 0.0;      // smallest |l_a - l_b| / max|l|
    ModeLadder ladder;
};

// Floquet transfer over one period of a constant-drive model.
CMat monodromy(const LineModel& model, int steps_per_cell = 8, Integrator integrator = Integrator::magnus4);

// Exponents and eigenbasis for the monodromy of `model`. Throws NumericalError on
// eigenvalue clusters closer than 1e-8 (relative).
FloquetAnalysis analyze_floquet(const LineModel& model, int steps_per_cell = 8);

// P(x) = Pi(x) V exp(-x L) V^-1, periodic with P(0) = P(x_T) = I.
CMat periodic_part(const FloquetAnalysis& fa, double x);

// Q(x) = (P(x) V)^-1 A(x) for a lab-frame state at x.
CVec floquet_decompose(const CVec& state, const FloquetAnalysis& fa, double x);

enum class FloquetLabel { amplifying, deamplifying, stable };
std::string label_name(FloquetLabel l);

struct FloquetClassification {
    std::vector<FloquetLabel> labels;
    Eigen::MatrixXd slot_weights;  // |V_k alpha|^2, 2m x 2m
    Eigen::MatrixXd mode_weights;  // forward + backward per ladder index, m x 2m
    int amplifying = -1;           // column of r_a, or -1 below bifurcation
    int deamplifying = -1;
    double spectral_gap = 0.0;     // min distance of r_a, r_d to every other exponent
};

FloquetClassification classify_modes(const FloquetAnalysis& fa, double tol = 1e-6);

}  // namespace twpa
