#pragma once

#include <string>
#include <vector>

#include "twpa/solver.hpp"

namespace twpa {

double to_db(double power_ratio);

struct GainReflection {
    RVec gain_db;         // |S0[i, i]|^2 per forward slot
    RVec reflection_db;   // |S0[m + i, i]|^2 per forward slot
    double signal_gain_db = 0.0;
    double signal_reflection_db = 0.0;
};

GainReflection gain_and_reflection(const ScatteringResult& r);

// Fluctuation variances |dA|^2 per input slot and per loss port; vacuum is 1/2.
struct NoiseInputs {
    RVec input_variance;
    RVec loss_variance;
    static NoiseInputs vacuum(int slots);
};

struct QuantumEfficiency {
    double gain = 0.0;          // linear signal power gain
    double eta = 0.0;
    double eta_ideal = 0.0;     // 1/(2 - 1/G)
    double eta_bar = 0.0;       // 1 - eta/eta_ideal
    double added_noise = 0.0;   // Cave's added-noise number, vacuum inputs
    double output_variance = 0.0;
    bool below_unity_gain = false;  // eta_bar is outside its defining regime
};

QuantumEfficiency quantum_efficiency(const ScatteringResult& r, const NoiseInputs& in);
QuantumEfficiency quantum_efficiency(const ScatteringResult& r);

struct NoiseFlow {
    std::string source;  // e.g. "in+ n=0", "loss- n=-1"
    int slot = 0;
    bool loss_port = false;
    double weight = 0.0;
};

struct NoiseBudget {
    std::vector<NoiseFlow> flows;  // ordered: inputs then loss ports, slot order
    double total = 0.0;
    double signal_share = 0.0;  // equals eta
};

NoiseBudget noise_decomposition(const ScatteringResult& r, const NoiseInputs& in);

// P_1dB in dBm from pump-depletion compression G = G0 / (1 + 2 G0 Ps / Pp), Pp = Ip^2 Zp / 2.
double estimate_dynamic_range(double g0_linear, double pump_current, double pump_impedance);

// 3 dB bandwidth in Hz of the contiguous region around the peak, from a sampled spectrum.
double bandwidth_3db(const std::vector<double>& freq_hz, const std::vector<double>& gain_db);

}  // namespace twpa
