#include "twpa/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace twpa {

double to_db(double power_ratio) {
    if (!(power_ratio > 1e-20)) return -200.0;
    return 10.0 * std::log10(power_ratio);
}

GainReflection gain_and_reflection(const ScatteringResult& r) {
    const int m = r.ladder.m();
    GainReflection g;
    g.gain_db.resize(m);
    g.reflection_db.resize(m);
    for (int i = 0; i < m; ++i) {
        g.gain_db(i) = to_db(std::norm(r.s0(i, i)));
        g.reflection_db(i) = to_db(std::norm(r.s0(m + i, i)));
    }
    const int s = r.ladder.signal_slot();
    g.signal_gain_db = g.gain_db(s);
    g.signal_reflection_db = g.reflection_db(s);
    return g;
}

NoiseInputs NoiseInputs::vacuum(int slots) {
    NoiseInputs in;
    in.input_variance = RVec::Constant(slots, 0.5);
    in.loss_variance = RVec::Constant(slots, 0.5);
    return in;
}

namespace {

void check_inputs(const ScatteringResult& r, const NoiseInputs& in) {
    const auto n = r.s0.rows();
    if (in.input_variance.size() != n || in.loss_variance.size() != n)
        throw ConfigError("noise variances must cover all 2m slots");
    if (in.input_variance.minCoeff() < 0.0 || in.loss_variance.minCoeff() < 0.0)
        throw ConfigError("noise variances must be non-negative");
}

// Integral of Gamma_k |Sn[s,k]|^2 over x for each loss port k.
RVec loss_integrals(const ScatteringResult& r, int s) {
    const auto n = r.s0.rows();
    RVec acc = RVec::Zero(n);
    for (std::size_t q = 0; q < r.sn.size(); ++q) acc += r.sn_weights[q] * r.sn[q].row(s).cwiseAbs2().transpose();
    return acc.cwiseProduct(r.slot_loss);
}

}  // namespace

NoiseBudget noise_decomposition(const ScatteringResult& r, const NoiseInputs& in) {
    check_inputs(r, in);
    const int m = r.ladder.m();
    const int n = 2 * m;
    const int s = r.ladder.signal_slot();
    NoiseBudget b;
    auto name = [&](const char* kind, int slot) {
        const int mode = r.ladder.index(slot % m);
        return std::string(kind) + (slot < m ? "+" : "-") + " n=" + std::to_string(mode);
    };
    for (int k = 0; k < n; ++k)
        b.flows.push_back({name("in", k), k, false, std::norm(r.s0(s, k)) * in.input_variance(k)});
    if (r.lossy()) {
        const RVec li = loss_integrals(r, s);
        for (int k = 0; k < n; ++k) b.flows.push_back({name("loss", k), k, true, li(k) * in.loss_variance(k)});
    }
    for (const auto& f : b.flows) b.total += f.weight;
    b.signal_share = b.total > 0.0 ? b.flows[static_cast<std::size_t>(s)].weight / b.total : 0.0;
    return b;
}

QuantumEfficiency quantum_efficiency(const ScatteringResult& r, const NoiseInputs& in) {
    const NoiseBudget b = noise_decomposition(r, in);
    const int s = r.ladder.signal_slot();
    QuantumEfficiency q;
    q.gain = std::norm(r.s0(s, s));
    q.output_variance = b.total;
    q.eta = b.signal_share;
    q.below_unity_gain = q.gain < 1.0;
    q.eta_ideal = 1.0 / (2.0 - 1.0 / q.gain);
    q.eta_bar = 1.0 - q.eta / q.eta_ideal;
    // Vacuum-referred: eta = (1/2) / (1/2 + A).
    double unit = 0.0;
    for (const auto& f : b.flows) {
        const double var = f.loss_port ? in.loss_variance(f.slot) : in.input_variance(f.slot);
        if (var > 0.0) unit += f.weight / var;
    }
    q.added_noise = 0.5 * (unit / q.gain - 1.0);
    return q;
}

QuantumEfficiency quantum_efficiency(const ScatteringResult& r) {
    return quantum_efficiency(r, NoiseInputs::vacuum(static_cast<int>(r.s0.rows())));
}

double estimate_dynamic_range(double g0_linear, double pump_current, double pump_impedance) {
    if (!(g0_linear > 1.0)) throw ConfigError("dynamic range needs small-signal gain G0 > 1");
    if (!(pump_current > 0.0) || !(pump_impedance > 0.0)) throw ConfigError("pump current and impedance must be positive");
    const double pp = 0.5 * pump_current * pump_current * pump_impedance;
    const double p1 = (std::pow(10.0, 0.1) - 1.0) * pp / (2.0 * g0_linear);
    return 10.0 * std::log10(p1 / 1e-3);
}

double bandwidth_3db(const std::vector<double>& freq_hz, const std::vector<double>& gain_db) {
    if (freq_hz.size() != gain_db.size() || freq_hz.size() < 2) throw ConfigError("bandwidth needs matching spectra");
    const auto peak = static_cast<std::size_t>(std::max_element(gain_db.begin(), gain_db.end()) - gain_db.begin());
    const double level = gain_db[peak] - 3.0;
    auto cross = [&](std::size_t a, std::size_t b) {
        const double t = (level - gain_db[a]) / (gain_db[b] - gain_db[a]);
        return freq_hz[a] + t * (freq_hz[b] - freq_hz[a]);
    };
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && gain_db[lo - 1] >= level) --lo;
    while (hi + 1 < gain_db.size() && gain_db[hi + 1] >= level) ++hi;
    const double f_lo = lo > 0 ? cross(lo - 1, lo) : freq_hz.front();
    const double f_hi = hi + 1 < gain_db.size() ? cross(hi, hi + 1) : freq_hz.back();
    return f_hi - f_lo;
}

}  // namespace twpa
