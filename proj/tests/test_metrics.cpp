#include <doctest.h>

#include <cmath>

#include "twpa/metrics.hpp"
#include "twpa/scenarios.hpp"

using namespace twpa;

namespace {

struct Line {
    NormalizedProfile profile;
    PumpSolution pump;
    ModeLadder ladder;
    SolverOptions options;
};

Line matched_line(int length, double drive, int n_min, int n_max) {
    const auto spec = CircuitSpec::homogeneous(4.55e-6, 55e-15, 45e-15, 20e-15, 170e-12, 2.82e-12, length, 3);
    Line l;
    l.profile = normalize_circuit(spec, 0);
    const double wp = l.profile.to_normalized_frequency(6.716847e9);
    l.pump = solve_pump(l.profile, wp, drive, WavevectorMode::adiabatic_formula);
    l.ladder = build_mode_ladder(l.profile.to_normalized_frequency(6e9), wp, n_min, n_max);
    const LineModel probe(l.profile, l.pump, l.ladder, l.options);
    l.options.port.in_band = l.profile.z_char * probe.cell_impedance(0)(l.ladder.signal_slot());
    return l;
}

ScatteringResult solve(const Line& l) { return solve_scattering(l.profile, l.pump, l.ladder, l.options); }

ScatteringResult table1(double drive) {
    Scenario s;
    s.devices.push_back(builtin_device("table1"));
    s.grid = {6e9};
    s.outputs = {Output::gain};
    s.drive = drive;
    s.loss_tangent = 0.0;
    const auto ps = setup_point(s, s.devices.front(), 0.0, 6e9, 0);
    return solve_scattering(ps.profile, ps.pump, ps.ladder, ps.options);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("decibels") {
    CHECK(to_db(100.0) == doctest::Approx(20.0));
    CHECK(to_db(0.0) == -200.0);
}

TEST_CASE("unpumped line: all output noise is input signal noise") {
    const auto r = solve(matched_line(300, 0.0, 0, 0));
    const auto b = noise_decomposition(r, NoiseInputs::vacuum(2));
    CHECK(b.signal_share == doctest::Approx(1.0).epsilon(1e-9));
    const auto q = quantum_efficiency(r);
    CHECK(q.below_unity_gain == (q.gain < 1.0));
}

TEST_CASE("ideal two-mode amplifier saturates the quantum limit") {
    auto l = matched_line(3000, 0.45, -1, 0);
    l.options.forward_backward = false;
    const auto r = solve(l);
    const auto q = quantum_efficiency(r);
    REQUIRE(q.gain > 2.0);
    CHECK(std::abs(q.eta_bar) < 1e-4);
    CHECK(q.eta_ideal == doctest::Approx(1.0 / (2.0 - 1.0 / q.gain)));
}

TEST_CASE("added noise and efficiency are consistent") {
    const auto r = table1(0.52);
    const auto q = quantum_efficiency(r);
    CHECK(q.eta == doctest::Approx(0.5 / (0.5 + q.added_noise)).epsilon(1e-12));
    CHECK(q.eta_bar == doctest::Approx(1.0 - q.eta / q.eta_ideal).epsilon(1e-14));
    // Regression values of this configuration.
    CHECK(q.eta_bar == doctest::Approx(0.10195).epsilon(2e-4));
}

TEST_CASE("noise budget closes") {
    const auto r = table1(0.52);
    const auto b = noise_decomposition(r, NoiseInputs::vacuum(12));
    REQUIRE(b.flows.size() == 12);
    double sum = 0.0;
    for (const auto& f : b.flows) sum += f.weight;
    CHECK(sum == doctest::Approx(b.total).epsilon(1e-14));
    CHECK(b.signal_share == doctest::Approx(quantum_efficiency(r).eta).epsilon(1e-14));
    CHECK(b.flows[3].source == "in+ n=0");
    CHECK(b.flows[8].source == "in- n=-1");
}

TEST_CASE("input variances scale the budget") {
    const auto r = table1(0.52);
    auto hot = NoiseInputs::vacuum(12);
    hot.input_variance *= 3.0;
    const auto cold = noise_decomposition(r, NoiseInputs::vacuum(12));
    const auto warm = noise_decomposition(r, hot);
    CHECK(warm.total == doctest::Approx(3.0 * cold.total).epsilon(1e-12));
    CHECK(warm.signal_share == doctest::Approx(cold.signal_share).epsilon(1e-12));
    hot.loss_variance(0) = -1.0;
    CHECK_THROWS_AS(noise_decomposition(r, hot), ConfigError);
}

TEST_CASE("sideband noise grows with the drive") {
    double prev_signal = 2.0, prev_side = -1.0;
    for (double d : {0.3, 0.4, 0.52}) {
        const auto r = table1(d);
        const auto b = noise_decomposition(r, NoiseInputs::vacuum(12));
        const int s = r.ladder.signal_slot(), i = r.ladder.idler_slot();
        double side = 0.0;
        for (const auto& f : b.flows)
            if (f.slot % 6 != s && f.slot % 6 != i) side += f.weight / b.total;
        CHECK(b.signal_share < prev_signal);
        CHECK(side > prev_side);
        prev_signal = b.signal_share;
        prev_side = side;
    }
}

TEST_CASE("dynamic range estimate") {
    const double ip = 2e-6, zp = 50.0;
    const double pp = 0.5 * ip * ip * zp;
    const double edge = estimate_dynamic_range(1.0 + 1e-12, ip, zp);
    CHECK(edge == doctest::Approx(10 * std::log10((std::pow(10.0, 0.1) - 1) * pp / 2 / 1e-3)).epsilon(1e-9));
    const double a = estimate_dynamic_range(300.0, ip, zp);
    const double b = estimate_dynamic_range(300.0, ip * std::sqrt(2.0), zp);
    CHECK(b - a == doctest::Approx(10 * std::log10(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_dynamic_range(0.5, ip, zp), ConfigError);
}

TEST_CASE("3 dB bandwidth of a sampled spectrum") {
    std::vector<double> f, g;
    for (int i = 0; i <= 100; ++i) {
        f.push_back(i * 0.1e9);
        g.push_back(20.0 - std::abs(i - 50) * 0.2);
    }
    // 3 dB below the peak is reached 15 samples either side.
    CHECK(bandwidth_3db(f, g) == doctest::Approx(3.0e9).epsilon(1e-9));
}

}
