#include <doctest.h>

#include <cmath>

#include "twpa/metrics.hpp"
#include "twpa/scenarios.hpp"
#include "twpa/solver.hpp"

using namespace twpa;

namespace {

Scenario table1_point(double loss_tangent = 0.0) {
    Scenario s;
    s.name = "t";
    s.devices.push_back(builtin_device("table1"));
    s.grid = {6e9};
    s.outputs = {Output::gain};
    s.loss_tangent = loss_tangent;
    return s;
}

PointSetup table1_setup(double loss_tangent = 0.0) {
    const Scenario s = table1_point(loss_tangent);
    return setup_point(s, s.devices.front(), 0.0, 6e9, 0);
}

// Homogeneous table1 cells of a given length, with a port matched to the signal mode.
struct Homogeneous {
    NormalizedProfile profile;
    PumpSolution pump;
    ModeLadder ladder;
    SolverOptions options;
};

Homogeneous homogeneous_line(int length, double drive, int n_min, int n_max, double loss_tangent = 0.0) {
    auto spec = CircuitSpec::homogeneous(4.55e-6, 55e-15, 45e-15, 20e-15, 170e-12, 2.82e-12, length, 3);
    spec.loss_tangent = loss_tangent;
    Homogeneous h;
    h.profile = normalize_circuit(spec, 0);
    const double wp = h.profile.to_normalized_frequency(6.716847e9);
    h.pump = solve_pump(h.profile, wp, drive, WavevectorMode::adiabatic_formula);
    h.ladder = build_mode_ladder(h.profile.to_normalized_frequency(6e9), wp, n_min, n_max);
    const LineModel probe(h.profile, h.pump, h.ladder, h.options);
    h.options.port.in_band = h.profile.z_char * probe.cell_impedance(0)(h.ladder.signal_slot());
    return h;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("zero pump on a matched line scatters trivially") {
    auto h = homogeneous_line(400, 0.0, 0, 0);
    const auto r = solve_scattering(h.profile, h.pump, h.ladder, h.options);
    CHECK(std::abs(r.s0(0, 0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(r.s0(1, 1)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(r.s0(1, 0)) < 1e-9);
    CHECK(to_db(std::norm(r.s0(1, 0))) < -150.0);
    CHECK(gain_and_reflection(r).signal_gain_db == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("zero pump does not mix ladder modes") {
    auto h = homogeneous_line(300, 0.0, -3, 2);
    const auto r = solve_scattering(h.profile, h.pump, h.ladder, h.options);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            if (i % 6 != j % 6) CHECK(std::abs(r.s0(i, j)) < 1e-12);
}

TEST_CASE("uniform loss attenuates as exp(-gamma L)") {
    const int length = 500;
    auto h = homogeneous_line(length, 0.0, 0, 0, 2e-3);
    const auto r = solve_scattering(h.profile, h.pump, h.ladder, h.options);
    REQUIRE(r.lossy());
    const double want = std::exp(-r.slot_loss(0) * length);
    CHECK(std::norm(r.s0(0, 0)) == doctest::Approx(want).epsilon(1e-8));
    CHECK(r.slot_loss(0) == doctest::Approx(loss_rates(h.ladder, 2e-3)(0)));
}

TEST_CASE("zero loss tangent reproduces the lossless solve") {
    auto a = table1_setup(0.0);
    auto b = table1_setup(3.4e-3);
    b.options.include_loss = false;
    const auto ra = solve_scattering(a.profile, a.pump, a.ladder, a.options);
    const auto rb = solve_scattering(b.profile, b.pump, b.ladder, b.options);
    CHECK_FALSE(ra.lossy());
    CHECK((ra.s0 - rb.s0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-mode gain follows cosh^2 under phase matching") {
    const double drive = 0.15;
    auto probe = homogeneous_line(10, drive, -1, 0);
    probe.options.forward_backward = false;
    const LineModel lm0(probe.profile, probe.pump, probe.ladder, probe.options);
    const CMat k0 = lm0.coupling_rotating(5.0);
    // Slot 1 is the signal (n = 0), slot 0 the idler (n = -1); the -2i k_p n term shifts the idler only.
    const double kp = (k0(1, 1) - k0(0, 0)).imag() / 2.0;
    const cplx g2 = k0(1, 0) * k0(0, 1);
    REQUIRE(g2.real() > 0.0);
    const double g = std::sqrt(g2.real());
    const int length = static_cast<int>(std::round(std::acosh(std::sqrt(10.0)) / g));

    auto h = homogeneous_line(length, drive, -1, 0);
    h.options.forward_backward = false;
    std::fill(h.pump.wavevector.begin(), h.pump.wavevector.end(), kp);
    for (std::size_t j = 0; j < h.pump.accumulated_phase.size(); ++j) h.pump.accumulated_phase[j] = kp * j;
    const auto r = solve_scattering(h.profile, h.pump, h.ladder, h.options);
    const double gain = std::norm(r.s0(1, 1));
    const double want = std::pow(std::cosh(g * length), 2);
    MESSAGE("two-mode gain " << gain << " vs cosh^2 " << want << " over " << length << " cells");
    CHECK(gain == doctest::Approx(want).epsilon(0.05));
    CHECK(pseudo_unitarity_residual(r) < 1e-9);
}

TEST_CASE("transfer matrices compose") {
    const auto ps = table1_setup();
    const LineModel lm(ps.profile, ps.pump, ps.ladder, ps.options);
    const CMat a = propagate_rotating(lm, 0, 300, 4);
    const CMat b = propagate_rotating(lm, 300, 700, 4);
    const CMat ab = propagate_rotating(lm, 0, 700, 4);
    CHECK((ab - b * a).cwiseAbs().maxCoeff() < 1e-8 * ab.cwiseAbs().maxCoeff());
    const CMat ta = transfer_matrix(lm, 0, 300, 4), tb = transfer_matrix(lm, 300, 700, 4);
    const CMat tab = transfer_matrix(lm, 0, 700, 4);
    CHECK((tab - tb * ta).cwiseAbs().maxCoeff() < 1e-8 * tab.cwiseAbs().maxCoeff());
    const CMat span = propagate_span(lm, 0.0, 300.0, 1200);
    CHECK((span - a).cwiseAbs().maxCoeff() < 1e-8 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("step halving converges") {
    auto ps = table1_setup();
    const double g4 = gain_and_reflection(solve_scattering(ps.profile, ps.pump, ps.ladder, ps.options)).signal_gain_db;
    ps.options.substeps = 8;
    const double g8 = gain_and_reflection(solve_scattering(ps.profile, ps.pump, ps.ladder, ps.options)).signal_gain_db;
    CHECK(std::abs(g8 - g4) < 0.01);
}

TEST_CASE("rk4 and magnus agree") {
    auto ps = table1_setup();
    ps.options.substeps = 8;
    const auto rm = solve_scattering(ps.profile, ps.pump, ps.ladder, ps.options);
    ps.options.integrator = Integrator::rk4;
    const auto rr = solve_scattering(ps.profile, ps.pump, ps.ladder, ps.options);
    CHECK(std::abs(gain_and_reflection(rm).signal_gain_db - gain_and_reflection(rr).signal_gain_db) < 1e-3);
}

TEST_CASE("pseudo-unitarity, lossless and lossy") {
    const auto a = table1_setup(0.0);
    const auto ra = solve_scattering(a.profile, a.pump, a.ladder, a.options);
    CHECK(pseudo_unitarity_residual(ra) < 1e-9);
    // Regression value of this configuration.
    CHECK(gain_and_reflection(ra).signal_gain_db == doctest::Approx(18.9608).epsilon(1e-4));

    const auto b = table1_setup(3.4e-3);
    const auto rb = solve_scattering(b.profile, b.pump, b.ladder, b.options);
    REQUIRE(rb.lossy());
    CHECK(pseudo_unitarity_residual(rb) < 1e-6);

    auto bad = ra;
    bad.s0(0, 0) *= 1.01;
    CHECK(pseudo_unitarity_residual(bad) > 1e-3);
}

TEST_CASE("unpumped symmetric line is reciprocal") {
    auto h = homogeneous_line(600, 0.0, -3, 2);
    h.options.port.in_band = 50.0;
    const auto r = solve_scattering(h.profile, h.pump, h.ladder, h.options);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(r.s0(i, i) - r.s0(6 + i, 6 + i)) < 1e-9);
}

TEST_CASE("ladder outside the band is refused") {
    auto ps = table1_setup();
    const double edge = linear_band_edge(ps.profile);
    const auto high = build_mode_ladder(ps.ladder.signal_frequency, ps.ladder.pump_frequency, -3, 6);
    REQUIRE(std::abs(high.frequencies.back()) > edge);
    CHECK_THROWS_AS(solve_scattering(ps.profile, ps.pump, high, ps.options), LadderError);
}

TEST_CASE("internal fields on a matched lossy line") {
    auto h = homogeneous_line(200, 0.0, 0, 0, 1e-3);
    h.options.store_cells = true;
    const auto r = solve_scattering(h.profile, h.pump, h.ladder, h.options);
    const Eigen::MatrixXd f = internal_fields(r, 0);
    REQUIRE(f.rows() == 201);
    REQUIRE(f.cols() == 2);
    for (int x : {0, 50, 200}) {
        CHECK(f(x, 0) == doctest::Approx(std::exp(-r.slot_loss(0) * x)).epsilon(1e-8));
        CHECK(f(x, 1) < 1e-16);
    }
    CHECK_THROWS_AS(internal_fields(solve_scattering(h.profile, h.pump, h.ladder, SolverOptions{}), 0), ConfigError);
}

}
