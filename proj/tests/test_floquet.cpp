#include <doctest.h>

#include <cmath>

#include "twpa/floquet.hpp"
#include "twpa/scenarios.hpp"

using namespace twpa;

namespace {

struct ConstantDrive {
    NormalizedProfile profile;
    PumpSolution pump;
    ModeLadder ladder;
    SolverOptions options;
};

ConstantDrive table1_constant(double drive) {
    const auto base = device_profile(builtin_device("table1"));
    ConstantDrive c;
    c.profile = frozen_profile(base, 0, static_cast<int>(std::ceil(kPi / fitted_wavevector(drive))) + 2);
    const double wp = c.profile.to_normalized_frequency(6716847447.63);
    c.pump = solve_pump(c.profile, wp, drive, WavevectorMode::fitted_polynomial);
    c.ladder = build_mode_ladder(c.profile.to_normalized_frequency(6e9), wp, -3, 2);
    return c;
}

FloquetAnalysis analyze(double drive) {
    const auto c = table1_constant(drive);
    return analyze_floquet(LineModel(c.profile, c.pump, c.ladder, c.options));
}

}  // namespace

TEST_SUITE("floquet") {

TEST_CASE("frozen profile copies one cell") {
    const auto p = device_profile(builtin_device("table2_floquet"));
    const auto q = frozen_profile(p, 100, 40);
    CHECK(q.length == 40);
    CHECK(q.mu[39] == p.mu[100]);
    CHECK(q.gamma_c[0] == p.gamma_c[100]);
    CHECK_THROWS_AS(frozen_profile(p, -1, 40), ConfigError);
}

TEST_CASE("periodic part closes over one period") {
    const auto fa = analyze(0.52);
    CHECK(fa.period == doctest::Approx(kPi / fitted_wavevector(0.52)));
    CHECK((periodic_part(fa, 0.0) - CMat::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((periodic_part(fa, fa.period) - CMat::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(fa.reconstruction_error < 1e-10);
    CHECK(fa.liouville_residual < 1e-6);
}

TEST_CASE("below the bifurcation every exponent is imaginary") {
    const auto fa = analyze(0.01);
    for (int a = 0; a < fa.exponents.size(); ++a) CHECK(std::abs(fa.exponents(a).real()) < 1e-6);
    const auto c = classify_modes(fa);
    CHECK(c.amplifying == -1);
    for (auto l : c.labels) CHECK(l == FloquetLabel::stable);
}

TEST_CASE("above the bifurcation one pair leaves the axis") {
    const auto fa = analyze(0.52);
    const auto c = classify_modes(fa);
    REQUIRE(c.amplifying >= 0);
    REQUIRE(c.deamplifying >= 0);
    CHECK(fa.exponents(c.amplifying).real() > 1e-4);
    CHECK(fa.exponents(c.deamplifying).real() == doctest::Approx(-fa.exponents(c.amplifying).real()).epsilon(1e-6));
    for (int a = 0; a < fa.exponents.size(); ++a)
        if (a != c.amplifying && a != c.deamplifying) CHECK(std::abs(fa.exponents(a).real()) < 1e-6);
    CHECK(c.spectral_gap > 0.0);
    // Squeezed and antisqueezed quadratures share their magnitude profile.
    const Eigen::VectorXd wa = c.slot_weights.col(c.amplifying), wd = c.slot_weights.col(c.deamplifying);
    CHECK((wa - wd).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(label_name(c.labels[c.amplifying]) == "amplifying");
}

TEST_CASE("gain coefficient grows with the drive") {
    double prev = 0.0;
    for (double d : {0.05, 0.15, 0.25, 0.35, 0.45, 0.52, 0.6}) {
        const auto fa = analyze(d);
        const auto c = classify_modes(fa);
        const double g = c.amplifying >= 0 ? fa.exponents(c.amplifying).real() : 0.0;
        CHECK(g >= prev);
        if (prev > 0.0) CHECK(g > prev);
        prev = g;
    }
    CHECK(prev > 0.0);
}

TEST_CASE("a floquet eigenvector propagates alone") {
    const auto c = table1_constant(0.52);
    const LineModel lm(c.profile, c.pump, c.ladder, c.options);
    const auto fa = analyze_floquet(lm);
    const auto cls = classify_modes(fa);
    const int a = cls.amplifying;
    REQUIRE(a >= 0);
    const CVec v = fa.eigenbasis.col(a);
    for (int x : {5, 17, 30}) {
        const CVec state = transfer_matrix(lm, 0, x, 16) * v;
        const CVec q = floquet_decompose(state, fa, x);
        const double own = std::abs(q(a));
        double others = 0.0;
        for (int k = 0; k < q.size(); ++k)
            if (k != a) others = std::max(others, std::abs(q(k)));
        CHECK(own == doctest::Approx(std::exp(fa.exponents(a).real() * x)).epsilon(1e-6));
        CHECK(others < 1e-6 * own);
    }
    CHECK(floquet_decompose(CVec::Zero(12), fa, 3.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unit signal projects mostly onto the amplifying pair") {
    const auto fa = analyze(0.52);
    const auto c = classify_modes(fa);
    CVec in = CVec::Zero(12);
    in(fa.ladder.signal_slot()) = 1.0;
    const CVec q = floquet_decompose(in, fa, 0.0);
    const double pair = std::norm(q(c.amplifying)) + std::norm(q(c.deamplifying));
    double rest = 0.0;
    for (int k = 0; k < q.size(); ++k)
        if (k != c.amplifying && k != c.deamplifying) rest = std::max(rest, std::norm(q(k)));
    CHECK(pair > rest);
}

TEST_CASE("drive-dependent pump wavevector is refused") {
    const auto p = device_profile(builtin_device("table2_floquet"));
    const double wp = p.to_normalized_frequency(7.875e9);
    const auto pump = solve_pump(p, wp, 0.6, WavevectorMode::adiabatic_formula);
    const auto ladder = build_mode_ladder(p.to_normalized_frequency(6e9), wp, -3, 2);
    CHECK_THROWS_AS(monodromy(LineModel(p, pump, ladder, SolverOptions{})), ConfigError);
}

}
