#include <doctest.h>

#include <cmath>

#include "twpa/bessel.hpp"
#include "twpa/pump.hpp"
#include "twpa/scenarios.hpp"

using namespace twpa;

TEST_SUITE("pump") {

TEST_CASE("drive to amplitude") {
    CHECK(amplitude_from_drive(0.0, 1.2, 0.6) == 0.0);
    const double beta = 1.2, wp = 0.6;
    const double small = 1e-5;
    CHECK(amplitude_from_drive(small, beta, wp) == doctest::Approx(small / (1 - beta * wp * wp)).epsilon(1e-8));
    CHECK_THROWS_AS(amplitude_from_drive(-0.1, beta, wp), ConfigError);
}

TEST_CASE("drive root at the floquet design point") {
    const auto p = device_profile(builtin_device("table2_floquet"));
    const double wp = p.to_normalized_frequency(7.875e9);
    const double a = amplitude_from_drive(0.6, p.beta, wp);
    const double residual = 2 * std::cyl_bessel_j(1.0, a) - p.beta * wp * wp * a - 0.6;
    CHECK(std::abs(residual) < 1e-12);
    // First sign change of the residual on a fine scan over (0, 2).
    double root = -1.0, prev = -0.6;
    for (int i = 1; i <= 200000; ++i) {
        const double x = 2.0 * i / 200000;
        const double r = 2 * std::cyl_bessel_j(1.0, x) - p.beta * wp * wp * x - 0.6;
        if (prev < 0.0 && r >= 0.0) {
            root = x;
            break;
        }
        prev = r;
    }
    CHECK(std::abs(root - a) < 2e-5);
}

TEST_CASE("drive round trip") {
    for (double d : {0.01, 0.1, 0.3, 0.52, 0.6, 0.65}) {
        const double a = amplitude_from_drive(d, 1.2, 0.5);
        CHECK(std::abs(drive_from_amplitude(a, 1.2, 0.5) - d) < 1e-10);
    }
    double turn = 0.0;
    const double top = max_drive(1.2, 0.5, &turn);
    CHECK_THROWS_AS(amplitude_from_drive(top * 1.01, 1.2, 0.5), NumericalError);
}

TEST_CASE("fitted wavevector") {
    CHECK(fitted_wavevector(0.0) == doctest::Approx(0.08195).epsilon(1e-14));
    CHECK(fitted_wavevector(0.52) ==
          doctest::Approx(0.08195 + 1.1601e-2 * 0.52 * 0.52 - 4.996e-3 * 0.52 * 0.52 * 0.52).epsilon(1e-14));
    CHECK(fitted_wavevector(0.52) == doctest::Approx(0.08438).epsilon(1e-4));
}

TEST_CASE("adiabatic wavevector, linear limit") {
    const double wp = 0.1, cp = 1.3, mu = 1.1, beta = 1.2;
    const double lin = wp * std::sqrt(cp / (mu * (1 - beta * wp * wp)));
    CHECK(adiabatic_wavevector(0.0, mu, cp, beta, wp) == doctest::Approx(lin).epsilon(1e-14));
    CHECK(adiabatic_wavevector(1e-4, mu, cp, beta, wp) == doctest::Approx(lin).epsilon(1e-8));
    // The pump slows down as the junction softens.
    CHECK(adiabatic_wavevector(0.8, mu, cp, beta, wp) > lin);
}

TEST_CASE("pump solution follows the drive profile") {
    const auto p = device_profile(builtin_device("table2_floquet"));
    const double wp = p.to_normalized_frequency(7.875e9);
    const auto s = solve_pump(p, wp, 0.6, WavevectorMode::adiabatic_formula);
    const auto c = static_cast<std::size_t>(p.length / 2);
    CHECK(s.drive[c] == doctest::Approx(0.6).epsilon(1e-3));
    CHECK(s.drive.front() == doctest::Approx(0.6 / p.mu.front()).epsilon(1e-12));
    CHECK(s.accumulated_phase.size() == s.drive.size() + 1);
    CHECK(s.accumulated_phase.back() > 0.0);
}

TEST_CASE("pump reflection") {
    PumpSolution matched;
    matched.impedance = {50.0, 50.0};
    matched.accumulated_phase = {0.0, 0.3, 0.6};
    CHECK(pump_reflection_db(matched, 50.0) == -200.0);

    // One mismatched end: |r|^2 with r = (Z - 50) / (Z + 50).
    PumpSolution one = matched;
    one.impedance = {60.0, 50.0};
    CHECK(pump_reflection_db(one, 50.0) == doctest::Approx(20 * std::log10(10.0 / 110.0)).epsilon(1e-12));
}

TEST_CASE("pump impedance at the ends follows the local cell") {
    const auto p = device_profile(builtin_device("table2_floquet"));
    const double wp = p.to_normalized_frequency(7.875e9);
    const auto s = solve_pump(p, wp, 0.6, WavevectorMode::adiabatic_formula);
    const LocalCell c = local_cell(p, 0, s.amplitude.front());
    const double cp = pump_capacitance(wp, c, p);
    CHECK(s.impedance.front() == doctest::Approx(p.z_char * pump_impedance(c.amplitude, c.mu, cp, p.beta, wp)));
    CHECK(s.impedance.front() == doctest::Approx(s.impedance.back()).epsilon(1e-2));
}

}
