#include "twpa/pump.hpp"

#include <cmath>

#include "twpa/bessel.hpp"

namespace twpa {

namespace {

double drive_slope(double a, double beta, double omega_p) {
    // d/dA [2 J1(A)] = J0(A) - J2(A)
    const auto j = bessel_j_orders(2, a);
    return j[0] - j[2] - beta * omega_p * omega_p;
}

}  // namespace

double drive_from_amplitude(double amplitude, double beta, double omega_p) {
    return 2.0 * bessel_j(1, amplitude) - beta * omega_p * omega_p * amplitude;
}

double max_drive(double beta, double omega_p, double* turning_amplitude) {
    double lo = 0.0, hi = 3.8317;  // first zero of J1 bounds the stationary point of 2 J1
    if (drive_slope(lo, beta, omega_p) <= 0.0) {
        if (turning_amplitude) *turning_amplitude = 0.0;
        return 0.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (drive_slope(mid, beta, omega_p) > 0.0 ? lo : hi) = mid;
    }
    if (turning_amplitude) *turning_amplitude = lo;
    return drive_from_amplitude(lo, beta, omega_p);
}

double amplitude_from_drive(double drive, double beta, double omega_p) {
    if (drive < 0.0) throw ConfigError("drive must be >= 0");
    if (drive == 0.0) return 0.0;
    double a_turn = 0.0;
    const double top = max_drive(beta, omega_p, &a_turn);
    if (drive >= top) throw NumericalError("drive beyond the turning point (overdriven junction)");
    double lo = 0.0, hi = a_turn;
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        (drive_from_amplitude(mid, beta, omega_p) < drive ? lo : hi) = mid;
    }
    double a = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        const double r = drive_from_amplitude(a, beta, omega_p) - drive;
        const double d = drive_slope(a, beta, omega_p);
        if (d <= 0.0) break;
        a -= r / d;
    }
    return a;
}

double fitted_wavevector(double drive) {
    return 0.08195 + 1.1601e-2 * drive * drive - 4.996e-3 * drive * drive * drive;
}

double pump_capacitance(double omega_p, const LocalCell& c, const NormalizedProfile& p) {
    return capacitance_entry(omega_p, c, p);
}

namespace {

double pump_inductive_factor(double amplitude, double mu, double beta, double omega_p) {
    const double ratio = amplitude > 0.0 ? 2.0 * bessel_j(1, amplitude) / amplitude : 1.0;
    return mu * (ratio - beta * omega_p * omega_p);
}

}  // namespace

double adiabatic_wavevector(double amplitude, double mu, double cp, double beta, double omega_p) {
    const double q = cp / pump_inductive_factor(amplitude, mu, beta, omega_p);
    if (!(q > 0.0)) throw NumericalError("negative radicand in pump wavevector");
    return omega_p * std::sqrt(q);
}

double pump_impedance(double amplitude, double mu, double cp, double beta, double omega_p) {
    const double q = 1.0 / (cp * pump_inductive_factor(amplitude, mu, beta, omega_p));
    if (!(q > 0.0)) throw NumericalError("negative radicand in pump impedance");
    return std::sqrt(q);
}

PumpSolution solve_pump(const NormalizedProfile& p, double omega_p, double drive_ref, WavevectorMode mode) {
    PumpSolution s;
    s.pump_frequency = omega_p;
    const auto n = static_cast<std::size_t>(p.length);
    s.drive.resize(n);
    s.amplitude.resize(n);
    s.wavevector.resize(n);
    s.impedance.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double drive = drive_ref / p.mu[j];
        const double a = amplitude_from_drive(drive, p.beta, omega_p);
        const LocalCell c = local_cell(p, static_cast<int>(j), a);
        const double cp = pump_capacitance(omega_p, c, p);
        s.drive[j] = drive;
        s.amplitude[j] = a;
        s.wavevector[j] = mode == WavevectorMode::fitted_polynomial
                              ? fitted_wavevector(drive)
                              : adiabatic_wavevector(a, c.mu, cp, p.beta, omega_p);
        s.impedance[j] = p.z_char * pump_impedance(a, c.mu, cp, p.beta, omega_p);
    }
    s.accumulated_phase.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) s.accumulated_phase[j] = integrate_samples(s.wavevector, double(j));
    return s;
}

double pump_reflection_db(const PumpSolution& pump, double z_port_ohm) {
    const double z0 = pump.impedance.front(), zl = pump.impedance.back();
    const double r01 = (z0 - z_port_ohm) / (z0 + z_port_ohm);
    const double r12 = (z_port_ohm - zl) / (z_port_ohm + zl);
    const cplx e = std::polar(1.0, 2.0 * pump.accumulated_phase.back());
    const double s = std::norm((r01 + r12 * e) / (1.0 + r01 * r12 * e));
    return s > 0.0 ? std::max(10.0 * std::log10(s), -200.0) : -200.0;
}

}  // namespace twpa
