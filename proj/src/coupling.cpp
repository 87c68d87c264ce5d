#include "twpa/coupling.hpp"

#include <cmath>

#include "twpa/bessel.hpp"

namespace twpa {

LocalCell local_cell(const NormalizedProfile& p, int j, double amplitude) {
    const auto k = static_cast<std::size_t>(j);
    LocalCell c;
    c.mu = p.mu[k];
    c.nu = p.nu[k];
    c.gamma_c = p.gamma_c[k];
    c.cc_ztlr = p.cc_ztlr.empty() ? 0.0 : p.cc_ztlr[k];
    c.amplitude = amplitude;
    return c;
}

double pmr_factor(double omega, const NormalizedProfile& p) {
    const double x = omega / p.omega_rt;
    if (std::abs(std::abs(x) - 1.0) < 1e-6) throw LadderError("frequency sits on the PMR pole");
    const double y = omega / p.omega_r;
    return (1.0 - y * y) / (1.0 - x * x);
}

double capacitance_entry(double omega, const LocalCell& c, const NormalizedProfile& p) {
    switch (p.pmr_kind) {
        case PmrKind::lumped_lc:
            return c.nu + c.gamma_c * pmr_factor(omega, p);
        case PmrKind::quarter_wave_tlr: {
            const double w = std::abs(omega) * p.omega_c;
            const double kl = w / p.tlr_phase_velocity * p.tlr_length;
            const double den = 1.0 - w * c.cc_ztlr * std::tan(kl);
            if (std::abs(den) < 1e-9) throw LadderError("frequency sits on a TLR pole");
            return c.nu + c.gamma_c / den;
        }
        case PmrKind::coplanar_stub: {
            // Open stub: C = tan(k l) / (w C_g0 Z_tlr), with Z_tlr = cc_ztlr / C_c.
            const double w = std::abs(omega) * p.omega_c;
            const double kl = w / p.tlr_phase_velocity * p.tlr_length;
            const double ztlr = c.cc_ztlr / (c.gamma_c * p.cg0);
            return c.nu + std::tan(kl) / (w * p.cg0 * ztlr);
        }
    }
    return c.nu;
}

RVec assemble_capacitance(const ModeLadder& ladder, const LocalCell& c, const NormalizedProfile& p) {
    RVec cap(ladder.m());
    for (int i = 0; i < ladder.m(); ++i) cap(i) = capacitance_entry(ladder.frequencies[i], c, p);
    return cap;
}

Eigen::MatrixXd assemble_inverse_inductance(const ModeLadder& ladder, double amplitude, double mu, double beta) {
    const int m = ladder.m();
    const auto j = bessel_j_orders(2 * (m - 1), amplitude);
    Eigen::MatrixXd linv(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) linv(r, c) = mu * j[static_cast<std::size_t>(2 * std::abs(c - r))];
    for (int r = 0; r < m; ++r) {
        const double w = ladder.frequencies[r];
        linv(r, r) -= mu * beta * w * w;
    }
    return linv;
}

CMat inverse_inductance_with_phase(const ModeLadder& ladder, double amplitude, double mu, double beta,
                                   double pump_phase) {
    const Eigen::MatrixXd base = assemble_inverse_inductance(ladder, amplitude, mu, beta);
    const int m = ladder.m();
    CMat out(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) out(r, c) = base(r, c) * std::polar(1.0, 2.0 * (r - c) * pump_phase);
    return out;
}

RVec nonlinear_impedance(const Eigen::MatrixXd& linv, const RVec& cap) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(linv);
    if (!lu.isInvertible()) throw NumericalError("inverse inductance matrix is singular");
    const Eigen::MatrixXd l = lu.inverse();
    RVec z(cap.size());
    for (int i = 0; i < cap.size(); ++i) {
        const double q = l(i, i) / cap(i);
        if (!(q > 0.0)) throw LadderError("mode outside the valid band (non-positive L/C)");
        z(i) = std::sqrt(q);
    }
    return z;
}

ModeMatrices assemble_mode_matrices(const ModeLadder& ladder, const LocalCell& c, const NormalizedProfile& p) {
    ModeMatrices mm;
    const int m = ladder.m();
    mm.w.resize(m);
    for (int i = 0; i < m; ++i) mm.w(i) = ladder.frequencies[i];
    mm.cap = assemble_capacitance(ladder, c, p);
    mm.linv = assemble_inverse_inductance(ladder, c.amplitude, c.mu, p.beta);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(mm.linv);
    mm.l = lu.inverse();
    mm.z.resize(m);
    for (int i = 0; i < m; ++i) {
        const double q = mm.l(i, i) / mm.cap(i);
        if (!(q > 0.0) || !std::isfinite(q)) throw LadderError("mode outside the valid band (non-positive L/C)");
        mm.z(i) = std::sqrt(q);
    }
    return mm;
}

CMat assemble_coupling(const ModeMatrices& mm, const RVec& half_log_slope, bool forward_backward) {
    const int m = static_cast<int>(mm.w.size());
    const cplx I(0.0, 1.0);
    RVec s(m), sgn(m);
    for (int i = 0; i < m; ++i) {
        s(i) = std::sqrt(std::abs(mm.w(i)));
        sgn(i) = mm.w(i) > 0 ? 1.0 : -1.0;
    }
    Eigen::MatrixXd t(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            t(r, c) = sgn(r) * s(r) * mm.l(r, c) / std::sqrt(mm.z(r) * mm.z(c)) * s(c);
    RVec u(m);
    for (int i = 0; i < m; ++i) u(i) = sgn(i) * std::abs(mm.w(i)) * mm.z(i) * mm.cap(i);

    CMat k = CMat::Zero(2 * m, 2 * m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            const double ud = (r == c) ? u(r) : 0.0;
            const cplx k11 = 0.5 * I * (t(r, c) + ud);
            k(r, c) = k11;
            k(m + r, m + c) = -k11;
            if (forward_backward) {
                const double h = (r == c) ? half_log_slope(r) : 0.0;
                k(r, m + c) = -h + 0.5 * I * (ud - t(r, c));
                k(m + r, c) = -h + 0.5 * I * (t(r, c) - ud);
            }
        }
    }
    return k;
}

CMat to_lab_frame(const CMat& k0, const ModeLadder& ladder, double pump_phase) {
    const int m = ladder.m();
    CVec e(2 * m);
    for (int i = 0; i < m; ++i) {
        e(i) = std::polar(1.0, 2.0 * ladder.index(i) * pump_phase);
        e(m + i) = e(i);
    }
    return e.asDiagonal() * k0 * e.conjugate().asDiagonal();
}

CMat boundary_matrix(const RVec& z_device, const RVec& z_port) {
    const int m = static_cast<int>(z_device.size());
    CMat b = CMat::Zero(2 * m, 2 * m);
    for (int i = 0; i < m; ++i) {
        if (!(z_port(i) > 0.0)) throw ConfigError("port impedance must be positive");
        const double a = std::sqrt(z_port(i) / z_device(i));
        const double c = std::sqrt(z_device(i) / z_port(i));
        b(i, i) = b(m + i, m + i) = 0.5 * (a + c);
        b(i, m + i) = b(m + i, i) = 0.5 * (a - c);
    }
    return b;
}

}  // namespace twpa
