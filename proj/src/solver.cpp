#include "twpa/solver.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "twpa/kernels.hpp"

namespace twpa {

RVec loss_rates(const ModeLadder& ladder, double loss_tangent) {
    RVec g(ladder.m());
    for (int i = 0; i < ladder.m(); ++i) g(i) = std::abs(ladder.frequencies[i]) * loss_tangent;
    return g;
}

LineModel::LineModel(const NormalizedProfile& profile, const PumpSolution& pump, const ModeLadder& ladder,
                     const SolverOptions& options)
    : profile_(profile), pump_(pump), ladder_(ladder), options_(options) {
    if (static_cast<int>(pump_.amplitude.size()) != profile_.length)
        throw ConfigError("pump solution does not match the device length");
    if (!options_.allow_invalid_modes) {
        const ModeValidity v = validate_modes(ladder_, profile_);
        for (std::size_t i = 0; i < v.flags.size(); ++i) {
            if (v.flags[i] == ModeFlag::in_pmr_gap)
                throw LadderError("mode n=" + std::to_string(ladder_.index(static_cast<int>(i))) + " lies in the PMR gap");
            if (v.flags[i] == ModeFlag::above_cutoff)
                throw LadderError("mode n=" + std::to_string(ladder_.index(static_cast<int>(i))) + " lies above the band edge");
        }
    }
    const int L = profile_.length;
    const int m = ladder_.m();
    cell_z_.resize(static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j)
        cell_z_[static_cast<std::size_t>(j)] =
            assemble_mode_matrices(ladder_, local_cell(profile_, j, pump_.amplitude[static_cast<std::size_t>(j)]), profile_).z;
    cell_h_.assign(static_cast<std::size_t>(L), RVec::Zero(m));
    if (L > 1) {
        for (int j = 0; j < L; ++j) {
            const int lo = std::max(j - 1, 0), hi = std::min(j + 1, L - 1);
            const double span = hi - lo;
            for (int i = 0; i < m; ++i) {
                const double d = std::log(cell_z_[hi](i)) - std::log(cell_z_[lo](i));
                cell_h_[static_cast<std::size_t>(j)](i) = 0.5 * d / span;
            }
        }
    }
    const RVec g = options_.include_loss ? loss_rates(ladder_, profile_.loss_tangent) : RVec::Zero(m);
    slot_loss_.resize(2 * m);
    slot_loss_ << g, g;
}

LocalCell LineModel::cell_at(double x) const {
    LocalCell c;
    c.mu = sample_at(profile_.mu, x);
    c.nu = sample_at(profile_.nu, x);
    c.gamma_c = sample_at(profile_.gamma_c, x);
    c.cc_ztlr = profile_.cc_ztlr.empty() ? 0.0 : sample_at(profile_.cc_ztlr, x);
    c.amplitude = sample_at(pump_.amplitude, x);
    return c;
}

CMat LineModel::coupling_rotating(double x) const {
    const ModeMatrices mm = assemble_mode_matrices(ladder_, cell_at(x), profile_);
    const int m = ladder_.m();
    RVec h(m);
    const double t = x - 0.5;
    const int L = profile_.length;
    if (t <= 0.0) {
        h = cell_h_.front();
    } else if (t >= L - 1) {
        h = cell_h_.back();
    } else {
        const auto j = static_cast<std::size_t>(t);
        const double f = t - static_cast<double>(j);
        h = cell_h_[j] + f * (cell_h_[j + 1] - cell_h_[j]);
    }
    return assemble_coupling(mm, h, options_.forward_backward);
}

CMat LineModel::generator(double x) const {
    CMat g = coupling_rotating(x);
    const int m = ladder_.m();
    const double kp = wavevector_at(x);
    const cplx I(0.0, 1.0);
    for (int i = 0; i < m; ++i) {
        const double n = ladder_.index(i);
        g(i, i) += -0.5 * slot_loss_(i) - 2.0 * I * kp * n;
        g(m + i, m + i) += 0.5 * slot_loss_(m + i) - 2.0 * I * kp * n;
    }
    return g;
}

CMat LineModel::coupling_lab(double x) const { return to_lab_frame(coupling_rotating(x), ladder_, phase_at(x)); }

namespace {

// Advances y over `count` substeps from x. For RK4, g_start must hold G(x) and is left at G(x_end).
void advance(const LineModel& model, Integrator integrator, double& x, int count, double h, CMat& g_start,
             CMat& y, CMat& work) {
    const int n = static_cast<int>(y.rows());
    if (integrator == Integrator::magnus4) {
        constexpr double c = 0.28867513459481288225;  // sqrt(3)/6
        CMat step(n, n), next(n, n);
        for (int q = 0; q < count; ++q) {
            const CMat a1 = model.generator(x + (0.5 - c) * h);
            const CMat a2 = model.generator(x + (0.5 + c) * h);
            const CMat omega = (0.5 * h) * (a1 + a2) + (c * 0.5 * h * h) * (a2 * a1 - a1 * a2);
            step = omega.exp();
            kernels::matmul(n, step.data(), y.data(), next.data());
            y.swap(next);
            x += h;
        }
        return;
    }
    for (int q = 0; q < count; ++q) {
        const CMat g_mid = model.generator(x + 0.5 * h);
        CMat g_end = model.generator(x + h);
        kernels::rk4_apply(n, g_start.data(), g_mid.data(), g_end.data(), h, y.data(), work.data());
        g_start.swap(g_end);
        x += h;
    }
}

CMat matmul(const CMat& a, const CMat& b) {
    CMat c(a.rows(), b.cols());
    kernels::matmul(static_cast<int>(a.rows()), a.data(), b.data(), c.data());
    return c;
}

}  // namespace

CMat phase_matrix(const ModeLadder& ladder, double phase) {
    const int m = ladder.m();
    CVec e(2 * m);
    for (int i = 0; i < m; ++i) e(i) = e(m + i) = std::polar(1.0, 2.0 * ladder.index(i) * phase);
    return e.asDiagonal();
}

CMat propagate_span(const LineModel& model, double x0, double x1, int steps, Integrator integrator) {
    if (x0 > x1) throw ConfigError("propagation requires x0 <= x1");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    const int n = 2 * model.m();
    CMat y = CMat::Identity(n, n);
    if (x0 == x1) return y;
    CMat work(n, 3 * n);
    double x = x0;
    CMat g = integrator == Integrator::rk4 ? model.generator(x) : CMat();
    advance(model, integrator, x, steps, (x1 - x0) / steps, g, y, work);
    return y;
}

CMat propagate_rotating(const LineModel& model, int x0, int x1, int substeps, Integrator integrator) {
    if (x0 > x1) throw ConfigError("transfer matrix requires x0 <= x1");
    if (substeps < 1) throw ConfigError("substeps must be >= 1");
    const int n = 2 * model.m();
    CMat y = CMat::Identity(n, n);
    if (x0 == x1) return y;
    CMat work(n, 3 * n);
    double x = x0;
    CMat g = integrator == Integrator::rk4 ? model.generator(x) : CMat();
    advance(model, integrator, x, (x1 - x0) * substeps, 1.0 / substeps, g, y, work);
    return y;
}

CMat transfer_matrix(const LineModel& model, int x0, int x1, int substeps, Integrator integrator) {
    const CMat pb = propagate_rotating(model, x0, x1, substeps, integrator);
    return phase_matrix(model.ladder(), model.phase_at(x1)) * pb *
           phase_matrix(model.ladder(), model.phase_at(x0)).adjoint();
}

ScatteringResult solve_scattering(const LineModel& model, const SolverOptions& options) {
    const int m = model.m();
    const int n = 2 * m;
    const int L = model.length();
    const int sub = options.substeps;
    if (sub < 1) throw ConfigError("substeps must be >= 1");
    const bool lossy = model.slot_loss().maxCoeff() > 0.0 && options.noise_maps;
    const int spc = options.noise_samples_per_cell;
    if (lossy && (spc < 1 || sub % spc != 0)) throw ConfigError("noise samples per cell must divide substeps");
    const bool simpson = options.noise_quadrature == NoiseQuadrature::simpson;
    if (lossy && simpson && spc % 2 != 0) throw ConfigError("Simpson noise quadrature needs an even sample count per cell");

    ScatteringResult r;
    r.ladder = model.ladder();
    r.slot_loss = model.slot_loss();

    const int segs_per_cell = lossy ? spc : 1;
    const int seg_steps = sub / segs_per_cell;
    std::vector<CMat> segments;
    if (lossy) segments.reserve(static_cast<std::size_t>(L) * segs_per_cell);

    CMat work(n, 3 * n);
    CMat pi = CMat::Identity(n, n);
    double x = 0.0;
    const double h = 1.0 / sub;
    CMat g = options.integrator == Integrator::rk4 ? model.generator(x) : CMat();
    for (int j = 0; j < L; ++j) {
        CMat cell = CMat::Identity(n, n);
        for (int s = 0; s < segs_per_cell; ++s) {
            CMat seg = CMat::Identity(n, n);
            advance(model, options.integrator, x, seg_steps, h, g, seg, work);
            cell = segs_per_cell == 1 ? seg : matmul(seg, cell);
            if (lossy) segments.push_back(std::move(seg));
        }
        pi = matmul(cell, pi);
        if (options.store_cells) r.cells.push_back(cell);
        if (!pi.allFinite()) throw NumericalError("transfer matrix overflow");
    }

    r.pump_phase_total = model.phase_at(L);
    const CMat e_l = phase_matrix(r.ladder, r.pump_phase_total);
    const CMat pi_a = e_l * pi;

    r.z_left = model.cell_impedance(0);
    r.z_right = model.cell_impedance(L - 1);
    r.z_port.resize(m);
    const auto& prof = model.profile();
    for (int i = 0; i < m; ++i)
        r.z_port(i) = options.port(prof.to_hz(r.ladder.frequencies[i])) / prof.z_char;
    r.b0 = boundary_matrix(r.z_left, r.z_port);
    r.bl = boundary_matrix(r.z_right, r.z_port);

    const CMat q = pi_a * r.b0;
    CMat mbv(n, n), rhs(n, n);
    mbv << r.bl.leftCols(m), -q.rightCols(m);
    rhs << q.leftCols(m), -r.bl.rightCols(m);
    Eigen::JacobiSVD<CMat> svd(mbv);
    const auto& sv = svd.singularValues();
    r.condition = sv(0) / sv(sv.size() - 1);
    if (!std::isfinite(r.condition) || r.condition > 1e12)
        throw NumericalError("boundary system is singular (parametric oscillation onset)");
    const Eigen::PartialPivLU<CMat> lu(mbv);
    r.s0 = lu.solve(rhs);

    if (lossy) {
        const CMat left = lu.solve(e_l);
        const int total = L * segs_per_cell;
        r.sn.resize(static_cast<std::size_t>(total) + 1);
        r.sn_positions.resize(r.sn.size());
        r.sn_weights.resize(r.sn.size());
        CMat suffix = CMat::Identity(n, n);
        const double dx = 1.0 / segs_per_cell;
        for (int k = total; k >= 0; --k) {
            if (k < total) suffix = matmul(suffix, segments[static_cast<std::size_t>(k)]);
            const auto kk = static_cast<std::size_t>(k);
            r.sn[kk] = matmul(left, suffix);
            r.sn_positions[kk] = k * dx;
            if (k == 0 || k == total)
                r.sn_weights[kk] = (simpson ? 1.0 / 3.0 : 0.5) * dx;
            else
                r.sn_weights[kk] = simpson ? (k % 2 ? 4.0 : 2.0) * dx / 3.0 : dx;
        }
    }
    return r;
}

ScatteringResult solve_scattering(const NormalizedProfile& profile, const PumpSolution& pump,
                                  const ModeLadder& ladder, const SolverOptions& options) {
    const LineModel model(profile, pump, ladder, options);
    return solve_scattering(model, options);
}

double pseudo_unitarity_residual(const ScatteringResult& r) {
    const int m = r.ladder.m();
    const int n = 2 * m;
    RVec jd(n);
    for (int i = 0; i < m; ++i) jd(i) = jd(m + i) = r.ladder.signs[static_cast<std::size_t>(i)];
    const auto J = jd.asDiagonal();
    CMat acc = r.s0 * J * r.s0.adjoint();
    if (r.lossy()) {
        const RVec bath = r.slot_loss.cwiseProduct(jd);
        for (std::size_t k = 0; k < r.sn.size(); ++k)
            acc += r.sn_weights[k] * (r.sn[k] * bath.asDiagonal() * r.sn[k].adjoint());
    }
    acc -= CMat(J);
    return acc.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd internal_fields(const ScatteringResult& r, int input_slot) {
    const int m = r.ladder.m();
    const int n = 2 * m;
    if (r.cells.empty()) throw ConfigError("internal fields need stored cell propagators");
    if (input_slot < 0 || input_slot >= n) throw ConfigError("input slot out of range");
    CVec in = CVec::Zero(n);
    in(input_slot) = 1.0;
    const CVec out = r.s0 * in;
    CVec port0(n);
    port0 << in.head(m), out.tail(m);
    CVec b = r.b0 * port0;
    Eigen::MatrixXd fields(static_cast<int>(r.cells.size()) + 1, n);
    fields.row(0) = b.cwiseAbs2().transpose();
    for (std::size_t j = 0; j < r.cells.size(); ++j) {
        b = r.cells[j] * b;
        fields.row(static_cast<int>(j) + 1) = b.cwiseAbs2().transpose();
    }
    return fields;
}

}  // namespace twpa
