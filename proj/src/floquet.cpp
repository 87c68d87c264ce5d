#include "twpa/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

namespace twpa {

NormalizedProfile frozen_profile(const NormalizedProfile& p, int j, int length) {
    if (j < 0 || j >= p.length) throw ConfigError("frozen cell index out of range");
    if (length < 1) throw ConfigError("frozen segment needs at least one cell");
    NormalizedProfile q = p;
    const auto jj = static_cast<std::size_t>(j);
    const auto n = static_cast<std::size_t>(length);
    q.length = length;
    q.reference_cell = 0;
    q.mu.assign(n, p.mu[jj]);
    q.nu.assign(n, p.nu[jj]);
    q.gamma_c.assign(n, p.gamma_c[jj]);
    if (!p.cc_ztlr.empty()) q.cc_ztlr.assign(n, p.cc_ztlr[jj]);
    return q;
}

namespace {

double period_of(const LineModel& model) {
    const auto& k = model.pump().wavevector;
    const auto [lo, hi] = std::minmax_element(k.begin(), k.end());
    if (*lo <= 0.0) throw ConfigError("Floquet analysis needs k_p > 0");
    if (*hi - *lo > 1e-12 * *hi) throw ConfigError("Floquet analysis needs a constant-drive segment");
    return kPi / *lo;
}

}  // namespace

CMat monodromy(const LineModel& model, int steps_per_cell, Integrator integrator) {
    const double xt = period_of(model);
    const int steps = std::max(1, static_cast<int>(std::ceil(xt * steps_per_cell)));
    const CMat pb = propagate_span(model, 0.0, xt, steps, integrator);
    const auto& lad = model.ladder();
    return phase_matrix(lad, model.phase_at(xt)) * pb * phase_matrix(lad, model.phase_at(0.0)).adjoint();
}

FloquetAnalysis analyze_floquet(const LineModel& model, int steps_per_cell) {
    FloquetAnalysis fa;
    fa.period = period_of(model);
    fa.wavevector = kPi / fa.period;
    fa.ladder = model.ladder();
    fa.generator = model.generator(0.5 * fa.period);
    fa.monodromy = monodromy(model, steps_per_cell);
    const int n = static_cast<int>(fa.monodromy.rows());
    const double xt = fa.period;

    Eigen::ComplexEigenSolver<CMat> es(fa.monodromy);
    if (es.info() != Eigen::Success) throw NumericalError("monodromy eigen-decomposition failed");
    const CVec lam = es.eigenvalues();
    CMat vec = es.eigenvectors();

    const double scale = lam.cwiseAbs().maxCoeff();
    fa.min_relative_gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) fa.min_relative_gap = std::min(fa.min_relative_gap, std::abs(lam(a) - lam(b)) / scale);
    if (fa.min_relative_gap < 1e-8) throw NumericalError("near-degenerate monodromy eigenvalues");

    CVec r(n);
    for (int a = 0; a < n; ++a) r(a) = std::log(lam(a)) / xt;

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int a) { return std::llround(r(a).real() * 1e9); };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (key(a) != key(b)) return key(a) > key(b);
        return r(a).imag() < r(b).imag();
    });

    fa.exponents.resize(n);
    fa.eigenbasis.resize(n, n);
    for (int c = 0; c < n; ++c) {
        const int a = order[static_cast<std::size_t>(c)];
        fa.exponents(c) = r(a);
        fa.eigenbasis.col(c) = vec.col(a).normalized();
    }

    // Match eig(G) to each Floquet multiplier to recover the branch.
    Eigen::ComplexEigenSolver<CMat> gs(fa.generator, false);
    const CVec gev = gs.eigenvalues();
    fa.generator_exponents.resize(n);
    fa.branch.assign(static_cast<std::size_t>(n), 0);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int c = 0; c < n; ++c) {
        const cplx target = std::exp(fa.exponents(c) * xt);
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
            if (used[static_cast<std::size_t>(k)]) continue;
            const double d = std::abs(std::exp(gev(k) * xt) - target);
            if (d < bd) bd = d, best = k;
        }
        used[static_cast<std::size_t>(best)] = true;
        fa.generator_exponents(c) = gev(best);
        fa.branch[static_cast<std::size_t>(c)] =
            static_cast<int>(std::lround((gev(best).imag() - fa.exponents(c).imag()) * xt / (2.0 * kPi)));
    }

    CVec ex(n);
    for (int c = 0; c < n; ++c) ex(c) = std::exp(fa.exponents(c) * xt);
    const CMat rebuilt = fa.eigenbasis * ex.asDiagonal() * fa.eigenbasis.inverse();
    fa.reconstruction_error = (rebuilt - fa.monodromy).cwiseAbs().maxCoeff();

    // Liouville: x_T sum r = integral of tr K over the period, modulo 2 pi i. Loss enters as
    // -Gamma/2 forward and +Gamma/2 backward, so it drops out of the trace.
    const int samples = 8;
    cplx tr_int = 0.0;
    for (int q = 0; q < samples; ++q) tr_int += model.coupling_lab((q + 0.5) * xt / samples).trace();
    tr_int *= xt / samples;
    const cplx d = fa.exponents.sum() * xt - tr_int;
    fa.liouville_residual = std::abs(cplx(d.real(), std::remainder(d.imag(), 2.0 * kPi))) / xt;
    return fa;
}

CMat periodic_part(const FloquetAnalysis& fa, double x) {
    const int n = static_cast<int>(fa.exponents.size());
    const CMat pi_lab = phase_matrix(fa.ladder, fa.wavevector * x) * CMat(x * fa.generator).exp();
    CVec decay(n);
    for (int c = 0; c < n; ++c) decay(c) = std::exp(-x * fa.exponents(c));
    return pi_lab * fa.eigenbasis * decay.asDiagonal() * fa.eigenbasis.inverse();
}

CVec floquet_decompose(const CVec& state, const FloquetAnalysis& fa, double x) {
    const CMat pv = periodic_part(fa, x) * fa.eigenbasis;
    Eigen::JacobiSVD<CMat> svd(pv);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0)) throw NumericalError("ill-conditioned Floquet basis");
    return pv.partialPivLu().solve(state);
}

std::string label_name(FloquetLabel l) {
    switch (l) {
    case FloquetLabel::amplifying: return "amplifying";
    case FloquetLabel::deamplifying: return "deamplifying";
    default: return "stable";
    }
}

FloquetClassification classify_modes(const FloquetAnalysis& fa, double tol) {
    const int n = static_cast<int>(fa.exponents.size());
    const int m = n / 2;
    FloquetClassification c;
    c.labels.resize(static_cast<std::size_t>(n), FloquetLabel::stable);
    c.slot_weights = fa.eigenbasis.cwiseAbs2();
    c.mode_weights = c.slot_weights.topRows(m) + c.slot_weights.bottomRows(m);
    double best_up = tol, best_down = -tol;
    for (int a = 0; a < n; ++a) {
        const double re = fa.exponents(a).real();
        if (re > tol) c.labels[static_cast<std::size_t>(a)] = FloquetLabel::amplifying;
        if (re < -tol) c.labels[static_cast<std::size_t>(a)] = FloquetLabel::deamplifying;
        if (re > best_up) best_up = re, c.amplifying = a;
        if (re < best_down) best_down = re, c.deamplifying = a;
    }
    c.spectral_gap = std::numeric_limits<double>::infinity();
    for (int s : {c.amplifying, c.deamplifying}) {
        if (s < 0) continue;
        for (int a = 0; a < n; ++a) {
            if (a == c.amplifying || a == c.deamplifying) continue;
            c.spectral_gap = std::min(c.spectral_gap, std::abs(fa.exponents(s) - fa.exponents(a)));
        }
    }
    return c;
}

}  // namespace twpa
