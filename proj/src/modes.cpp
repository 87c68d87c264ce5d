#include "twpa/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twpa {

ModeLadder build_mode_ladder(double omega_s, double omega_p, int n_min, int n_max) {
    if (n_min > n_max) throw ConfigError("ladder requires n_min <= n_max");
    if (!(n_min == 0 && n_max == 0) && !(n_min <= -1 && n_max >= 0))
        throw ConfigError("ladder must contain the signal and idler (n_min <= -1 <= 0 <= n_max)");
    ModeLadder l;
    l.signal_frequency = omega_s;
    l.pump_frequency = omega_p;
    l.n_min = n_min;
    l.n_max = n_max;
    for (int n = n_min; n <= n_max; ++n) {
        const double w = omega_s + 2.0 * n * omega_p;
        if (w == 0.0) throw LadderError("ladder contains a zero-frequency mode");
        l.frequencies.push_back(w);
        l.signs.push_back(w > 0 ? 1.0 : -1.0);
    }
    return l;
}

bool ModeValidity::all_ok() const {
    return std::all_of(flags.begin(), flags.end(), [](ModeFlag f) { return f == ModeFlag::ok; });
}

double linear_band_edge(const NormalizedProfile& p) {
    // Lattice edge at k = pi: omega^2 L (C + 4 C_J) = 4, with the PMR in its
    // high-frequency limit alpha -> (omega_rt / omega_r)^2.
    const double alpha_inf = (p.omega_rt * p.omega_rt) / (p.omega_r * p.omega_r);
    double edge = std::numeric_limits<double>::infinity();
    for (int j = 0; j < p.length; ++j) {
        const double l = 1.0 / p.mu[j];
        const double c = p.nu[j] + p.gamma_c[j] * alpha_inf + 4.0 * p.beta * p.mu[j];
        edge = std::min(edge, 2.0 / std::sqrt(l * c));
    }
    return edge;
}

ModeValidity validate_modes(const ModeLadder& ladder, const NormalizedProfile& p) {
    ModeValidity v;
    v.band_edge = linear_band_edge(p);
    const double lo = std::min(p.omega_r, p.omega_rt), hi = std::max(p.omega_r, p.omega_rt);
    for (double w : ladder.frequencies) {
        const double a = std::abs(w);
        if (a >= lo && a <= hi)
            v.flags.push_back(ModeFlag::in_pmr_gap);
        else if (a >= v.band_edge)
            v.flags.push_back(ModeFlag::above_cutoff);
        else
            v.flags.push_back(ModeFlag::ok);
    }
    return v;
}

}  // namespace twpa
