#include "twpa/bessel.hpp"

#include <algorithm>
#include <cmath>

namespace twpa {

namespace {

double series(int n, double x) {
    const double h = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= h / k;
    double sum = term;
    const double h2 = h * h;
    for (int k = 1; k < 200; ++k) {
        term *= -h2 / (static_cast<double>(k) * (k + n));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Miller backward recurrence normalized by J_0 + 2 sum J_2k = 1; x > 0.
std::vector<double> miller(int nmax, double x) {
    const int start = 2 * ((std::max(nmax, static_cast<int>(x)) + 20 + static_cast<int>(std::sqrt(40.0 * std::max(nmax, static_cast<int>(x))))) / 2);
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    double jp = 0.0, j = 1e-300, norm = 0.0;
    for (int k = start; k > 0; --k) {
        const double jm = 2.0 * k / x * j - jp;
        jp = j;
        j = jm;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for (double& v : out) v *= 1e-250;
        }
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
        if (k - 1 <= nmax) out[static_cast<std::size_t>(k - 1)] = j;
    }
    norm += j;
    for (double& v : out) v /= norm;
    return out;
}

}  // namespace

std::vector<double> bessel_j_orders(int nmax, double x) {
    std::vector<double> out(static_cast<std::size_t>(std::max(nmax, 0)) + 1);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    if (ax <= 4.0) {
        for (int n = 0; n <= nmax; ++n) out[static_cast<std::size_t>(n)] = series(n, ax);
    } else {
        out = miller(std::max(nmax, 0), ax);
    }
    if (x < 0)
        for (int n = 1; n <= nmax; n += 2) out[static_cast<std::size_t>(n)] = -out[static_cast<std::size_t>(n)];
    return out;
}

double bessel_j(int n, double x) {
    const int a = std::abs(n);
    const double v = bessel_j_orders(a, x)[static_cast<std::size_t>(a)];
    return (n < 0 && (a % 2 == 1)) ? -v : v;
}

}  // namespace twpa
