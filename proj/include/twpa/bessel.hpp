#pragma once

#include <vector>

namespace twpa {

// Integer-order Bessel function of the first kind, any sign of n.
double bessel_j(int n, double x);

// J_0..J_nmax at one argument.
std::vector<double> bessel_j_orders(int nmax, double x);

}  // namespace twpa
