#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace twpa {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFluxQuantum = 2.067833848e-15;
inline constexpr double kReducedFluxQuantum = kFluxQuantum / (2.0 * kPi);

// Error classes map onto CLI exit codes 1, 2 and 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A ladder mode falls in the PMR gap or above the band edge.
struct LadderError : ConfigError {
    using ConfigError::ConfigError;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace twpa
