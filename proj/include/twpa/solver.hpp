#pragma once

#include <vector>

#include "twpa/coupling.hpp"
#include "twpa/modes.hpp"
#include "twpa/pump.hpp"

namespace twpa {

// magnus4: two-point Gauss-Legendre Magnus step, exact J-unitarity for lossless generators.
// rk4: classical Runge-Kutta on the SIMD kernels, cheaper but only conserves flux to O(h^4).
enum class Integrator { magnus4, rk4 };
enum class NoiseQuadrature { trapezoid, simpson };  // simpson needs an even sample count per cell

struct SolverOptions {
    int substeps = 4;
    Integrator integrator = Integrator::magnus4;
    PortImpedance port;
    bool forward_backward = true;  // false drops K12 and K21
    bool include_loss = true;      // uses the profile's loss tangent
    bool noise_maps = true;        // only built when the loss rate is nonzero
    int noise_samples_per_cell = 2;  // must divide substeps
    NoiseQuadrature noise_quadrature = NoiseQuadrature::simpson;
    bool store_cells = false;      // keep per-cell propagators for field profiles
    bool allow_invalid_modes = false;
};

// Per-mode loss rate gamma(w_n) = |w_n| tan(delta), per cell.
// Diagonal E(x) = diag(exp(2 i n Phi)) on both blocks.
CMat phase_matrix(const ModeLadder& ladder, double phase);

RVec loss_rates(const ModeLadder& ladder, double loss_tangent);

// Position-dependent generator of the rotating-frame equation B' = G(x) B.
class LineModel {
public:
    LineModel(const NormalizedProfile& profile, const PumpSolution& pump, const ModeLadder& ladder,
              const SolverOptions& options);

    int m() const { return ladder_.m(); }
    int length() const { return profile_.length; }
    const ModeLadder& ladder() const { return ladder_; }
    const NormalizedProfile& profile() const { return profile_; }
    const PumpSolution& pump() const { return pump_; }
    const RVec& slot_loss() const { return slot_loss_; }  // 2m rates, forward then backward

    LocalCell cell_at(double x) const;
    double wavevector_at(double x) const { return sample_at(pump_.wavevector, x); }
    double phase_at(double x) const { return integrate_samples(pump_.wavevector, x); }
    const RVec& cell_impedance(int j) const { return cell_z_[static_cast<std::size_t>(j)]; }

    // Rotating-frame coupling K0 (no loss), and the full generator with loss and -2i k_p N.
    CMat coupling_rotating(double x) const;
    CMat generator(double x) const;
    // Lab-frame coupling K(x) = E K0 E^dagger.
    CMat coupling_lab(double x) const;

private:
    NormalizedProfile profile_;
    PumpSolution pump_;
    ModeLadder ladder_;
    SolverOptions options_;
    std::vector<RVec> cell_z_;
    std::vector<RVec> cell_h_;  // Z_x / (2 Z)
    RVec slot_loss_;
};

// Rotating-frame propagator over [x0, x1] (cell boundaries).
CMat propagate_rotating(const LineModel& model, int x0, int x1, int substeps,
                        Integrator integrator = Integrator::magnus4);
// Rotating-frame propagator over an arbitrary span with `steps` equal steps.
CMat propagate_span(const LineModel& model, double x0, double x1, int steps,
                    Integrator integrator = Integrator::magnus4);
// Lab-frame transfer matrix: E(x1) Pi_B E(x0)^dagger.
CMat transfer_matrix(const LineModel& model, int x0, int x1, int substeps,
                     Integrator integrator = Integrator::magnus4);

struct ScatteringResult {
    ModeLadder ladder;
    CMat s0;                        // outputs [out+(L); out-(0)], inputs [in+(0); in-(L)]
    std::vector<CMat> sn;           // noise maps at sn_positions
    std::vector<double> sn_positions;
    std::vector<double> sn_weights;  // trapezoid weights
    RVec slot_loss;                 // Gamma per forward/backward slot
    RVec z_left, z_right;           // device impedance at the ports, normalized
    RVec z_port;                    // normalized port impedance per mode
    double condition = 0.0;         // boundary system condition number
    double pump_phase_total = 0.0;
    // Optional, for field profiles.
    std::vector<CMat> cells;        // rotating-frame per-cell propagators
    CMat b0, bl;
    bool lossy() const { return !sn.empty(); }
};

ScatteringResult solve_scattering(const LineModel& model, const SolverOptions& options);

ScatteringResult solve_scattering(const NormalizedProfile& profile, const PumpSolution& pump,
                                  const ModeLadder& ladder, const SolverOptions& options);

// Max-norm residual of S J S^dagger + sum_k w_k Sn_k Gamma J Sn_k^dagger - J.
double pseudo_unitarity_residual(const ScatteringResult& r);

// |A_n^+(x)|^2 and |A_n^-(x)|^2 at cell boundaries for a unit input in `input_slot`.
// Needs store_cells. Rows are positions, columns are 2m slots.
Eigen::MatrixXd internal_fields(const ScatteringResult& r, int input_slot);

}  // namespace twpa
