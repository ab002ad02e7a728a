#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xdamp/coefficients.hpp"
#include "xdamp/hydrogen.hpp"

namespace xdamp {

struct DriveConfig {
  double detuning = 0.0;    ///< rad/s, laser minus the 2S F=0 -> 4P1/2 F=1 resonance
  double rabi_scale = 1e-3; ///< peak Rabi frequency in units of gamma_tot
  Eigen::Vector3d polarization = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d propagation = Eigen::Vector3d::UnitX();

  void validate() const;
  std::vector<std::string> warnings() const;
};

using DensityMatrix = Eigen::MatrixXcd;

/// Throws ModelError naming the violated invariant.
void check_density_matrix(const DensityMatrix& rho, double hermiticity_tol = 1e-12, double trace_tol = 1e-10,
                          double eigen_tol = 1e-10);
double min_eigenvalue(const DensityMatrix& rho);

struct Toggles {
  bool cross_damping = true;
  bool cross_shift = false;

  bool operator==(const Toggles&) const = default;
};

/// Sparse complex entry of an N x N operator.
struct OperatorEntry {
  std::size_t row = 0, col = 0;
  std::complex<double> value;
};

/// One term C * L_j rho L_i^dagger written entry-wise: rho_out(to_row, to_col) += coeff * rho(from_row, from_col).
struct JumpEntry {
  std::size_t to_row = 0, to_col = 0, from_row = 0, from_col = 0;
  std::complex<double> coeff;
};

/// Rotating-frame RWA Hamiltonian in units of hbar [rad/s].
Eigen::MatrixXcd build_hamiltonian(const LevelScheme& scheme, const DriveConfig& drive);

/// Off-diagonal coherent cross shifts sum_ij Delta_ij sigma_i^dagger sigma_j [rad/s].
Eigen::MatrixXcd build_cross_shift_hamiltonian(const LevelScheme& scheme, const CoarseGrainConfig& cfg);

/// Drive-independent part of the generator: dissipator plus optional cross
/// shifts. Immutable once built; combine with a drive via Liouvillian.
class Dissipator {
 public:
  std::size_t dim() const { return dim_; }
  const std::vector<JumpEntry>& jumps() const { return jumps_; }
  /// sum_ij C_ij L_i^dagger L_j (the anticommutator operator).
  const Eigen::MatrixXcd& decay_operator() const { return decay_; }
  const Eigen::MatrixXcd& shift_hamiltonian() const { return shift_; }
  const Toggles& toggles() const { return toggles_; }
  const CoarseGrainConfig& config() const { return cfg_; }
  double min_eigenvalue_ratio() const { return min_ratio_; }

 private:
  friend Dissipator build_dissipator(const LevelScheme&, const CoarseGrainConfig&, const Toggles&);
  std::size_t dim_ = 0;
  std::vector<JumpEntry> jumps_;
  Eigen::MatrixXcd decay_;
  Eigen::MatrixXcd shift_;
  Toggles toggles_;
  CoarseGrainConfig cfg_;
  double min_ratio_ = 0.0;
};

/// Lindblad dissipator sum_ij C_ij (L_j rho L_i^dagger - {L_i^dagger L_j, rho}/2)
/// with C = (1 + n) gamma for emission and n gamma^* for absorption out of
/// non-sink lower states. Terms oscillating at differences of distinct lower
/// fine-structure frames are dropped. Throws ModelError if the coefficient
/// matrix is not PSD.
Dissipator build_dissipator(const LevelScheme& scheme, const CoarseGrainConfig& cfg, const Toggles& toggles = {});

class Liouvillian {
 public:
  Liouvillian(const LevelScheme& scheme, const Dissipator& dissipator, const DriveConfig& drive);

  std::size_t dim() const { return static_cast<std::size_t>(hamiltonian_.rows()); }
  const Eigen::MatrixXcd& hamiltonian() const { return hamiltonian_; }
  const LevelScheme& scheme() const { return *scheme_; }
  const DriveConfig& drive() const { return drive_; }
  const Dissipator& dissipator() const { return *dissipator_; }

  DensityMatrix apply(const DensityMatrix& rho) const;

  /// Dense N^2 x N^2 matrix acting on column-major vec(rho).
  Eigen::MatrixXcd superoperator() const;

  /// States connected to the driven ground state through non-negligible
  /// (> 1e-30 gamma_tot) entries of H, the decay operator, or the jumps,
  /// excluding sinks. Sorted.
  std::vector<std::size_t> active_states() const;

  /// Generator restricted to rho(a, b) with a, b in `states`, column-major.
  Eigen::MatrixXcd restricted(const std::vector<std::size_t>& states) const;

 private:
  const LevelScheme* scheme_;
  const Dissipator* dissipator_;
  DriveConfig drive_;
  Eigen::MatrixXcd hamiltonian_;
  Eigen::MatrixXcd effective_;  // H - i K / 2
  std::vector<OperatorEntry> effective_nz_;
};

struct EvolveOptions {
  double tolerance = 1e-12;   ///< local error per step, relative to max(1, max |rho|)
  double min_step = 0.0;      ///< s; 0 selects 1e-14 of the span
  std::size_t max_steps = 10'000'000;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince integration of d rho/dt = L rho. Returns rho at
/// each requested output time (sorted, >= 0). Throws on step underflow.
Trajectory evolve(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<double>& output_times,
                  const EvolveOptions& options = {});
DensityMatrix evolve(const Liouvillian& L, const DensityMatrix& rho0, double t, const EvolveOptions& options = {});

DensityMatrix ground_state(const LevelScheme& scheme);

/// Density matrix of the active (reachable non-sink) block.
struct ActiveBlock {
  std::vector<std::size_t> states;
  Eigen::MatrixXcd rho;
  double eigen_mismatch = 0.0;  ///< relative distance to the slowest generator eigenmode
};

struct QuasiSteadyOptions {
  double time_in_gamma = 500.0;  ///< evolution time in units of 1/gamma_tot
  double tolerance = 1e-6;       ///< allowed mismatch against the eigenmode solve
  bool cross_check = true;
};

/// rho at t = 500/gamma_tot of the active block, from |2S F=0 M=0>, by matrix
/// exponential. Cross-checked against the slowest eigenvector of the
/// restricted generator; mismatch beyond tolerance throws.
ActiveBlock quasi_steady_block(const Liouvillian& L, const QuasiSteadyOptions& options = {});

/// Quasi-steady active blocks for many detunings of one drive shape. The
/// generator depends on the detuning only through the upper-state diagonal,
/// so the restricted generator is assembled once.
class QuasiSteadySolver {
 public:
  QuasiSteadySolver(const LevelScheme& scheme, const Dissipator& dissipator, const DriveConfig& drive,
                    const QuasiSteadyOptions& options = {});

  const std::vector<std::size_t>& states() const { return states_; }
  /// Thread-safe.
  ActiveBlock solve(double detuning) const;

 private:
  const LevelScheme* scheme_;
  QuasiSteadyOptions options_;
  double base_detuning_;
  std::vector<std::size_t> states_;
  Eigen::MatrixXcd generator_;
  Eigen::VectorXcd detuning_diagonal_;  // d generator / d detuning
  Eigen::VectorXcd x0_;
};

/// Full density matrix at t = 500/gamma_tot, including population and
/// coherences accumulated in the sink states.
DensityMatrix quasi_steady_state(const Liouvillian& L, const QuasiSteadyOptions& options = {});

}  // namespace xdamp
