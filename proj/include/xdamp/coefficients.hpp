#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xdamp/constants.hpp"
#include "xdamp/hydrogen.hpp"

namespace xdamp {

/// Free parameters of the coarse-grained generator.
struct CoarseGrainConfig {
  double tau_c = 1e-12;                                     ///< s
  double temperature = 300.0;                               ///< K
  double omega_cut = constants::electron_rest_frequency;    ///< rad/s

  /// Throws std::invalid_argument on non-physical values.
  void validate() const;
  /// hbar / (k_B T) [s]; zero at T = 0.
  double reservoir_correlation_time() const;
  /// Messages for tau_c outside tau_R << tau_c << tau_A.
  std::vector<std::string> regime_warnings(double atomic_time) const;

  bool operator==(const CoarseGrainConfig&) const = default;
};

/// (4/3) alpha (a0/c)^2: converts omega^3 |d|^2 (d in e a0) to a rate.
inline constexpr double rate_prefactor() {
  return 4.0 / 3.0 * constants::alpha * (constants::bohr_radius / constants::c) * (constants::bohr_radius / constants::c);
}

/// Gaussian-averaged coarse-graining kernel
///   F_c(dw) = int_0^inf dt f(t) exp(i dw t/2) sinc(dw t/2),
///   f(t) = N exp(-t^2/tau_c^2).
/// The real part is closed-form (erf). The imaginary part is
/// (2/sqrt(pi)) g(y)/y with y = dw tau_c and
/// g(y) = int_0^inf exp(-u^2) (1 - cos y u)/u du, evaluated by power series,
/// Gauss-Kronrod panels, or its large-y asymptotic expansion.
std::complex<double> fc(double delta_omega, double tau_c);

/// Bose-Einstein occupation; 0 at T = 0.
double thermal_n(double omega, double temperature);

/// Coarse-grained damping coefficient gamma_ij [rad/s] (no thermal factor).
std::complex<double> gamma_cg(const Transition& ti, const Transition& tj, const CoarseGrainConfig& cfg);

/// Asymmetric comparison coefficient K d_i^* . d_j omega_j^3.
std::complex<double> gamma_ficek(const Transition& ti, const Transition& tj);

enum class ShiftSign { Plus, Minus };

/// P int_0^W dw w^3 [n(w,T)] / (w +- a) by symmetric excision of the pole and
/// Richardson extrapolation in the excision half-width.
double principal_value_cutoff_integral(double a, double cutoff, ShiftSign sign, double temperature, bool thermal);

/// Lowest-order cross shift Delta_ij^{+-} (thermal=false) or Delta_ij^{T+-}.
std::complex<double> cross_shift(const Transition& ti, const Transition& tj, const CoarseGrainConfig& cfg,
                                 ShiftSign sign, bool thermal);

/// First-moment term Tr_R{R V}: zero for a thermal reservoir. The zero-mean
/// field is checked on a truncated thermal mode before returning.
Eigen::MatrixXcd mean_field_term(std::size_t dim, const CoarseGrainConfig& cfg, double mode_omega);

/// Matrix of gamma_ij over all transitions of a scheme.
struct GammaMatrix {
  Eigen::MatrixXcd values;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  /// max |g_ij - conj(g_ji)| / max |g_ij|
  double hermiticity_error() const;
  /// Smallest over largest eigenvalue of the Hermitian part.
  double min_eigenvalue_ratio() const;
  bool is_psd(double tolerance = 1e-8) const { return min_eigenvalue_ratio() >= -tolerance; }
};

GammaMatrix build_gamma_matrix(const LevelScheme& scheme, const CoarseGrainConfig& cfg, bool cross_damping = true);

/// Ficek-form matrix, diagnostic only.
Eigen::MatrixXcd build_ficek_matrix(const LevelScheme& scheme);

}  // namespace xdamp
