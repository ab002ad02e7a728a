#pragma once

#include <string>
#include <vector>

#include "xdamp/coefficients.hpp"
#include "xdamp/detection.hpp"
#include "xdamp/fitting.hpp"
#include "xdamp/hydrogen.hpp"
#include "xdamp/liouvillian.hpp"

namespace xdamp {

struct Spectrum {
  std::vector<double> detunings;  ///< rad/s, strictly increasing
  std::vector<double> rates;      ///< photons/s
  DetectionRegion region;
  double tau_c = 0.0;
  Toggles toggles;

  void validate() const;
  std::vector<double> detunings_hz() const;
};

/// Everything that is fixed along a detuning sweep.
struct SweepSettings {
  DriveConfig drive;
  CoarseGrainConfig coarse_grain;
  QuasiSteadyOptions quasi_steady;
  unsigned threads = 0;  ///< 0 = default_thread_count()
};

/// Two windows of +-half_width natural linewidths around the two M=0
/// resonances: 2001 + 2000 points by default. rad/s.
std::vector<double> default_grid(const LevelScheme& scheme, double half_width_linewidths = 30.0,
                                 std::size_t points_per_window = 2000);

/// Throws std::invalid_argument for empty, unsorted, or too coarse grids.
void validate_grid(const std::vector<double>& grid, const LevelScheme& scheme);

/// Active-block density matrices along a detuning grid for one dissipator.
struct BlockSweep {
  std::vector<double> detunings;
  std::vector<std::size_t> states;
  std::vector<Eigen::MatrixXcd> blocks;
  Toggles toggles;
  CoarseGrainConfig coarse_grain;
};

BlockSweep sweep_blocks(const LevelScheme& scheme, const SweepSettings& settings, const Toggles& toggles,
                        const std::vector<double>& grid);

/// Contract a block sweep with the emission kernel of a region; the kernel
/// follows the sweep's cross-damping toggle.
Spectrum spectrum_from_blocks(const BlockSweep& sweep, const LevelScheme& scheme, const DetectionRegion& region);

Spectrum sweep_spectrum(const LevelScheme& scheme, const SweepSettings& settings, const DetectionRegion& region,
                        const Toggles& toggles, const std::vector<double>& grid);

/// a1/pi (b1/2)/((x-x1)^2+(b1/2)^2) + a2/pi (b2/2)/((x-omega0-x2)^2+(b2/2)^2), x in Hz.
struct DoubleLorentzianFit {
  double x1 = 0.0, x2 = 0.0;  ///< Hz; x2 relative to omega0
  double b1 = 0.0, b2 = 0.0;  ///< FWHM, Hz
  double a1 = 0.0, a2 = 0.0;  ///< areas, rate * Hz
  double omega0 = 0.0;        ///< Hz, held fixed
  double residual_norm = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;

  double operator()(double x_hz) const;
};

DoubleLorentzianFit fit_double_lorentzian(const std::vector<double>& x_hz, const std::vector<double>& y,
                                          double omega0_hz);
DoubleLorentzianFit fit_double_lorentzian(const Spectrum& spectrum, double omega0_hz);

enum class PullingDefinition { FitDifference, JentschuraHalfMax, JentschuraMax };
std::string to_string(PullingDefinition d);

struct LinePullingResult {
  double pulling_p12 = 0.0;  ///< Hz
  double pulling_p32 = 0.0;  ///< Hz
  PullingDefinition definition = PullingDefinition::FitDifference;
  double residual = 0.0;     ///< largest normalized fit residual norm involved
};

/// Delta_L = x_n(cross on) - x_n(cross off) from double-Lorentzian fits.
LinePullingResult line_pulling(const Spectrum& cross_on, const Spectrum& cross_off, double omega0_hz);

/// C/(x^2+G^2/4) + a x + b x/(x^2+G^2/4) about a nominal centre.
struct JentschuraFit {
  double c = 0.0, gamma_r = 0.0, a = 0.0, b = 0.0;
  double shift_half_max = 0.0;  ///< a G^4/(8C) + b G^2/(4C), Hz
  double shift_max = 0.0;       ///< a G^4/(32C) + b G^2/(8C), Hz
  double residual_norm = 0.0;
};

JentschuraFit jentschura_fit(const std::vector<double>& x_hz, const std::vector<double>& y, double center_hz,
                             double window_hz);
/// which_peak 0: 4P1/2 at 0; 1: 4P3/2 at omega0.
JentschuraFit jentschura_shift(const Spectrum& spectrum, int which_peak, double omega0_hz, double window_hz);

/// Jentschura shifts of the cross-on spectrum minus those of the cross-off
/// spectrum (the latter only carry the other peak's tail).
LinePullingResult jentschura_pulling(const Spectrum& cross_on, const Spectrum& cross_off, double omega0_hz,
                                     double window_hz, PullingDefinition definition);

/// Natural linewidth gamma_tot / 2 pi [Hz].
double linewidth_hz(const LevelScheme& scheme);
/// Default Jentschura window half-width: 10 linewidths [Hz].
double default_jentschura_window(const LevelScheme& scheme);

/// Region of a family at a sweep value: theta for the stripe, solid angle
/// [sr] for the cone families.
DetectionRegion region_at(RegionKind family, double value, double stripe_width = 0.01);

struct PullingPoint {
  double variable = 0.0;
  LinePullingResult fit_difference;
  LinePullingResult jentschura_half_max;
  LinePullingResult jentschura_max;
};

/// The two block sweeps (cross damping on/off) are computed once and
/// contracted with each region's kernel.
std::vector<PullingPoint> geometry_sweep(const LevelScheme& scheme, const SweepSettings& settings, RegionKind family,
                                         const std::vector<double>& values, const std::vector<double>& grid,
                                         double stripe_width = 0.01);

struct TauCPoint {
  double tau_c = 0.0;
  LinePullingResult pulling;
  double normalized_p12 = 0.0;
  double normalized_p32 = 0.0;
};

/// Fit-difference pulling versus tau_c at a fixed region, normalized to the
/// value at `reference_tau_c`.
std::vector<TauCPoint> tau_c_sweep(const LevelScheme& scheme, const SweepSettings& settings,
                                   const std::vector<double>& tau_c_grid, const DetectionRegion& region,
                                   const std::vector<double>& grid, double reference_tau_c = 1e-12);

/// Equatorial band standing in for the Omega -> 0 limit of the inverted double cone.
DetectionRegion small_equatorial_band();

}  // namespace xdamp
