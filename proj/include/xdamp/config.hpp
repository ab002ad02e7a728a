#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xdamp/coefficients.hpp"
#include "xdamp/detection.hpp"
#include "xdamp/hydrogen.hpp"
#include "xdamp/liouvillian.hpp"
#include "xdamp/spectra.hpp"

namespace xdamp {

/// Invalid configuration; `path` names the offending field (e.g. "drive.rabi_scale").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path(std::move(path)) {}
  std::string path;
};

struct GridConfig {
  double half_width_linewidths = 30.0;
  std::size_t points_per_window = 2000;
  std::vector<double> detunings_hz;  ///< explicit grid; overrides the windows when non-empty

  bool operator==(const GridConfig&) const = default;
};

struct PullingSweepConfig {
  RegionKind family = RegionKind::StripeTheta;
  std::vector<double> values;  ///< theta_rad for the stripe, solid_angle_sr for the cones
  double stripe_width_rad = 0.01;

  bool operator==(const PullingSweepConfig&) const = default;
};

struct TauCSweepConfig {
  std::vector<double> values_s;
  double reference_tau_c_s = 1e-12;
  DetectionRegion region = small_equatorial_band();

  bool operator==(const TauCSweepConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  CoarseGrainConfig coarse_grain;
  DriveConfig drive;
  std::vector<DetectionRegion> regions{DetectionRegion::stripe(0.5 * constants::pi)};
  GridConfig grid;
  PullingSweepConfig pulling;
  TauCSweepConfig tau_c;
  QuasiSteadyOptions quasi_steady;
  Toggles toggles;
  std::string output_dir = "xdamp-out";
  unsigned threads = 0;

  /// Checks every physical invariant; throws ConfigError with the field path.
  void validate() const;
  SweepSettings sweep_settings() const;
  /// Detuning grid [rad/s] for a scheme.
  std::vector<double> detuning_grid(const LevelScheme& scheme) const;
};

RunConfig default_run_config();
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& config);

}  // namespace xdamp
