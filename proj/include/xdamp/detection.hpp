#pragma once

#include <string>

#include <Eigen/Dense>

#include "xdamp/coefficients.hpp"
#include "xdamp/hydrogen.hpp"
#include "xdamp/liouvillian.hpp"

namespace xdamp {

enum class RegionKind { Full4Pi, ConeAboutY, DoubleConeZ, InvertedDoubleConeZ, StripeTheta };

std::string to_string(RegionKind kind);
RegionKind region_kind_from_string(const std::string& name);

/// Detector solid angle. Angles in radians; theta is a polar half-opening
/// angle for the cones and the stripe centre for StripeTheta.
struct DetectionRegion {
  RegionKind kind = RegionKind::Full4Pi;
  double theta = 0.0;
  double width = 0.01;  ///< stripe width in theta

  static DetectionRegion full() { return {}; }
  static DetectionRegion cone_about_y(double theta) { return {RegionKind::ConeAboutY, theta, 0.0}; }
  /// Cone about y with the given solid angle [sr].
  static DetectionRegion cone_about_y_solid_angle(double omega);
  static DetectionRegion double_cone_z(double theta) { return {RegionKind::DoubleConeZ, theta, 0.0}; }
  static DetectionRegion inverted_double_cone_z(double theta) { return {RegionKind::InvertedDoubleConeZ, theta, 0.0}; }
  static DetectionRegion stripe(double theta, double width = 0.01) { return {RegionKind::StripeTheta, theta, width}; }

  void validate() const;
  double solid_angle() const;
  std::string describe() const;

  bool operator==(const DetectionRegion&) const = default;
};

/// D = 3/(8 pi) int_region (1 - k k^T) dOmega, closed form.
Eigen::Matrix3d detection_matrix(const DetectionRegion& region);

/// Same integral by tensor-product Gauss-Legendre quadrature over the region.
Eigen::Matrix3d detection_matrix_quadrature(const DetectionRegion& region, int nodes = 64);

/// Extension point for a polarization-resolving detector; not modeled.
Eigen::Matrix3d detection_matrix_with_polarizer(const DetectionRegion& region, const Eigen::Vector3d& axis);

/// Directional damping coefficient: gamma_cg with d_i^* . d_j replaced by d_i^dagger D d_j.
std::complex<double> gamma_omega(const Transition& ti, const Transition& tj, const Eigen::Matrix3d& d,
                                 const CoarseGrainConfig& cfg);
std::complex<double> gamma_omega(const Transition& ti, const Transition& tj, const DetectionRegion& region,
                                 const CoarseGrainConfig& cfg);

/// G_ee' = sum over shared lower states g of gamma^Omega_{(g,e),(g,e')}, so that
/// the photon count rate is Re tr(G rho).
class EmissionKernel {
 public:
  EmissionKernel(const LevelScheme& scheme, const Eigen::Matrix3d& d, const CoarseGrainConfig& cfg,
                 bool cross_damping = true);
  EmissionKernel(const LevelScheme& scheme, const DetectionRegion& region, const CoarseGrainConfig& cfg,
                 bool cross_damping = true)
      : EmissionKernel(scheme, detection_matrix(region), cfg, cross_damping) {}

  const Eigen::MatrixXcd& matrix() const { return g_; }

  /// Throws ModelError when the rate is negative beyond roundoff.
  double rate(const DensityMatrix& rho) const;
  /// Rate from a block over the listed states (other entries zero).
  double rate(const Eigen::MatrixXcd& block, const std::vector<std::size_t>& states) const;

 private:
  Eigen::MatrixXcd g_;
};

double photon_count_rate(const DensityMatrix& rho, const DetectionRegion& region, const LevelScheme& scheme,
                         const CoarseGrainConfig& cfg, bool cross_damping = true);

}  // namespace xdamp
