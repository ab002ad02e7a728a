#include "xdamp/detection.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace xdamp {
namespace {

using constants::pi;

// Band theta in [a, b] about z: (Omega, int k_z^2, int k_x^2).
struct BandMoments {
  double omega, zz, xx;
};

BandMoments band(double a, double b) {
  const double ca = std::cos(a), cb = std::cos(b);
  const double c1 = ca - cb, c3 = ca * ca * ca - cb * cb * cb;
  return {2.0 * pi * c1, 2.0 * pi / 3.0 * c3, pi * (c1 - c3 / 3.0)};
}

Eigen::Matrix3d from_moments(const BandMoments& m) {
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity() * m.omega;
  d(0, 0) -= m.xx;
  d(1, 1) -= m.xx;
  d(2, 2) -= m.zz;
  return 3.0 / (8.0 * pi) * d;
}

std::vector<std::pair<double, double>> polar_bands(const DetectionRegion& r) {
  switch (r.kind) {
    case RegionKind::Full4Pi: return {{0.0, pi}};
    case RegionKind::ConeAboutY: return {{0.0, r.theta}};
    case RegionKind::DoubleConeZ: return {{0.0, r.theta}, {pi - r.theta, pi}};
    case RegionKind::InvertedDoubleConeZ: return {{r.theta, pi - r.theta}};
    case RegionKind::StripeTheta:
      return {{std::max(0.0, r.theta - 0.5 * r.width), std::min(pi, r.theta + 0.5 * r.width)}};
  }
  return {};
}

}  // namespace

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Full4Pi: return "full_4pi";
    case RegionKind::ConeAboutY: return "cone_about_y";
    case RegionKind::DoubleConeZ: return "double_cone_z";
    case RegionKind::InvertedDoubleConeZ: return "inverted_double_cone_z";
    case RegionKind::StripeTheta: return "stripe_theta";
  }
  return "unknown";
}

RegionKind region_kind_from_string(const std::string& name) {
  for (auto k : {RegionKind::Full4Pi, RegionKind::ConeAboutY, RegionKind::DoubleConeZ, RegionKind::InvertedDoubleConeZ,
                 RegionKind::StripeTheta})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown detection region kind '" + name + "'");
}

DetectionRegion DetectionRegion::cone_about_y_solid_angle(double omega) {
  if (!(omega > 0.0) || omega > 4.0 * pi * (1.0 + 1e-12))
    throw std::invalid_argument("cone solid angle must lie in (0, 4pi]");
  const double c = std::clamp(1.0 - omega / (2.0 * pi), -1.0, 1.0);
  return cone_about_y(std::acos(c));
}

void DetectionRegion::validate() const {
  if (!std::isfinite(theta) || theta < 0.0 || theta > pi) throw std::invalid_argument("region.theta_rad must lie in [0, pi]");
  if (kind == RegionKind::StripeTheta && !(width > 0.0)) throw std::invalid_argument("region.width_rad must be positive");
  if (kind == RegionKind::DoubleConeZ || kind == RegionKind::InvertedDoubleConeZ) {
    if (theta > 0.5 * pi) throw std::invalid_argument("region.theta_rad of a double cone must lie in [0, pi/2]");
  }
  if (!(solid_angle() > 0.0)) throw std::invalid_argument("detection region has zero solid angle");
}

double DetectionRegion::solid_angle() const {
  double total = 0.0;
  for (auto [a, b] : polar_bands(*this)) total += band(a, b).omega;
  return total;
}

std::string DetectionRegion::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind != RegionKind::Full4Pi) os << "(theta=" << theta;
  if (kind == RegionKind::StripeTheta) os << ", width=" << width;
  if (kind != RegionKind::Full4Pi) os << ")";
  return os.str();
}

Eigen::Matrix3d detection_matrix(const DetectionRegion& region) {
  region.validate();
  if (region.kind == RegionKind::Full4Pi) return Eigen::Matrix3d::Identity();
  BandMoments total{0.0, 0.0, 0.0};
  for (auto [a, b] : polar_bands(region)) {
    const BandMoments m = band(a, b);
    total.omega += m.omega;
    total.zz += m.zz;
    total.xx += m.xx;
  }
  Eigen::Matrix3d d = from_moments(total);
  if (region.kind == RegionKind::ConeAboutY) {
    // Cap computed about z; relabel axes so that its axis is y.
    Eigen::Matrix3d p;
    p << 1, 0, 0, 0, 0, 1, 0, 1, 0;
    d = p * d * p.transpose();
  }
  return d;
}

Eigen::Matrix3d detection_matrix_quadrature(const DetectionRegion& region, int nodes) {
  region.validate();
  if (nodes != 64 && nodes != 30 && nodes != 20) throw std::invalid_argument("quadrature nodes must be 20, 30 or 64");
  auto integrate_band = [&](double a, double b) {
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    auto one = [&](auto rule) {
      for (std::size_t it = 0; it < rule.abscissa().size(); ++it) {
        for (int st = -1; st <= 1; st += 2) {
          const double xt = rule.abscissa()[it] * st;
          if (it == 0 && st == 1 && rule.abscissa().size() % 2 == 1) continue;
          const double th = 0.5 * (a + b) + 0.5 * (b - a) * xt;
          const double wt = rule.weights()[it] * 0.5 * (b - a);
          for (std::size_t ip = 0; ip < rule.abscissa().size(); ++ip) {
            for (int sp = -1; sp <= 1; sp += 2) {
              if (ip == 0 && sp == 1 && rule.abscissa().size() % 2 == 1) continue;
              const double ph = pi + pi * rule.abscissa()[ip] * sp;
              const double wp = rule.weights()[ip] * pi;
              Eigen::Vector3d k(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
              Eigen::Vector3d et(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
              Eigen::Vector3d ep(-std::sin(ph), std::cos(ph), 0.0);
              acc += wt * wp * std::sin(th) * (et * et.transpose() + ep * ep.transpose());
            }
          }
        }
      }
    };
    if (nodes == 64) one(boost::math::quadrature::gauss<double, 64>());
    else if (nodes == 30) one(boost::math::quadrature::gauss<double, 30>());
    else one(boost::math::quadrature::gauss<double, 20>());
    return acc;
  };
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  for (auto [a, b] : polar_bands(region)) d += integrate_band(a, b);
  d *= 3.0 / (8.0 * pi);
  if (region.kind == RegionKind::ConeAboutY) {
    Eigen::Matrix3d p;
    p << 1, 0, 0, 0, 0, 1, 0, 1, 0;
    d = p * d * p.transpose();
  }
  return d;
}

Eigen::Matrix3d detection_matrix_with_polarizer(const DetectionRegion&, const Eigen::Vector3d&) {
  throw std::logic_error("polarization-resolved detection is not implemented");
}

std::complex<double> gamma_omega(const Transition& ti, const Transition& tj, const Eigen::Matrix3d& d,
                                 const CoarseGrainConfig& cfg) {
  const Eigen::Vector3cd di = ti.dipole_cartesian(), dj = tj.dipole_cartesian();
  const std::complex<double> proj = di.dot(d.cast<std::complex<double>>() * dj);
  if (proj == 0.0) return 0.0;
  const double w = 0.5 * (ti.omega + tj.omega);
  return rate_prefactor() * proj * fc(ti.omega - tj.omega, cfg.tau_c) * (w * w * w);
}

std::complex<double> gamma_omega(const Transition& ti, const Transition& tj, const DetectionRegion& region,
                                 const CoarseGrainConfig& cfg) {
  return gamma_omega(ti, tj, detection_matrix(region), cfg);
}

EmissionKernel::EmissionKernel(const LevelScheme& scheme, const Eigen::Matrix3d& d, const CoarseGrainConfig& cfg,
                               bool cross_damping) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(scheme.size());
  g_ = Eigen::MatrixXcd::Zero(n, n);
  const auto& ts = scheme.transitions;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (ts[i].lower != ts[j].lower) continue;
      if (!cross_damping && i != j) continue;
      g_(static_cast<Eigen::Index>(ts[i].upper), static_cast<Eigen::Index>(ts[j].upper)) +=
          gamma_omega(ts[i], ts[j], d, cfg);
    }
  }
}

namespace {

double checked_rate(std::complex<double> value, double scale) {
  if (value.real() < -1e-12 * scale - 1e-300)
    throw ModelError("negative photon count rate " + std::to_string(value.real()) +
                     "; the damping matrix is not positive semidefinite");
  return std::max(0.0, value.real());
}

}  // namespace

double EmissionKernel::rate(const DensityMatrix& rho) const {
  if (rho.rows() != g_.rows() || rho.cols() != g_.cols()) throw ModelError("density matrix dimension mismatch");
  // tr(G rho) = sum_ee' G_ee' rho_e'e
  const std::complex<double> value = (g_.cwiseProduct(rho.transpose())).sum();
  const double scale = (g_.cwiseAbs().cwiseProduct(rho.transpose().cwiseAbs())).sum();
  return checked_rate(value, scale);
}

double EmissionKernel::rate(const Eigen::MatrixXcd& block, const std::vector<std::size_t>& states) const {
  std::complex<double> value = 0.0;
  double scale = 0.0;
  for (std::size_t a = 0; a < states.size(); ++a)
    for (std::size_t b = 0; b < states.size(); ++b) {
      const std::complex<double> g = g_(static_cast<Eigen::Index>(states[a]), static_cast<Eigen::Index>(states[b]));
      if (g == 0.0) continue;
      const std::complex<double> r = block(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
      value += g * r;
      scale += std::abs(g) * std::abs(r);
    }
  return checked_rate(value, scale);
}

double photon_count_rate(const DensityMatrix& rho, const DetectionRegion& region, const LevelScheme& scheme,
                         const CoarseGrainConfig& cfg, bool cross_damping) {
  return EmissionKernel(scheme, region, cfg, cross_damping).rate(rho);
}

}  // namespace xdamp
