#include "xdamp/coefficients.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace xdamp {
namespace {

using boost::math::quadrature::gauss_kronrod;

// g(y) = int_0^inf exp(-u^2) (1 - cos y u)/u du, y >= 0.
double g_series(double y) {
  // sum_k (-1)^(k+1) y^(2k) (k-1)! / (2 (2k)!)
  double term = y * y / 4.0;
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -y * y * k / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return sum;
}

double g_asymptotic(double y) {
  // ln y + gamma_E/2 - sum_k (2k-1)!! 2^k / (2k y^(2k))
  double sum = std::log(y) + 0.5 * constants::euler_gamma;
  double a = 1.0;  // (2k-1)!! 2^k / y^(2k)
  double prev = INFINITY;
  for (int k = 1; k < 40; ++k) {
    a *= (2.0 * k - 1.0) * 2.0 / (y * y);
    const double term = a / (2.0 * k);
    if (term > prev) break;
    sum -= term;
    prev = term;
    if (term < 1e-19 * sum) break;
  }
  return sum;
}

double g_quadrature(double y) {
  constexpr double upper = 6.5;  // exp(-42) is below double resolution
  const int panels = static_cast<int>(std::ceil(y * upper / constants::pi)) + 2;
  auto integrand = [y](double u) {
    if (u == 0.0) return 0.0;
    const double s = std::sin(0.5 * y * u);
    return 2.0 * s * s / u * std::exp(-u * u);
  };
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = upper * p / panels, b = upper * (p + 1) / panels;
    sum += gauss_kronrod<double, 31>::integrate(integrand, a, b, 8, 1e-14);
  }
  return sum;
}

double g_function(double y) {
  y = std::fabs(y);
  if (y < 1.0) return g_series(y);
  if (y > 30.0) return g_asymptotic(y);
  return g_quadrature(y);
}

}  // namespace

void CoarseGrainConfig::validate() const {
  if (!(tau_c > 0.0) || !std::isfinite(tau_c)) throw std::invalid_argument("coarse_grain.tau_c_s must be positive");
  if (!(temperature >= 0.0) || !std::isfinite(temperature))
    throw std::invalid_argument("coarse_grain.temperature_k must be non-negative");
  if (!(omega_cut > 0.0) || !std::isfinite(omega_cut))
    throw std::invalid_argument("coarse_grain.omega_cut_rad_s must be positive and finite");
}

double CoarseGrainConfig::reservoir_correlation_time() const {
  if (temperature == 0.0) return 0.0;
  return constants::hbar / (constants::k_boltzmann * temperature);
}

std::vector<std::string> CoarseGrainConfig::regime_warnings(double atomic_time) const {
  std::vector<std::string> out;
  const double tau_r = reservoir_correlation_time();
  if (tau_r > 0.0 && tau_c < 10.0 * tau_r)
    out.push_back("tau_c is not much larger than the reservoir correlation time hbar/(k_B T)");
  if (tau_c > 0.1 * atomic_time) out.push_back("tau_c is not much smaller than the atomic relaxation time");
  return out;
}

std::complex<double> fc(double delta_omega, double tau_c) {
  if (!(tau_c > 0.0)) throw std::invalid_argument("fc: tau_c must be positive");
  const double y = delta_omega * tau_c;
  if (y == 0.0) return {1.0, 0.0};
  const double sqrt_pi = std::sqrt(constants::pi);
  const double re = sqrt_pi * std::erf(0.5 * y) / y;
  const double im = 2.0 / sqrt_pi * g_function(y) / y;
  return {re, im};
}

double thermal_n(double omega, double temperature) {
  if (!(omega > 0.0)) throw std::invalid_argument("thermal_n: omega must be positive");
  if (temperature < 0.0) throw std::invalid_argument("thermal_n: negative temperature");
  if (temperature == 0.0) return 0.0;
  const double x = constants::hbar * omega / (constants::k_boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

std::complex<double> gamma_cg(const Transition& ti, const Transition& tj, const CoarseGrainConfig& cfg) {
  const std::complex<double> dot = dipole_dot(ti.dipole, tj.dipole);
  if (dot == 0.0) return 0.0;
  const double w = 0.5 * (ti.omega + tj.omega);
  return rate_prefactor() * dot * fc(ti.omega - tj.omega, cfg.tau_c) * (w * w * w);
}

std::complex<double> gamma_ficek(const Transition& ti, const Transition& tj) {
  const double w = tj.omega;
  return rate_prefactor() * dipole_dot(ti.dipole, tj.dipole) * (w * w * w);
}

double principal_value_cutoff_integral(double a, double cutoff, ShiftSign sign, double temperature, bool thermal) {
  if (!(a > 0.0) || !(cutoff > 0.0)) throw std::invalid_argument("principal value: a and cutoff must be positive");
  if (thermal && temperature == 0.0) return 0.0;
  double upper = cutoff;
  if (thermal) {
    // n(w,T) underflows beyond ~700 k_B T / hbar.
    upper = std::min(cutoff, 700.0 * constants::k_boltzmann * temperature / constants::hbar);
  }
  auto f = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double w3 = w * w * w;
    return thermal ? w3 * thermal_n(w, temperature) : w3;
  };
  auto integrate = [](auto&& fn, double lo, double hi) {
    if (hi <= lo) return 0.0;
    // Geometric panels keep the polynomial growth and the 1/(w-a) tail resolved.
    double sum = 0.0;
    double left = lo;
    const double ratio = 4.0;
    double right = (lo > 0.0) ? std::min(hi, lo * ratio) : std::min(hi, (hi - lo) * 1e-6);
    while (true) {
      sum += gauss_kronrod<double, 61>::integrate(fn, left, right, 12, 1e-13);
      if (right >= hi) break;
      left = right;
      right = std::min(hi, right * ratio);
    }
    return sum;
  };

  if (sign == ShiftSign::Plus) {
    return integrate([&](double w) { return f(w) / (w + a); }, 0.0, upper);
  }
  if (std::fabs(upper - a) < 1e-12 * a) throw std::invalid_argument("principal value: pole on integration endpoint");
  auto g = [&](double w) { return f(w) / (w - a); };
  if (upper < a) return integrate(g, 0.0, upper);

  // Excise (a - eps, a + eps). The excised piece is odd in eps:
  // I(eps) = PV - 2 f'(a) eps - f'''(a) eps^3 / 9 - ..., so Richardson
  // extrapolation removes eps, eps^3, eps^5.
  const double eps0 = 0.25 * std::min(a, upper - a);
  constexpr int levels = 4;
  double table[levels];
  for (int k = 0; k < levels; ++k) {
    const double eps = eps0 / std::pow(2.0, k);
    table[k] = integrate(g, 0.0, a - eps) + integrate(g, a + eps, upper);
  }
  for (int order = 1; order < levels; ++order) {
    const double factor = std::pow(2.0, 2 * order - 1);
    for (int k = levels - 1; k >= order; --k) table[k] = (factor * table[k] - table[k - 1]) / (factor - 1.0);
  }
  return table[levels - 1];
}

std::complex<double> cross_shift(const Transition& ti, const Transition& tj, const CoarseGrainConfig& cfg,
                                 ShiftSign sign, bool thermal) {
  const std::complex<double> dot = dipole_dot(ti.dipole, tj.dipole);
  if (dot == 0.0) return 0.0;
  const double w = 0.5 * (ti.omega + tj.omega);
  // (2/3) d.d / (pi hbar c^3) with d in e a0 -> (2/3) alpha (a0/c)^2 / pi.
  const double prefactor = 0.5 * rate_prefactor() / constants::pi;
  const double pv = principal_value_cutoff_integral(w, cfg.omega_cut, sign, cfg.temperature, thermal);
  return prefactor * dot * fc(ti.omega - tj.omega, cfg.tau_c) * pv;
}

Eigen::MatrixXcd mean_field_term(std::size_t dim, const CoarseGrainConfig& cfg, double mode_omega) {
  // <a> on a truncated thermal mode: the state is diagonal in the Fock basis
  // and a is strictly off-diagonal, so the trace vanishes identically.
  constexpr int fock = 16;
  const double n = cfg.temperature > 0.0 ? thermal_n(mode_omega, cfg.temperature) : 0.0;
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(fock, fock);
  const double ratio = n / (1.0 + n);
  double p = 1.0 / (1.0 + n);
  for (int k = 0; k < fock; ++k, p *= ratio) rho(k, k) = p;
  Eigen::MatrixXd annihilation = Eigen::MatrixXd::Zero(fock, fock);
  for (int k = 1; k < fock; ++k) annihilation(k - 1, k) = std::sqrt(static_cast<double>(k));
  const double mean = (annihilation * rho).trace();
  if (mean != 0.0) throw std::logic_error("mean_field_term: thermal reservoir has nonzero mean field");
  return Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

double GammaMatrix::hermiticity_error() const {
  const double scale = values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (values - values.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double GammaMatrix::min_eigenvalue_ratio() const {
  const Eigen::MatrixXcd herm = 0.5 * (values + values.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return ev.minCoeff() < 0.0 ? -1.0 : 0.0;
  return ev.minCoeff() / top;
}

GammaMatrix build_gamma_matrix(const LevelScheme& scheme, const CoarseGrainConfig& cfg, bool cross_damping) {
  cfg.validate();
  const auto m = static_cast<Eigen::Index>(scheme.transitions.size());
  GammaMatrix out;
  out.values = Eigen::MatrixXcd::Zero(m, m);
  std::map<double, std::complex<double>> kernel_cache;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& ti = scheme.transitions[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!cross_damping && i != j) continue;
      const auto& tj = scheme.transitions[static_cast<std::size_t>(j)];
      const std::complex<double> dot = dipole_dot(ti.dipole, tj.dipole);
      if (dot == 0.0) continue;
      const double dw = ti.omega - tj.omega;
      auto it = kernel_cache.find(dw);
      if (it == kernel_cache.end()) it = kernel_cache.emplace(dw, fc(dw, cfg.tau_c)).first;
      const double w = 0.5 * (ti.omega + tj.omega);
      out.values(i, j) = rate_prefactor() * dot * it->second * (w * w * w);
    }
  }
  return out;
}

Eigen::MatrixXcd build_ficek_matrix(const LevelScheme& scheme) {
  const auto m = static_cast<Eigen::Index>(scheme.transitions.size());
  Eigen::MatrixXcd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      out(i, j) = gamma_ficek(scheme.transitions[static_cast<std::size_t>(i)],
                              scheme.transitions[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace xdamp
