#include "xdamp/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "xdamp/parallel.hpp"

namespace xdamp {
namespace {

using constants::pi;

std::vector<double> to_hz(const std::vector<double>& w) {
  std::vector<double> out(w.size());
  std::transform(w.begin(), w.end(), out.begin(), [](double v) { return v / (2.0 * pi); });
  return out;
}

// Index range [lo, hi) of the sorted x within [a, b].
std::pair<std::size_t, std::size_t> window(const std::vector<double>& x, double a, double b) {
  const auto lo = std::lower_bound(x.begin(), x.end(), a) - x.begin();
  const auto hi = std::upper_bound(x.begin(), x.end(), b) - x.begin();
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

struct PeakGuess {
  double position, width, area, height;
};

PeakGuess guess_peak(const std::vector<double>& x, const std::vector<double>& y, std::size_t lo, std::size_t hi,
                     double global_max) {
  if (hi <= lo + 4) throw FitError("spectrum has too few points around a resonance", {});
  std::size_t k = lo;
  for (std::size_t i = lo; i < hi; ++i)
    if (y[i] > y[k]) k = i;
  const double height = y[k];
  if (!(height > 1e-6 * global_max) || k == lo || k + 1 == hi)
    throw FitError("degenerate spectrum: no interior maximum for one of the two resonances", {});
  auto crossing = [&](int dir) {
    std::size_t i = k;
    while (true) {
      const std::size_t j = dir > 0 ? i + 1 : i - 1;
      if ((dir > 0 && j >= hi) || (dir < 0 && i == lo)) throw FitError("degenerate spectrum: no half-maximum crossing", {});
      if (y[j] < 0.5 * height) return x[i] + (x[j] - x[i]) * (y[i] - 0.5 * height) / (y[i] - y[j]);
      i = j;
    }
  };
  const double width = crossing(+1) - crossing(-1);
  double area = 0.0;
  for (std::size_t i = lo + 1; i < hi; ++i) area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return {x[k], width, area, height};
}

// Lorentzian A/pi (B/2)/(d^2+(B/2)^2) and its partial derivatives in (A, X, B).
struct LorentzValue {
  double f, da, dx, db;
};

LorentzValue lorentz(double u, double a, double x, double b) {
  const double h = 0.5 * b, d = u - x, q = d * d + h * h;
  return {a / pi * h / q, h / (pi * q), a / pi * h * 2.0 * d / (q * q), a / (2.0 * pi) * (d * d - h * h) / (q * q)};
}

}  // namespace

void Spectrum::validate() const {
  if (detunings.empty() || detunings.size() != rates.size()) throw std::invalid_argument("spectrum: size mismatch");
  for (std::size_t i = 1; i < detunings.size(); ++i)
    if (!(detunings[i] > detunings[i - 1])) throw std::invalid_argument("spectrum: detunings not strictly increasing");
  for (double r : rates)
    if (!(r >= 0.0)) throw std::invalid_argument("spectrum: negative or non-finite rate");
}

std::vector<double> Spectrum::detunings_hz() const { return to_hz(detunings); }

double linewidth_hz(const LevelScheme& scheme) { return scheme.gamma_tot / (2.0 * pi); }

double default_jentschura_window(const LevelScheme& scheme) { return 10.0 * linewidth_hz(scheme); }

std::vector<double> default_grid(const LevelScheme& scheme, double half_width_linewidths,
                                 std::size_t points_per_window) {
  if (!(half_width_linewidths > 0.0) || points_per_window < 2) throw std::invalid_argument("invalid grid parameters");
  const double half = half_width_linewidths * scheme.gamma_tot;
  const double w0 = scheme.peak_splitting();
  std::vector<double> grid;
  const std::size_t n1 = points_per_window + 1;
  for (std::size_t i = 0; i < n1; ++i) grid.push_back(-half + 2.0 * half * static_cast<double>(i) / (n1 - 1));
  for (std::size_t i = 0; i < points_per_window; ++i)
    grid.push_back(w0 - half + 2.0 * half * static_cast<double>(i) / (points_per_window - 1));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void validate_grid(const std::vector<double>& grid, const LevelScheme& scheme) {
  if (grid.empty()) throw std::invalid_argument("detuning grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("detuning grid must be strictly increasing");
  const double gamma = scheme.gamma_tot;
  for (double peak : {0.0, scheme.peak_splitting()}) {
    if (grid.front() > peak - gamma || grid.back() < peak + gamma)
      throw std::invalid_argument("detuning grid must cover both resonances by at least one linewidth");
    auto [lo, hi] = window(grid, peak - gamma, peak + gamma);
    double spacing = 0.0;
    for (std::size_t i = std::max<std::size_t>(lo, 1); i < std::min(hi + 1, grid.size()); ++i)
      spacing = std::max(spacing, grid[i] - grid[i - 1]);
    if (spacing > gamma / 20.0) throw std::invalid_argument("detuning grid needs >= 20 points per linewidth");
  }
}

BlockSweep sweep_blocks(const LevelScheme& scheme, const SweepSettings& settings, const Toggles& toggles,
                        const std::vector<double>& grid) {
  const Dissipator diss = build_dissipator(scheme, settings.coarse_grain, toggles);
  const QuasiSteadySolver solver(scheme, diss, settings.drive, settings.quasi_steady);
  BlockSweep out;
  out.detunings = grid;
  out.states = solver.states();
  out.toggles = toggles;
  out.coarse_grain = settings.coarse_grain;
  out.blocks.resize(grid.size());
  parallel_for(grid.size(), settings.threads, [&](std::size_t i) { out.blocks[i] = solver.solve(grid[i]).rho; });
  return out;
}

Spectrum spectrum_from_blocks(const BlockSweep& sweep, const LevelScheme& scheme, const DetectionRegion& region) {
  const EmissionKernel kernel(scheme, region, sweep.coarse_grain, sweep.toggles.cross_damping);
  Spectrum s;
  s.detunings = sweep.detunings;
  s.region = region;
  s.tau_c = sweep.coarse_grain.tau_c;
  s.toggles = sweep.toggles;
  s.rates.resize(sweep.blocks.size());
  for (std::size_t i = 0; i < sweep.blocks.size(); ++i) {
    try {
      s.rates[i] = kernel.rate(sweep.blocks[i], sweep.states);
    } catch (const ModelError& e) {
      std::ostringstream os;
      os << e.what() << " at detuning " << sweep.detunings[i] << " rad/s";
      throw ModelError(os.str());
    }
  }
  return s;
}

Spectrum sweep_spectrum(const LevelScheme& scheme, const SweepSettings& settings, const DetectionRegion& region,
                        const Toggles& toggles, const std::vector<double>& grid) {
  validate_grid(grid, scheme);
  region.validate();
  return spectrum_from_blocks(sweep_blocks(scheme, settings, toggles, grid), scheme, region);
}

double DoubleLorentzianFit::operator()(double x) const {
  return lorentz(x, a1, x1, b1).f + lorentz(x, a2, omega0 + x2, b2).f;
}

DoubleLorentzianFit fit_double_lorentzian(const std::vector<double>& x, const std::vector<double>& y,
                                          double omega0) {
  if (x.size() != y.size() || x.size() < 8) throw FitError("double Lorentzian fit needs at least 8 points", {});
  const double ymax = *std::max_element(y.begin(), y.end());
  if (!(ymax > 0.0)) throw FitError("double Lorentzian fit of an all-zero spectrum", {});
  const auto split = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), 0.5 * omega0) - x.begin());
  const PeakGuess g1 = guess_peak(x, y, 0, split, ymax);
  const PeakGuess g2 = guess_peak(x, y, split, x.size(), ymax);

  // Scaled problem: x in units of the first width, y in units of the maximum.
  const double xs = g1.width;
  const double w0 = omega0 / xs;
  const std::size_t m = x.size();
  ResidualFunction fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(static_cast<Eigen::Index>(m));
    if (jac) jac->resize(static_cast<Eigen::Index>(m), 6);
    for (std::size_t i = 0; i < m; ++i) {
      const double u = x[i] / xs;
      const LorentzValue l1 = lorentz(u, p(0), p(1), p(2));
      const LorentzValue l2 = lorentz(u, p(3), w0 + p(4), p(5));
      const auto k = static_cast<Eigen::Index>(i);
      r(k) = l1.f + l2.f - y[i] / ymax;
      if (jac) {
        (*jac)(k, 0) = l1.da;
        (*jac)(k, 1) = l1.dx;
        (*jac)(k, 2) = l1.db;
        (*jac)(k, 3) = l2.da;
        (*jac)(k, 4) = l2.dx;
        (*jac)(k, 5) = l2.db;
      }
    }
  };
  Eigen::VectorXd p0(6);
  p0 << g1.area / (ymax * xs), g1.position / xs, g1.width / xs, g2.area / (ymax * xs), (g2.position - omega0) / xs,
      g2.width / xs;
  const LeastSquaresResult res = least_squares(fn, m, p0);
  const Eigen::VectorXd& p = res.params;
  DoubleLorentzianFit f;
  f.a1 = p(0) * ymax * xs;
  f.x1 = p(1) * xs;
  f.b1 = p(2) * xs;
  f.a2 = p(3) * ymax * xs;
  f.x2 = p(4) * xs;
  f.b2 = p(5) * xs;
  f.omega0 = omega0;
  f.residual_norm = res.residual_norm / std::sqrt(static_cast<double>(m));
  f.gradient_norm = res.gradient_norm;
  f.converged = res.converged;
  if (!(f.a1 > 0.0 && f.a2 > 0.0 && f.b1 > 0.0 && f.b2 > 0.0))
    throw FitError("double Lorentzian fit produced non-positive widths or areas", p);
  return f;
}

DoubleLorentzianFit fit_double_lorentzian(const Spectrum& spectrum, double omega0_hz) {
  spectrum.validate();
  return fit_double_lorentzian(spectrum.detunings_hz(), spectrum.rates, omega0_hz);
}

std::string to_string(PullingDefinition d) {
  switch (d) {
    case PullingDefinition::FitDifference: return "fit-difference";
    case PullingDefinition::JentschuraHalfMax: return "jentschura-halfmax";
    case PullingDefinition::JentschuraMax: return "jentschura-max";
  }
  return "unknown";
}

LinePullingResult line_pulling(const Spectrum& on, const Spectrum& off, double omega0_hz) {
  if (on.detunings != off.detunings) throw std::invalid_argument("line pulling needs identical detuning grids");
  if (!(on.region == off.region) || on.tau_c != off.tau_c)
    throw std::invalid_argument("line pulling needs identical metadata apart from the toggle");
  const DoubleLorentzianFit fon = fit_double_lorentzian(on, omega0_hz);
  const DoubleLorentzianFit foff = fit_double_lorentzian(off, omega0_hz);
  LinePullingResult r;
  r.pulling_p12 = fon.x1 - foff.x1;
  r.pulling_p32 = fon.x2 - foff.x2;
  r.definition = PullingDefinition::FitDifference;
  r.residual = std::max(fon.residual_norm, foff.residual_norm);
  return r;
}

JentschuraFit jentschura_fit(const std::vector<double>& x, const std::vector<double>& y, double center,
                             double window_hz) {
  if (x.size() != y.size()) throw FitError("jentschura fit: size mismatch", {});
  if (!(window_hz > 0.0)) throw std::invalid_argument("jentschura fit: window must be positive");
  auto [lo, hi] = window(x, center - window_hz, center + window_hz);
  if (hi < lo + 8) throw FitError("jentschura fit: fewer than 8 points in the window", {});
  double ymax = 0.0;
  for (std::size_t i = lo; i < hi; ++i) ymax = std::max(ymax, y[i]);
  if (!(ymax > 0.0)) throw FitError("jentschura fit: all-zero window", {});
  const PeakGuess g = guess_peak(x, y, lo, hi, ymax);
  const double xs = g.width;
  const std::size_t m = hi - lo;
  ResidualFunction fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(static_cast<Eigen::Index>(m));
    if (jac) jac->resize(static_cast<Eigen::Index>(m), 4);
    const double c = p(0), gr = p(1), a = p(2), b = p(3);
    for (std::size_t i = 0; i < m; ++i) {
      const double u = (x[lo + i] - center) / xs;
      const double q = u * u + 0.25 * gr * gr;
      const auto k = static_cast<Eigen::Index>(i);
      r(k) = c / q + a * u + b * u / q - y[lo + i] / ymax;
      if (jac) {
        (*jac)(k, 0) = 1.0 / q;
        (*jac)(k, 1) = -(c + b * u) * 0.5 * gr / (q * q);
        (*jac)(k, 2) = u;
        (*jac)(k, 3) = u / q;
      }
    }
  };
  Eigen::VectorXd p0(4);
  p0 << 0.25, 1.0, 0.0, 0.0;
  const LeastSquaresResult res = least_squares(fn, m, p0);
  const Eigen::VectorXd& p = res.params;
  JentschuraFit f;
  f.c = p(0) * ymax * xs * xs;
  f.gamma_r = std::fabs(p(1)) * xs;
  f.a = p(2) * ymax / xs;
  f.b = p(3) * ymax * xs;
  if (!(f.c > 0.0)) throw FitError("jentschura fit: non-positive amplitude", p);
  const double g2 = f.gamma_r * f.gamma_r, g4 = g2 * g2;
  f.shift_half_max = f.a * g4 / (8.0 * f.c) + f.b * g2 / (4.0 * f.c);
  f.shift_max = f.a * g4 / (32.0 * f.c) + f.b * g2 / (8.0 * f.c);
  f.residual_norm = res.residual_norm / std::sqrt(static_cast<double>(m));
  return f;
}

JentschuraFit jentschura_shift(const Spectrum& spectrum, int which_peak, double omega0_hz, double window_hz) {
  if (which_peak != 0 && which_peak != 1) throw std::invalid_argument("which_peak must be 0 or 1");
  spectrum.validate();
  return jentschura_fit(spectrum.detunings_hz(), spectrum.rates, which_peak == 0 ? 0.0 : omega0_hz, window_hz);
}

LinePullingResult jentschura_pulling(const Spectrum& on, const Spectrum& off, double omega0_hz, double window_hz,
                                     PullingDefinition definition) {
  if (definition == PullingDefinition::FitDifference)
    throw std::invalid_argument("jentschura_pulling needs a Jentschura definition");
  const bool half = definition == PullingDefinition::JentschuraHalfMax;
  LinePullingResult r;
  r.definition = definition;
  double p[2];
  for (int peak = 0; peak < 2; ++peak) {
    const JentschuraFit a = jentschura_shift(on, peak, omega0_hz, window_hz);
    const JentschuraFit b = jentschura_shift(off, peak, omega0_hz, window_hz);
    p[peak] = half ? a.shift_half_max - b.shift_half_max : a.shift_max - b.shift_max;
    r.residual = std::max({r.residual, a.residual_norm, b.residual_norm});
  }
  r.pulling_p12 = p[0];
  r.pulling_p32 = p[1];
  return r;
}

DetectionRegion region_at(RegionKind family, double value, double stripe_width) {
  const double four_pi = 4.0 * pi;
  auto check_solid_angle = [&] {
    if (!(value > 0.0) || value > four_pi * (1.0 + 1e-12))
      throw std::invalid_argument("solid angle must lie in (0, 4pi]");
  };
  switch (family) {
    case RegionKind::Full4Pi: return DetectionRegion::full();
    case RegionKind::StripeTheta: return DetectionRegion::stripe(value, stripe_width);
    case RegionKind::ConeAboutY: return DetectionRegion::cone_about_y_solid_angle(value);
    case RegionKind::DoubleConeZ:
      check_solid_angle();
      return DetectionRegion::double_cone_z(std::acos(std::clamp(1.0 - value / four_pi, 0.0, 1.0)));
    case RegionKind::InvertedDoubleConeZ:
      check_solid_angle();
      return DetectionRegion::inverted_double_cone_z(std::acos(std::clamp(value / four_pi, 0.0, 1.0)));
  }
  throw std::invalid_argument("unknown region family");
}

DetectionRegion small_equatorial_band() { return DetectionRegion::inverted_double_cone_z(0.5 * pi - 0.005); }

std::vector<PullingPoint> geometry_sweep(const LevelScheme& scheme, const SweepSettings& settings, RegionKind family,
                                         const std::vector<double>& values, const std::vector<double>& grid,
                                         double stripe_width) {
  if (values.empty()) throw std::invalid_argument("geometry sweep: empty angle grid");
  std::vector<DetectionRegion> regions;
  for (double v : values) {
    regions.push_back(region_at(family, v, stripe_width));
    regions.back().validate();
  }
  validate_grid(grid, scheme);
  Toggles on = {}, off = {};
  on.cross_damping = true;
  off.cross_damping = false;
  const BlockSweep bon = sweep_blocks(scheme, settings, on, grid);
  const BlockSweep boff = sweep_blocks(scheme, settings, off, grid);
  const double w0 = scheme.peak_splitting() / (2.0 * pi);
  const double win = default_jentschura_window(scheme);
  std::vector<PullingPoint> out(values.size());
  parallel_for(values.size(), settings.threads, [&](std::size_t k) {
    const Spectrum son = spectrum_from_blocks(bon, scheme, regions[k]);
    const Spectrum soff = spectrum_from_blocks(boff, scheme, regions[k]);
    PullingPoint& p = out[k];
    p.variable = values[k];
    p.fit_difference = line_pulling(son, soff, w0);
    p.jentschura_half_max = jentschura_pulling(son, soff, w0, win, PullingDefinition::JentschuraHalfMax);
    p.jentschura_max = jentschura_pulling(son, soff, w0, win, PullingDefinition::JentschuraMax);
  });
  return out;
}

std::vector<TauCPoint> tau_c_sweep(const LevelScheme& scheme, const SweepSettings& settings,
                                   const std::vector<double>& tau_c_grid, const DetectionRegion& region,
                                   const std::vector<double>& grid, double reference_tau_c) {
  if (tau_c_grid.empty()) throw std::invalid_argument("tau_c sweep: empty grid");
  for (double t : tau_c_grid)
    if (!(t > 0.0)) throw std::invalid_argument("tau_c sweep: values must be positive");
  validate_grid(grid, scheme);
  region.validate();
  const double w0 = scheme.peak_splitting() / (2.0 * pi);

  // Without cross terms the generator does not depend on tau_c.
  Toggles off;
  off.cross_damping = false;
  const BlockSweep boff = sweep_blocks(scheme, settings, off, grid);

  auto pulling_at = [&](double tau_c) {
    SweepSettings s = settings;
    s.coarse_grain.tau_c = tau_c;
    BlockSweep bon = sweep_blocks(scheme, s, Toggles{}, grid);
    BlockSweep boff_t = boff;
    boff_t.coarse_grain.tau_c = tau_c;
    return line_pulling(spectrum_from_blocks(bon, scheme, region), spectrum_from_blocks(boff_t, scheme, region), w0);
  };

  std::vector<TauCPoint> out;
  std::optional<LinePullingResult> reference;
  for (double t : tau_c_grid) {
    out.push_back({t, pulling_at(t), 0.0, 0.0});
    if (t == reference_tau_c) reference = out.back().pulling;
  }
  if (!reference) reference = pulling_at(reference_tau_c);
  for (auto& p : out) {
    p.normalized_p12 = p.pulling.pulling_p12 / reference->pulling_p12;
    p.normalized_p32 = p.pulling.pulling_p32 / reference->pulling_p32;
  }
  return out;
}

}  // namespace xdamp
