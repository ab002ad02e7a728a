#include "xdamp/validate.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "xdamp/wigner.hpp"

namespace xdamp {
namespace {

using constants::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    return {name, ok, detail};
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

std::pair<bool, std::string> wigner_symmetries() {
  double worst = 0.0;
  for (int t1 = 0; t1 <= 6; ++t1)
    for (int t2 = 0; t2 <= 6; ++t2)
      for (int t3 = std::abs(t1 - t2); t3 <= t1 + t2; t3 += 2)
        for (int m1 = -t1; m1 <= t1; m1 += 2)
          for (int m2 = -t2; m2 <= t2; m2 += 2) {
            const int m3 = -m1 - m2;
            if (std::abs(m3) > t3) continue;
            auto h = HalfInt::from_twice;
            const double w = wigner3j(h(t1), h(t2), h(t3), h(m1), h(m2), h(m3));
            const double sign = ((t1 + t2 + t3) / 2) % 2 ? -1.0 : 1.0;
            worst = std::max(worst, std::fabs(wigner3j(h(t2), h(t3), h(t1), h(m2), h(m3), h(m1)) - w));
            worst = std::max(worst, std::fabs(wigner3j(h(t2), h(t1), h(t3), h(m2), h(m1), h(m3)) - sign * w));
            worst = std::max(worst, std::fabs(wigner3j(h(t1), h(t2), h(t3), h(-m1), h(-m2), h(-m3)) - sign * w));
          }
  return {worst < 1e-14, "max symmetry violation " + fmt(worst)};
}

}  // namespace

std::vector<CheckResult> run_validation(const RunConfig& config) {
  std::vector<CheckResult> out;
  const LevelScheme scheme = build_level_scheme(config.model);
  const CoarseGrainConfig& cg = config.coarse_grain;

  out.push_back(check("3j symmetry relations", wigner_symmetries));

  out.push_back(check("damping matrix Hermitian and PSD", [&] {
    const GammaMatrix g = build_gamma_matrix(scheme, cg);
    const double h = g.hermiticity_error(), r = g.min_eigenvalue_ratio();
    return std::pair{h < 1e-12 && r > -1e-8, "hermiticity " + fmt(h) + ", min/max eigenvalue " + fmt(r)};
  }));

  out.push_back(check("trace and positivity along evolution", [&] {
    const Dissipator d = build_dissipator(scheme, cg, config.toggles);
    double worst_trace = 0.0, worst_ev = 0.0;
    for (double det : {0.0, 0.5 * scheme.peak_splitting(), scheme.peak_splitting()}) {
      DriveConfig drive = config.drive;
      drive.detuning = det;
      const Liouvillian L(scheme, d, drive);
      std::vector<double> times;
      for (int k = 1; k <= 10; ++k) times.push_back(2.0 * k / scheme.gamma_tot);
      std::vector<DensityMatrix> states = evolve(L, ground_state(scheme), times).states;
      states.push_back(quasi_steady_state(L, config.quasi_steady));
      for (const auto& rho : states) {
        worst_trace = std::max(worst_trace, std::abs(rho.trace() - 1.0));
        worst_ev = std::min(worst_ev, min_eigenvalue(rho));
      }
    }
    return std::pair{worst_trace < 1e-9 && worst_ev > -1e-9,
                     "max |tr-1| " + fmt(worst_trace) + ", min eigenvalue " + fmt(worst_ev)};
  }));

  out.push_back(check("same-n cancellation of cross terms", [&] {
    std::vector<std::size_t> uppers;
    std::vector<ManifoldId> lowers;
    for (const auto& t : scheme.transitions) {
      if (std::find(uppers.begin(), uppers.end(), t.upper) == uppers.end()) uppers.push_back(t.upper);
      const ManifoldId m = scheme.states[t.lower].manifold();
      if (std::find(lowers.begin(), lowers.end(), m) == lowers.end()) lowers.push_back(m);
    }
    double worst = 0.0, scale = 0.0;
    for (std::size_t e : uppers)
      for (std::size_t e2 : uppers)
        for (const auto& g : lowers) {
          const double v = std::fabs(dfrak(scheme, e, e2, g));
          if (e == e2) scale = std::max(scale, v);
          else worst = std::max(worst, v);
        }
    const double rel = scale > 0 ? worst / scale : worst;
    return std::pair{rel < 1e-12, "max |D_ee'| / max D_ee " + fmt(rel)};
  }));

  out.push_back(check("detection matrix normalization", [&] {
    double worst = (detection_matrix(DetectionRegion::full()) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    for (const auto& r : {DetectionRegion::cone_about_y(0.7), DetectionRegion::double_cone_z(0.4),
                          DetectionRegion::inverted_double_cone_z(0.4), DetectionRegion::stripe(1.0, 0.05)})
      worst = std::max(worst, std::fabs(detection_matrix(r).trace() - 3.0 / (4.0 * pi) * r.solid_angle()));
    return std::pair{worst < 1e-12, "max deviation " + fmt(worst)};
  }));

  const SweepSettings settings = config.sweep_settings();
  const std::vector<double> grid = default_grid(scheme);
  const double magic = std::atan(std::sqrt(2.0));
  std::vector<double> thetas{0.0, magic - 0.02, magic + 0.02, 0.5 * pi, pi - magic - 0.02, pi - magic + 0.02};
  std::vector<PullingPoint> sweep;
  std::string sweep_error;
  try {
    sweep = geometry_sweep(scheme, settings, RegionKind::StripeTheta, thetas, grid);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  auto need_sweep = [&] {
    if (!sweep_error.empty()) throw std::runtime_error(sweep_error);
  };

  out.push_back(check("magic-angle sign changes", [&] {
    need_sweep();
    bool ok = true;
    std::string detail;
    for (auto [a, b] : {std::pair{1, 2}, std::pair{4, 5}}) {
      for (int peak = 0; peak < 2; ++peak) {
        auto val = [&](int k) {
          return peak == 0 ? sweep[k].fit_difference.pulling_p12 : sweep[k].fit_difference.pulling_p32;
        };
        ok = ok && val(a) * val(b) < 0.0;
        detail += fmt(val(a)) + "->" + fmt(val(b)) + " Hz; ";
      }
    }
    return std::pair{ok, detail};
  }));

  out.push_back(check("definition equivalence at theta = pi/2", [&] {
    need_sweep();
    const auto& p = sweep[3];
    const double r1 = std::fabs(p.fit_difference.pulling_p12 - p.jentschura_half_max.pulling_p12) /
                      std::fabs(p.fit_difference.pulling_p12);
    const double r2 = std::fabs(p.fit_difference.pulling_p32 - p.jentschura_half_max.pulling_p32) /
                      std::fabs(p.fit_difference.pulling_p32);
    return std::pair{r1 < 0.01 && r2 < 0.01, "relative deviations " + fmt(r1) + ", " + fmt(r2)};
  }));

  out.push_back(check("reference line pulling at theta = pi/2 within 5%", [&] {
    need_sweep();
    const auto& p = sweep[3];
    const double targets[4] = {-30326.1, 12139.5, -30547.9, 12175.9};
    const double values[4] = {p.fit_difference.pulling_p12, p.fit_difference.pulling_p32,
                              p.jentschura_half_max.pulling_p12, p.jentschura_half_max.pulling_p32};
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
      ok = ok && std::fabs(values[i] - targets[i]) <= 0.05 * std::fabs(targets[i]);
      detail += fmt(values[i]) + " vs " + fmt(targets[i]) + "; ";
    }
    return std::pair{ok, detail};
  }));

  out.push_back(check("pole pulling opposite in sign", [&] {
    need_sweep();
    const auto& p = sweep[0].fit_difference;
    const bool ok = p.pulling_p12 > 0.0 && p.pulling_p32 < 0.0;
    return std::pair{ok, fmt(p.pulling_p12) + " Hz, " + fmt(p.pulling_p32) + " Hz"};
  }));

  return out;
}

}  // namespace xdamp
