#include "xdamp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace xdamp {
namespace {

using nlohmann::json;
using constants::pi;

std::vector<double> default_pulling_values() {
  std::vector<double> v;
  for (int i = 0; i <= 60; ++i) v.push_back(pi * i / 60.0);
  return v;
}

std::vector<double> default_tau_c_values() {
  std::vector<double> v;
  for (int e = -13; e <= -9; ++e)
    for (double m : {1.0, 3.0}) {
      const double t = m * std::pow(10.0, e);
      if (t <= 1e-9 * (1 + 1e-12)) v.push_back(t);
    }
  return v;
}

// Reads json with path-aware errors and rejects unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const {
    used_.push_back(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) const { return j_.at(key); }

  template <class T>
  void get(const std::string& key, T& out) const {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type (") + e.what() + ")");
    }
  }
  void get(const std::string& key, std::optional<double>& out) const {
    used_.push_back(key);
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    double v = 0.0;
    get(key, v);
    out = v;
  }
  void vec3(const std::string& key, Eigen::Vector3d& out) const {
    std::vector<double> v;
    get(key, v);
    if (!has(key)) return;
    if (v.size() != 3) throw ConfigError(field(key), "expected three components");
    out = Eigen::Vector3d(v[0], v[1], v[2]);
  }
  Reader child(const std::string& key) const {
    has(key);
    return Reader(j_.at(key), field(key));
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (std::find(used_.begin(), used_.end(), it.key()) == used_.end())
        throw ConfigError(field(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  mutable std::vector<std::string> used_;
};

DetectionRegion parse_region(const Reader& r) {
  DetectionRegion region;
  std::string kind = to_string(region.kind);
  r.get("kind", kind);
  try {
    region.kind = region_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(r.field("kind"), e.what());
  }
  r.get("theta_rad", region.theta);
  r.get("width_rad", region.width);
  if (r.has("solid_angle_sr")) {
    double omega = 0.0;
    r.get("solid_angle_sr", omega);
    try {
      region = region_at(region.kind, omega, region.width);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(r.field("solid_angle_sr"), e.what());
    }
  }
  r.finish();
  return region;
}

json region_json(const DetectionRegion& r) {
  return json{{"kind", to_string(r.kind)}, {"theta_rad", r.theta}, {"width_rad", r.width}};
}

template <class F>
void rethrow_as(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  c.pulling.values = default_pulling_values();
  c.tau_c.values_s = default_tau_c_values();
  return c;
}

void RunConfig::validate() const {
  rethrow_as("model", [&] { build_level_scheme(model); });
  if (!(coarse_grain.tau_c > 0.0) || !std::isfinite(coarse_grain.tau_c))
    throw ConfigError("coarse_grain.tau_c_s", "must be positive");
  if (!(coarse_grain.temperature >= 0.0) || !std::isfinite(coarse_grain.temperature))
    throw ConfigError("coarse_grain.temperature_k", "must be non-negative");
  if (!(coarse_grain.omega_cut > 0.0) || !std::isfinite(coarse_grain.omega_cut))
    throw ConfigError("coarse_grain.omega_cut_rad_s", "must be positive");
  if (!std::isfinite(drive.detuning)) throw ConfigError("drive.detuning_hz", "must be finite");
  if (!(drive.rabi_scale >= 0.0)) throw ConfigError("drive.rabi_scale", "must be non-negative");
  if (std::fabs(drive.polarization.norm() - 1.0) > 1e-9) throw ConfigError("drive.polarization", "must be a unit vector");
  if (std::fabs(drive.propagation.norm() - 1.0) > 1e-9) throw ConfigError("drive.propagation", "must be a unit vector");
  if (std::fabs(drive.polarization.dot(drive.propagation)) > 1e-9)
    throw ConfigError("drive.polarization", "must be perpendicular to drive.propagation");
  if (regions.empty()) throw ConfigError("regions", "at least one detection region is required");
  for (std::size_t i = 0; i < regions.size(); ++i)
    rethrow_as("regions[" + std::to_string(i) + "]", [&] { regions[i].validate(); });
  if (grid.detunings_hz.empty()) {
    if (!(grid.half_width_linewidths > 0.0)) throw ConfigError("grid.half_width_linewidths", "must be positive");
    if (grid.points_per_window < 2) throw ConfigError("grid.points_per_window", "must be at least 2");
  }
  rethrow_as("grid", [&] {
    const LevelScheme scheme = build_level_scheme(model);
    validate_grid(detuning_grid(scheme), scheme);
  });
  if (pulling.values.empty()) throw ConfigError("pulling.values", "empty sweep grid");
  for (std::size_t i = 0; i < pulling.values.size(); ++i)
    rethrow_as("pulling.values[" + std::to_string(i) + "]",
               [&] { region_at(pulling.family, pulling.values[i], pulling.stripe_width_rad).validate(); });
  if (tau_c.values_s.empty()) throw ConfigError("tau_c.values_s", "empty sweep grid");
  for (double t : tau_c.values_s)
    if (!(t > 0.0)) throw ConfigError("tau_c.values_s", "values must be positive");
  if (!(tau_c.reference_tau_c_s > 0.0)) throw ConfigError("tau_c.reference_tau_c_s", "must be positive");
  rethrow_as("tau_c.region", [&] { tau_c.region.validate(); });
  if (!(quasi_steady.time_in_gamma > 0.0)) throw ConfigError("quasi_steady.time_in_gamma", "must be positive");
  if (!(quasi_steady.tolerance > 0.0)) throw ConfigError("quasi_steady.tolerance", "must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

SweepSettings RunConfig::sweep_settings() const {
  SweepSettings s;
  s.drive = drive;
  s.coarse_grain = coarse_grain;
  s.quasi_steady = quasi_steady;
  s.threads = threads;
  return s;
}

std::vector<double> RunConfig::detuning_grid(const LevelScheme& scheme) const {
  if (grid.detunings_hz.empty()) return default_grid(scheme, grid.half_width_linewidths, grid.points_per_window);
  std::vector<double> out;
  for (double hz : grid.detunings_hz) out.push_back(2.0 * pi * hz);
  return out;
}

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  RunConfig c = default_run_config();
  const Reader r(root, "");

  if (r.has("model")) {
    const Reader m = r.child("model");
    m.get("fine_structure_4p_hz", c.model.fine_structure_4p_hz);
    m.get("hyperfine_4p12_hz", c.model.hyperfine_4p12_hz);
    m.get("hyperfine_4p32_hz", c.model.hyperfine_4p32_hz);
    m.get("hyperfine_2s_hz", c.model.hyperfine_2s_hz);
    m.get("compute_missing_splittings", c.model.compute_missing_splittings);
    m.get("lower_hyperfine_resolved", c.model.lower_hyperfine_resolved);
    m.get("gamma_scale", c.model.gamma_scale);
    m.get("sink_manifolds", c.model.sink_manifolds);
    m.finish();
  }
  if (r.has("coarse_grain")) {
    const Reader g = r.child("coarse_grain");
    g.get("tau_c_s", c.coarse_grain.tau_c);
    g.get("temperature_k", c.coarse_grain.temperature);
    g.get("omega_cut_rad_s", c.coarse_grain.omega_cut);
    g.finish();
  }
  if (r.has("drive")) {
    const Reader d = r.child("drive");
    double hz = c.drive.detuning / (2.0 * pi);
    d.get("detuning_hz", hz);
    c.drive.detuning = 2.0 * pi * hz;
    d.get("rabi_scale", c.drive.rabi_scale);
    d.vec3("polarization", c.drive.polarization);
    d.vec3("propagation", c.drive.propagation);
    d.finish();
  }
  if (r.has("regions")) {
    const json& list = r.at("regions");
    if (!list.is_array()) throw ConfigError("regions", "expected an array");
    c.regions.clear();
    for (std::size_t i = 0; i < list.size(); ++i)
      c.regions.push_back(parse_region(Reader(list[i], "regions[" + std::to_string(i) + "]")));
  }
  if (r.has("grid")) {
    const Reader g = r.child("grid");
    g.get("half_width_linewidths", c.grid.half_width_linewidths);
    g.get("points_per_window", c.grid.points_per_window);
    g.get("detunings_hz", c.grid.detunings_hz);
    if (g.has("detunings_hz") && c.grid.detunings_hz.empty()) throw ConfigError("grid.detunings_hz", "empty grid");
    g.finish();
  }
  if (r.has("pulling")) {
    const Reader p = r.child("pulling");
    std::string family = to_string(c.pulling.family);
    p.get("family", family);
    try {
      c.pulling.family = region_kind_from_string(family);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("pulling.family", e.what());
    }
    const std::string key = c.pulling.family == RegionKind::StripeTheta ? "theta_rad" : "solid_angle_sr";
    if (p.has("values")) throw ConfigError("pulling.values", "use 'values_" + key + "'");
    p.get("values_" + key, c.pulling.values);
    p.get("stripe_width_rad", c.pulling.stripe_width_rad);
    p.finish();
  }
  if (r.has("tau_c")) {
    const Reader t = r.child("tau_c");
    t.get("values_s", c.tau_c.values_s);
    t.get("reference_tau_c_s", c.tau_c.reference_tau_c_s);
    if (t.has("region")) c.tau_c.region = parse_region(t.child("region"));
    t.finish();
  }
  if (r.has("quasi_steady")) {
    const Reader q = r.child("quasi_steady");
    q.get("time_in_gamma", c.quasi_steady.time_in_gamma);
    q.get("tolerance", c.quasi_steady.tolerance);
    q.get("cross_check", c.quasi_steady.cross_check);
    q.finish();
  }
  if (r.has("toggles")) {
    const Reader t = r.child("toggles");
    t.get("cross_damping", c.toggles.cross_damping);
    t.get("cross_shift", c.toggles.cross_shift);
    t.finish();
  }
  r.get("output_dir", c.output_dir);
  r.get("threads", c.threads);
  r.finish();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& c) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["model"] = {{"fine_structure_4p_hz", opt(c.model.fine_structure_4p_hz)},
                {"hyperfine_4p12_hz", opt(c.model.hyperfine_4p12_hz)},
                {"hyperfine_4p32_hz", opt(c.model.hyperfine_4p32_hz)},
                {"hyperfine_2s_hz", opt(c.model.hyperfine_2s_hz)},
                {"compute_missing_splittings", c.model.compute_missing_splittings},
                {"lower_hyperfine_resolved", c.model.lower_hyperfine_resolved},
                {"gamma_scale", c.model.gamma_scale},
                {"sink_manifolds", c.model.sink_manifolds}};
  j["coarse_grain"] = {{"tau_c_s", c.coarse_grain.tau_c},
                       {"temperature_k", c.coarse_grain.temperature},
                       {"omega_cut_rad_s", c.coarse_grain.omega_cut}};
  const auto& p = c.drive.polarization;
  const auto& k = c.drive.propagation;
  j["drive"] = {{"detuning_hz", c.drive.detuning / (2.0 * pi)},
                {"rabi_scale", c.drive.rabi_scale},
                {"polarization", {p.x(), p.y(), p.z()}},
                {"propagation", {k.x(), k.y(), k.z()}}};
  j["regions"] = json::array();
  for (const auto& r : c.regions) j["regions"].push_back(region_json(r));
  j["grid"] = {{"half_width_linewidths", c.grid.half_width_linewidths},
               {"points_per_window", c.grid.points_per_window}};
  if (!c.grid.detunings_hz.empty()) j["grid"]["detunings_hz"] = c.grid.detunings_hz;
  const std::string key = c.pulling.family == RegionKind::StripeTheta ? "theta_rad" : "solid_angle_sr";
  j["pulling"] = {{"family", to_string(c.pulling.family)},
                  {"values_" + key, c.pulling.values},
                  {"stripe_width_rad", c.pulling.stripe_width_rad}};
  j["tau_c"] = {{"values_s", c.tau_c.values_s},
                {"reference_tau_c_s", c.tau_c.reference_tau_c_s},
                {"region", region_json(c.tau_c.region)}};
  j["quasi_steady"] = {{"time_in_gamma", c.quasi_steady.time_in_gamma},
                       {"tolerance", c.quasi_steady.tolerance},
                       {"cross_check", c.quasi_steady.cross_check}};
  j["toggles"] = {{"cross_damping", c.toggles.cross_damping}, {"cross_shift", c.toggles.cross_shift}};
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j.dump(2) + "\n";
}

}  // namespace xdamp
