// xdamp: coefficient tables, spectra, line-pulling sweeps and validation.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"
#include "xdamp/config.hpp"
#include "xdamp/report.hpp"
#include "xdamp/validate.hpp"

namespace fs = std::filesystem;
using namespace xdamp;
using constants::pi;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::string cross_damping;  // "", "on" or "off"
};

RunConfig prepare(const Options& o) {
  RunConfig c = o.config_path.empty() ? default_run_config() : load_run_config(o.config_path);
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  if (o.threads > 0) c.threads = o.threads;
  if (!o.cross_damping.empty()) c.toggles.cross_damping = (o.cross_damping == "on");
  c.validate();
  fs::create_directories(c.output_dir);
  write_text((fs::path(c.output_dir) / "config.json").string(), serialize_run_config(c));
  return c;
}

std::string path_in(const RunConfig& c, const std::string& name) { return (fs::path(c.output_dir) / name).string(); }

std::string region_tag(const DetectionRegion& r, std::size_t index) {
  return std::to_string(index) + "_" + to_string(r.kind);
}

void cmd_coeffs(const RunConfig& c) {
  const LevelScheme scheme = build_level_scheme(c.model);
  const GammaMatrix g = build_gamma_matrix(scheme, c.coarse_grain, c.toggles.cross_damping);
  const Eigen::MatrixXcd ficek = build_ficek_matrix(scheme);
  auto label = [&](std::size_t k) { return scheme.states[k].label(); };

  std::vector<CsvRow> rows, frows;
  for (std::size_t i = 0; i < scheme.transitions.size(); ++i) {
    const auto& ti = scheme.transitions[i];
    for (std::size_t j = 0; j < scheme.transitions.size(); ++j) {
      const auto& tj = scheme.transitions[j];
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      if (dipole_dot(ti.dipole, tj.dipole) == 0.0) continue;
      const std::complex<double> f = fc(ti.omega - tj.omega, c.coarse_grain.tau_c);
      rows.push_back({static_cast<long long>(i), static_cast<long long>(j), label(ti.lower), label(ti.upper),
                      label(tj.lower), label(tj.upper), ti.omega, tj.omega, f.real(), f.imag(), g.values(ii, jj).real(),
                      g.values(ii, jj).imag()});
      frows.push_back({static_cast<long long>(i), static_cast<long long>(j), ficek(ii, jj).real(),
                       ficek(ii, jj).imag(), g.values(ii, jj).real(), g.values(ii, jj).imag()});
    }
  }
  write_csv(path_in(c, "gamma.csv"),
            {"i", "j", "lower_i", "upper_i", "lower_j", "upper_j", "omega_i_rad_s", "omega_j_rad_s", "fc_re", "fc_im",
             "gamma_re_rad_s", "gamma_im_rad_s"},
            rows);
  write_csv(path_in(c, "gamma_ficek.csv"),
            {"i", "j", "ficek_re_rad_s", "ficek_im_rad_s", "gamma_re_rad_s", "gamma_im_rad_s"}, frows);

  // Coherent cross shifts summed over shared lower states, per upper pair.
  const Eigen::MatrixXcd shift = build_cross_shift_hamiltonian(scheme, c.coarse_grain);
  // Scale: the cutoff-dominated shift of the strongest single channel.
  double scale = 0.0;
  for (const auto& t : scheme.transitions)
    scale = std::max(scale, 0.5 * rate_prefactor() / pi * t.dipole_norm2() * std::pow(c.coarse_grain.omega_cut, 3) / 3.0);
  std::vector<CsvRow> srows;
  std::vector<std::size_t> uppers;
  for (std::size_t k = 0; k < scheme.size(); ++k)
    if (scheme.frame_groups()[k] == 0) uppers.push_back(k);
  for (std::size_t a : uppers)
    for (std::size_t b : uppers) {
      if (a == b) continue;
      const std::complex<double> s = shift(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      srows.push_back({label(a), label(b), s.real(), s.imag(), std::abs(s) / scale});
    }
  write_csv(path_in(c, "cross_shifts.csv"),
            {"upper_a", "upper_b", "shift_re_rad_s", "shift_im_rad_s", "relative_to_single_channel"}, srows);
  std::cout << "wrote gamma.csv (" << rows.size() << " nonzero entries), gamma_ficek.csv, cross_shifts.csv\n";
}

void cmd_spectrum(const RunConfig& c) {
  const LevelScheme scheme = build_level_scheme(c.model);
  const auto grid = c.detuning_grid(scheme);
  const BlockSweep blocks = sweep_blocks(scheme, c.sweep_settings(), c.toggles, grid);
  for (std::size_t k = 0; k < c.regions.size(); ++k) {
    const Spectrum s = spectrum_from_blocks(blocks, scheme, c.regions[k]);
    const std::vector<double> hz = s.detunings_hz();
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < hz.size(); ++i) rows.push_back({hz[i], s.rates[i]});
    const std::string tag = "spectrum_" + region_tag(c.regions[k], k);
    write_csv(path_in(c, tag + ".csv"), {"detuning_hz", "rate_per_s"}, rows);
    PlotSpec plot{"Photon count rate, " + c.regions[k].describe() +
                      (c.toggles.cross_damping ? " (cross damping on)" : " (cross damping off)"),
                  "detuning [Hz]", "rate [1/s]", false, {{"S", hz, s.rates}}};
    write_svg(path_in(c, tag + ".svg"), plot);
    std::cout << "wrote " << tag << ".csv/.svg (" << rows.size() << " points)\n";
  }
}

void pulling_rows(std::vector<CsvRow>& rows, double x, const LinePullingResult& r) {
  rows.push_back({x, r.pulling_p12, r.pulling_p32, to_string(r.definition), r.residual});
}

void cmd_pulling_sweep(const RunConfig& c) {
  const LevelScheme scheme = build_level_scheme(c.model);
  const auto grid = c.detuning_grid(scheme);
  const auto points = geometry_sweep(scheme, c.sweep_settings(), c.pulling.family, c.pulling.values, grid,
                                     c.pulling.stripe_width_rad);
  const bool stripe = c.pulling.family == RegionKind::StripeTheta;
  const std::string var = stripe ? "theta_rad" : "solid_angle_sr";
  std::vector<CsvRow> rows;
  PlotSeries p12{"4P1/2 fit difference", {}, {}}, p32{"4P3/2 fit difference", {}, {}};
  PlotSeries j12{"4P1/2 Jentschura", {}, {}}, j32{"4P3/2 Jentschura", {}, {}};
  for (const auto& p : points) {
    pulling_rows(rows, p.variable, p.fit_difference);
    pulling_rows(rows, p.variable, p.jentschura_half_max);
    pulling_rows(rows, p.variable, p.jentschura_max);
    for (auto* s : {&p12, &p32, &j12, &j32}) s->x.push_back(p.variable);
    p12.y.push_back(p.fit_difference.pulling_p12 / 1e3);
    p32.y.push_back(p.fit_difference.pulling_p32 / 1e3);
    j12.y.push_back(p.jentschura_half_max.pulling_p12 / 1e3);
    j32.y.push_back(p.jentschura_half_max.pulling_p32 / 1e3);
  }
  const std::string tag = "pulling_" + to_string(c.pulling.family);
  write_csv(path_in(c, tag + ".csv"), {var, "pulling_P12_Hz", "pulling_P32_Hz", "definition", "residual"}, rows);
  write_svg(path_in(c, tag + ".svg"),
            {"Line pulling, " + to_string(c.pulling.family), var, "line pulling [kHz]", false, {p12, p32, j12, j32}});
  std::cout << "wrote " << tag << ".csv/.svg (" << points.size() << " geometries)\n";
}

void cmd_tauc_sweep(const RunConfig& c) {
  const LevelScheme scheme = build_level_scheme(c.model);
  const auto grid = c.detuning_grid(scheme);
  const auto points =
      tau_c_sweep(scheme, c.sweep_settings(), c.tau_c.values_s, c.tau_c.region, grid, c.tau_c.reference_tau_c_s);
  std::vector<CsvRow> rows;
  PlotSeries n12{"4P1/2", {}, {}}, n32{"4P3/2", {}, {}};
  for (const auto& p : points) {
    rows.push_back({p.tau_c, p.pulling.pulling_p12, p.pulling.pulling_p32, to_string(p.pulling.definition),
                    p.pulling.residual, p.normalized_p12, p.normalized_p32});
    n12.x.push_back(p.tau_c);
    n32.x.push_back(p.tau_c);
    n12.y.push_back(p.normalized_p12);
    n32.y.push_back(p.normalized_p32);
  }
  write_csv(path_in(c, "tauc.csv"),
            {"tau_c_s", "pulling_P12_Hz", "pulling_P32_Hz", "definition", "residual", "normalized_P12",
             "normalized_P32"},
            rows);
  write_svg(path_in(c, "tauc.svg"),
            {"Line pulling vs coarse-graining time", "tau_c [s]", "pulling / plateau value", true, {n12, n32}});
  std::cout << "wrote tauc.csv/.svg (" << points.size() << " points)\n";
}

int cmd_validate(const RunConfig& c) {
  const auto results = run_validation(c);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " -- " << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

void print_error(const std::string& type, const std::string& message, const std::string& field = "") {
  nlohmann::json j{{"error", {{"type", type}, {"message", message}}}};
  if (!field.empty()) j["error"]["field"] = field;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-damping line pulling in the hydrogen 2S-4P transition"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--threads", opt.threads, "worker threads (default: $XDAMP_THREADS or all cores)");
    sub->add_option("--toggle-cross-damping", opt.cross_damping, "override toggles.cross_damping")
        ->check(CLI::IsMember({"on", "off"}));
  };
  std::map<std::string, CLI::App*> subs;
  for (auto [name, help] : {std::pair{"coeffs", "write damping-coefficient tables"},
                            std::pair{"spectrum", "sweep the detuning and write one spectrum per region"},
                            std::pair{"pulling-sweep", "line pulling versus detection geometry"},
                            std::pair{"tauc-sweep", "line pulling versus coarse-graining time"},
                            std::pair{"validate", "run the invariant suite"}}) {
    subs[name] = app.add_subcommand(name, help);
    add_common(subs[name]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage", e.what());
    return 2;
  }

  try {
    const RunConfig c = prepare(opt);
    if (*subs["coeffs"]) cmd_coeffs(c);
    if (*subs["spectrum"]) cmd_spectrum(c);
    if (*subs["pulling-sweep"]) cmd_pulling_sweep(c);
    if (*subs["tauc-sweep"]) cmd_tauc_sweep(c);
    if (*subs["validate"]) return cmd_validate(c);
  } catch (const ConfigError& e) {
    print_error("config", e.what(), e.path);
    return 2;
  } catch (const FitError& e) {
    print_error("fit", e.what());
    return 1;
  } catch (const ModelError& e) {
    print_error("model", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 1;
  }
  return 0;
}
