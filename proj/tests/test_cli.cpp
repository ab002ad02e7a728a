#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "xdamp/report.hpp"

#ifndef XDAMP_CLI
#error "XDAMP_CLI must point at the xdamp executable"
#endif

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("xdamp_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "input.json";
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string("\"") + XDAMP_CLI + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                          "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Small but valid grid: 3 linewidths around each line, 40 points per linewidth.
const char* kSmallGrid = R"("grid": {"half_width_linewidths": 3, "points_per_window": 240})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("coeffs writes a Hermitian damping table") {
    const fs::path dir = scratch("coeffs");
    REQUIRE(run("coeffs --out \"" + (dir / "out").string() + "\"", dir) == 0);
    const xdamp::CsvTable t = xdamp::read_csv((dir / "out" / "gamma.csv").string());
    REQUIRE(t.rows.size() > 180);
    std::map<std::pair<long, long>, std::complex<double>> g;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      g[{std::stol(t.rows[r][t.column("i")]), std::stol(t.rows[r][t.column("j")])}] = {
          t.number(r, "gamma_re_rad_s"), t.number(r, "gamma_im_rad_s")};
    double scale = 0.0;
    for (const auto& [k, v] : g) scale = std::max(scale, std::abs(v));
    for (const auto& [k, v] : g) {
      const auto it = g.find({k.second, k.first});
      REQUIRE(it != g.end());
      CHECK(std::abs(v - std::conj(it->second)) <= 1e-12 * scale);
    }
    // the coarse-graining kernel column matches the quadrature oracle
    int sampled = 0;
    for (std::size_t r = 0; r < t.rows.size() && sampled < 12; ++r) {
      const double dw = t.number(r, "omega_i_rad_s") - t.number(r, "omega_j_rad_s");
      if (std::abs(dw) * 1e-12 > 50.0 || r % 7 != 0) continue;
      ++sampled;
      const std::complex<double> want = oracle::fc(dw, 1e-12);
      const std::complex<double> got(t.number(r, "fc_re"), t.number(r, "fc_im"));
      CHECK(std::abs(got - want) <= 1e-9 * std::abs(want));
    }
    CHECK(sampled > 0);
    CHECK(fs::exists(dir / "out" / "gamma_ficek.csv"));
    CHECK(fs::exists(dir / "out" / "cross_shifts.csv"));
    CHECK(fs::exists(dir / "out" / "config.json"));
  }

  TEST_CASE("coeffs with cross damping off has a diagonal table") {
    const fs::path dir = scratch("coeffs_off");
    REQUIRE(run("coeffs --toggle-cross-damping off --out \"" + (dir / "out").string() + "\"", dir) == 0);
    const xdamp::CsvTable t = xdamp::read_csv((dir / "out" / "gamma.csv").string());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      if (t.rows[r][t.column("i")] == t.rows[r][t.column("j")]) {
        CHECK(t.number(r, "gamma_re_rad_s") > 0.0);
      } else {
        CHECK(t.number(r, "gamma_re_rad_s") == 0.0);
        CHECK(t.number(r, "gamma_im_rad_s") == 0.0);
      }
    }
  }

  TEST_CASE("4 pi spectrum barely depends on cross damping") {
    const fs::path dir = scratch("spectrum");
    const fs::path cfg = write_config(dir, std::string("{") + kSmallGrid + R"(, "regions": [{"kind": "full_4pi"}]})");
    REQUIRE(run("spectrum --config \"" + cfg.string() + "\" --toggle-cross-damping on --out \"" + (dir / "on").string() + "\"", dir) == 0);
    REQUIRE(run("spectrum --config \"" + cfg.string() + "\" --toggle-cross-damping off --out \"" + (dir / "off").string() + "\"", dir) == 0);
    const std::string on = slurp(dir / "on" / "spectrum_0_full_4pi.csv");
    CHECK(on.rfind("detuning_hz,rate_per_s", 0) == 0);
    {
      // The 4 pi kernel has no cross terms, but the recycling 4P -> 2S F=0 branch
      // does: interference moves a little population between the driven F=0
      // state and the F=1 sink, so the rates agree only to ~1e-7.
      const xdamp::CsvTable a = xdamp::read_csv((dir / "on" / "spectrum_0_full_4pi.csv").string());
      const xdamp::CsvTable b = xdamp::read_csv((dir / "off" / "spectrum_0_full_4pi.csv").string());
      REQUIRE(a.rows.size() == b.rows.size());
      double scale = 0.0, worst = 0.0;
      for (std::size_t r = 0; r < a.rows.size(); ++r) {
        CHECK(a.number(r, "detuning_hz") == b.number(r, "detuning_hz"));
        scale = std::max(scale, std::abs(a.number(r, "rate_per_s")));
        worst = std::max(worst, std::abs(a.number(r, "rate_per_s") - b.number(r, "rate_per_s")));
      }
      CHECK(worst <= 1e-6 * scale);
    }
    CHECK(fs::exists(dir / "on" / "spectrum_0_full_4pi.svg"));

    // determinism: a second run is byte-identical
    REQUIRE(run("spectrum --config \"" + cfg.string() + "\" --toggle-cross-damping on --threads 2 --out \"" + (dir / "again").string() + "\"", dir) == 0);
    CHECK(on == slurp(dir / "again" / "spectrum_0_full_4pi.csv"));
  }

  TEST_CASE("empty grid is rejected before any computation") {
    const fs::path dir = scratch("empty");
    const fs::path cfg = write_config(dir, R"({"grid": {"detunings_hz": []}})");
    CHECK(run("spectrum --config \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"", dir) == 2);
    const auto err = nlohmann::json::parse(slurp(dir / "stderr.txt"));
    CHECK(err["error"]["type"] == "config");
    CHECK(err["error"]["field"] == "grid.detunings_hz");
    CHECK_FALSE(fs::exists(dir / "out"));
  }

  TEST_CASE("bad invocations give machine-readable errors") {
    const fs::path dir = scratch("bad");
    CHECK(run("spectrum --config /nonexistent/file.json", dir) != 0);
    const fs::path cfg = write_config(dir, R"({"drive": {"rabi_scale": -2}})");
    CHECK(run("coeffs --config \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"", dir) == 2);
    const auto err = nlohmann::json::parse(slurp(dir / "stderr.txt"));
    CHECK(err["error"]["field"] == "drive.rabi_scale");
    CHECK(run("coeffs --toggle-cross-damping maybe", dir) != 0);
  }

  TEST_CASE("pulling sweep writes the documented columns") {
    const fs::path dir = scratch("pulling");
    const fs::path cfg = write_config(
        dir, std::string("{") + kSmallGrid + R"(, "pulling": {"family": "stripe_theta", "values_theta_rad": [0.3, 1.5707963267948966]}})");
    REQUIRE(run("pulling-sweep --config \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"", dir) == 0);
    const xdamp::CsvTable t = xdamp::read_csv((dir / "out" / "pulling_stripe_theta.csv").string());
    CHECK(t.header == std::vector<std::string>{"theta_rad", "pulling_P12_Hz", "pulling_P32_Hz", "definition", "residual"});
    CHECK(t.rows.size() == 6);  // two angles x three definitions
    CHECK(fs::exists(dir / "out" / "pulling_stripe_theta.svg"));
  }

  TEST_CASE("tau_c sweep and validate run") {
    const fs::path dir = scratch("tauc");
    const fs::path cfg = write_config(dir, std::string("{") + kSmallGrid + R"(, "tau_c": {"values_s": [1e-13, 1e-12]}})");
    REQUIRE(run("tauc-sweep --config \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"", dir) == 0);
    const xdamp::CsvTable t = xdamp::read_csv((dir / "out" / "tauc.csv").string());
    REQUIRE(t.rows.size() == 2);
    CHECK(t.number(1, "normalized_P12") == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(run("validate --out \"" + (dir / "validate").string() + "\"", dir) == 0);
    const std::string report = slurp(dir / "stdout.txt");
    CHECK(report.find("FAIL") == std::string::npos);
    CHECK(report.find("PASS") != std::string::npos);
  }
}
