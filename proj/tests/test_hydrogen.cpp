#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "xdamp/coefficients.hpp"
#include "xdamp/constants.hpp"
#include "xdamp/wigner.hpp"

using namespace xdamp;
using fixtures::h;

TEST_SUITE("hydrogen") {
  TEST_CASE("radial integrals against quadrature of Laguerre wavefunctions") {
    CHECK(radial_integral(1, 0, 2, 1) == doctest::Approx(128.0 * std::sqrt(6.0) / 243.0).epsilon(1e-12));
    for (auto [n1, l1, n2, l2] : std::vector<std::array<int, 4>>{
             {1, 0, 2, 1}, {2, 0, 4, 1}, {1, 0, 4, 1}, {3, 0, 4, 1}, {3, 2, 4, 1}, {2, 1, 3, 2}, {4, 3, 5, 2}}) {
      CAPTURE(n1);
      CAPTURE(n2);
      CHECK(radial_integral(n1, l1, n2, l2) == doctest::Approx(oracle::radial_integral(n1, l1, n2, l2)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(radial_integral(1, 0, 2, 0), ModelError);
    CHECK_THROWS_AS(radial_integral(1, 1, 2, 0), ModelError);
  }

  TEST_CASE("state and transition inventory") {
    const auto& s = fixtures::scheme();
    std::map<std::pair<int, int>, int> per_level;  // (2J, 2F) -> count for n = 4
    int uppers = 0;
    for (const auto& st : s.states) {
      CHECK(valid_projection(st.f, st.mf));
      CHECK(triangle(st.j, HalfInt::half(1), st.f));
      if (st.n == 4) {
        ++uppers;
        ++per_level[{st.j.twice(), st.f.twice()}];
        CHECK_FALSE(st.sink);
      }
    }
    CHECK(uppers == 12);
    CHECK(per_level[{1, 0}] == 1);
    CHECK(per_level[{1, 2}] == 3);
    CHECK(per_level[{3, 2}] == 3);
    CHECK(per_level[{3, 4}] == 5);
    CHECK(s.transitions.size() == 180);

    const auto& g0 = s.states[s.driven_ground];
    CHECK(g0.n == 2);
    CHECK(g0.l == 0);
    CHECK(g0.f == HalfInt::integer(0));
    CHECK_FALSE(g0.sink);
    for (std::size_t k = 0; k < s.size(); ++k)
      if (k != s.driven_ground && s.states[k].n != 4) CHECK(s.states[k].sink);
  }

  TEST_CASE("dipoles are real and obey E1 selection rules") {
    const auto& s = fixtures::scheme();
    for (const auto& t : s.transitions) {
      const auto& lo = s.states[t.lower];
      const auto& up = s.states[t.upper];
      CHECK(t.omega > 0.0);
      CHECK(std::abs(lo.l - up.l) == 1);
      CHECK(std::abs(lo.f.twice() - up.f.twice()) <= 2);
      CHECK_FALSE((lo.f.twice() == 0 && up.f.twice() == 0));
      for (int q = -1; q <= 1; ++q) {
        CHECK(t.dipole[q + 1].imag() == 0.0);
        if ((lo.mf - up.mf).twice() != 2 * q) CHECK(t.dipole[q + 1] == 0.0);
      }
      CHECK(t.dipole_norm2() > 0.0);
    }
  }

  TEST_CASE("Wigner-Eckart: components within one hyperfine pair follow the 3j ratio") {
    const auto& s = fixtures::scheme();
    // 2S1/2 F=1 -> 4P3/2 F=2 and 1S1/2 F=1 -> 4P1/2 F=1
    for (auto [nl, jl, fl, ju, fu] : std::vector<std::array<int, 5>>{{2, 1, 2, 3, 4}, {1, 1, 2, 1, 2}, {3, 1, 0, 3, 2}}) {
      double ratio = 0.0;
      for (const auto& t : s.transitions) {
        const auto& lo = s.states[t.lower];
        const auto& up = s.states[t.upper];
        if (lo.n != nl || lo.j.twice() != jl || lo.f.twice() != fl || up.j.twice() != ju || up.f.twice() != fu)
          continue;
        const HalfInt q = lo.mf - up.mf;
        // <g M_g| r_q |e M_e> = (-1)^(F_g - M_g) 3j(F_g 1 F_e; -M_g q M_e) <g||r||e>
        const double w = phase(lo.f - lo.mf) * wigner3j(lo.f, HalfInt::integer(1), up.f, -lo.mf, q, up.mf);
        const double d = t.dipole[q.twice() / 2 + 1].real();
        if (ratio == 0.0) ratio = d / w;
        CHECK(d / w == doctest::Approx(ratio).epsilon(1e-12));
      }
      CHECK(ratio != 0.0);
    }
  }

  TEST_CASE("isotropy: summed strength out of each lower sublevel is M-independent") {
    const auto& s = fixtures::scheme();
    std::map<std::tuple<int, int, int, int, int, int>, std::map<int, double>> sums;  // (lower n,l,2J,2F, upper 2J) -> M
    for (const auto& t : s.transitions) {
      const auto& lo = s.states[t.lower];
      const auto& up = s.states[t.upper];
      sums[{lo.n, lo.l, lo.j.twice(), lo.f.twice(), up.j.twice(), up.f.twice()}][lo.mf.twice()] += t.dipole_norm2();
    }
    for (const auto& [key, by_m] : sums) {
      const double ref = by_m.begin()->second;
      for (const auto& [m, v] : by_m) CHECK(v == doctest::Approx(ref).epsilon(1e-12));
    }
  }

  TEST_CASE("pi-polarized light from 2S F=0 couples only to F=1 M=0") {
    const auto& s = fixtures::scheme();
    for (const auto& t : s.transitions) {
      if (t.lower != s.driven_ground) continue;
      const auto& up = s.states[t.upper];
      if (t.dipole[1] != 0.0) {
        CHECK(up.f == HalfInt::integer(1));
        CHECK(up.mf == HalfInt::integer(0));
      }
    }
    const auto& e1 = s.states[s.reference_upper];
    const auto& e2 = s.states[s.second_upper];
    CHECK(e1.j == HalfInt::half(1));
    CHECK(e2.j == HalfInt::half(3));
    CHECK(e1.f == HalfInt::integer(1));
    CHECK(e2.f == HalfInt::integer(1));
  }

  TEST_CASE("total decay rate against Einstein A coefficients at term frequencies") {
    const auto& s = fixtures::scheme();
    // Nonrelativistic term energies with the reduced-mass Rydberg constant.
    const double rydberg = 2.0 * constants::pi * constants::rydberg_frequency / (1.0 + constants::electron_proton_mass_ratio);
    auto omega = [&](int n) { return rydberg * (1.0 / (n * n) - 1.0 / 16.0); };
    const double k = 4.0 / 3.0 * constants::alpha * std::pow(constants::bohr_radius / constants::c, 2);
    // Sum over a complete lower term of |<l'|r|1>|^2 = max(l, l') / (2 l_u + 1) R^2
    double a = 0.0;
    for (auto [n, l] : std::vector<std::pair<int, int>>{{1, 0}, {2, 0}, {3, 0}, {3, 2}}) {
      // radial integrals scale with the reduced-mass Bohr radius
      const double r = oracle::radial_integral(n, l, 4, 1) * (1.0 + constants::electron_proton_mass_ratio);
      a += k * std::pow(omega(n), 3) * std::max(l, 1) / 3.0 * r * r;
    }
    CHECK(s.gamma_tot == doctest::Approx(a).epsilon(2e-4));
    CHECK(1.0 / s.gamma_tot > 1e-8);
    CHECK(1.0 / s.gamma_tot < 2e-8);

    // Channel sums per sublevel: equal to gamma_tot up to the fine and
    // hyperfine dependence of omega^3 (a few 1e-6).
    std::map<std::size_t, double> rate;
    for (const auto& t : s.transitions) rate[t.upper] += gamma_cg(t, t, CoarseGrainConfig{}).real();
    CHECK(rate.size() == 12);
    for (const auto& [u, r] : rate) CHECK(r == doctest::Approx(s.gamma_tot).epsilon(1e-5));
  }

  TEST_CASE("same-n cancellation of the summed dipole overlap") {
    const auto& s = fixtures::scheme();
    std::vector<std::size_t> uppers;
    for (std::size_t k = 0; k < s.size(); ++k)
      if (s.states[k].n == 4) uppers.push_back(k);
    std::set<ManifoldId> lowers;
    for (const auto& t : s.transitions) lowers.insert(s.states[t.lower].manifold());
    CHECK(lowers.size() == 5);
    for (const auto& g : lowers)
      for (std::size_t e : uppers)
        for (std::size_t e2 : uppers) {
          const double v = dfrak(s, e, e2, g);
          if (e == e2) {
            CHECK(v >= 0.0);
          } else {
            CAPTURE(g.label());
            CHECK(std::fabs(v) <= 1e-12 * std::sqrt(dfrak(s, e, e, g) * dfrak(s, e2, e2, g)));
          }
        }
    const ManifoldId two_s{2, 0, HalfInt::half(1)};
    CHECK(std::fabs(dfrak(s, s.reference_upper, s.second_upper, two_s)) < 1e-12);
  }

  TEST_CASE("configuration knobs") {
    ModelConfig strict;
    strict.compute_missing_splittings = false;
    CHECK_THROWS_AS(build_level_scheme(strict), ModelError);
    strict.fine_structure_4p_hz = 1.3e9;
    strict.hyperfine_4p12_hz = 5.9e6;
    strict.hyperfine_4p32_hz = 2.4e6;
    strict.hyperfine_2s_hz = 177.6e6;
    const LevelScheme s = build_level_scheme(strict);
    // F=1 offsets: +A/4 for J=1/2, -5A/4 for J=3/2 with A = (F=2 - F=1)/2
  const double expected = 2.0 * constants::pi * (1.3e9 - 0.625 * 2.4e6 - 0.25 * 5.9e6);
    CAPTURE(s.peak_splitting());
    CHECK(s.peak_splitting() == doctest::Approx(expected).epsilon(1e-9));

    ModelConfig scaled;
    scaled.gamma_scale = 2.0;
    CHECK(build_level_scheme(scaled).gamma_tot == doctest::Approx(2.0 * fixtures::scheme().gamma_tot).epsilon(1e-12));
    ModelConfig bad;
    bad.gamma_scale = -1.0;
    CHECK_THROWS_AS(build_level_scheme(bad), ModelError);
    CHECK(parse_term("3D") == std::pair{3, 2});
    CHECK_THROWS_AS(parse_term("2D"), ModelError);
  }

  TEST_CASE("subset keeps transitions among kept states") {
    const auto& s = fixtures::scheme();
    const LevelScheme sub = s.subset({s.driven_ground, s.reference_upper, s.second_upper});
    CHECK(sub.size() == 3);
    CHECK(sub.transitions.size() == 2);
    CHECK(sub.gamma_tot == s.gamma_tot);
    CHECK(sub.peak_splitting() == s.peak_splitting());
  }
}
