#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "xdamp/liouvillian.hpp"

using namespace xdamp;

namespace {

DensityMatrix random_density(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = {g(rng), g(rng)};
  DensityMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

const Dissipator& default_dissipator() {
  static const Dissipator d = build_dissipator(fixtures::scheme(), CoarseGrainConfig{});
  return d;
}

}  // namespace

TEST_SUITE("liouvillian") {
  TEST_CASE("generator annihilates the trace and preserves Hermiticity") {
    const auto& s = fixtures::scheme();
    DriveConfig drive;
    drive.detuning = 0.3 * s.gamma_tot;
    drive.rabi_scale = 0.05;
    const Liouvillian L(s, default_dissipator(), drive);
    std::mt19937 rng(7);
    const double scale = s.gamma_tot;
    for (int k = 0; k < 20; ++k) {
      const DensityMatrix rho = random_density(s.size(), rng);
      const DensityMatrix out = L.apply(rho);
      CHECK(std::abs(out.trace()) < 1e-12 * scale);
      CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * scale);
      // non-Hermitian input: L(rho^dagger) = L(rho)^dagger
      Eigen::MatrixXcd x = Eigen::MatrixXcd::Random(s.size(), s.size());
      CHECK((L.apply(x.adjoint()) - L.apply(x).adjoint()).cwiseAbs().maxCoeff() < 1e-12 * scale);
    }
    const DensityMatrix mixed = DensityMatrix::Identity(s.size(), s.size()) / double(s.size());
    CHECK(std::abs(L.apply(mixed).trace()) < 1e-12 * scale);
  }

  TEST_CASE("superoperator matches the direct action on a small subset") {
    const auto& s = fixtures::scheme();
    std::vector<std::size_t> keep{s.driven_ground, s.reference_upper, s.second_upper};
    for (std::size_t k = 0; k < s.size() && keep.size() < 8; ++k)
      if (s.states[k].n == 1 || s.states[k].n == 4) keep.push_back(k);
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    const LevelScheme sub = s.subset(keep);
    const Dissipator d = build_dissipator(sub, CoarseGrainConfig{});
    DriveConfig drive;
    drive.rabi_scale = 0.1;
    const Liouvillian L(sub, d, drive);
    const Eigen::MatrixXcd sup = L.superoperator();
    std::mt19937 rng(3);
    const DensityMatrix rho = random_density(sub.size(), rng);
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    const Eigen::VectorXcd got = sup * v;
    const DensityMatrix want = L.apply(rho);
    CHECK((got - Eigen::Map<const Eigen::VectorXcd>(want.data(), want.size())).cwiseAbs().maxCoeff() <
          1e-12 * s.gamma_tot);
  }

  TEST_CASE("dissipator has secular structure only") {
    const auto& s = fixtures::scheme();
    const Dissipator& d = default_dissipator();
    CHECK(d.min_eigenvalue_ratio() > -1e-8);
    // decay operator lives on the upper block (absorption out of the driven
    // ground state is suppressed by n ~ 1e-40 but structurally present)
    for (Eigen::Index i = 0; i < d.decay_operator().rows(); ++i)
      for (Eigen::Index j = 0; j < d.decay_operator().cols(); ++j) {
        if (d.decay_operator()(i, j) == 0.0) continue;
        const bool up_i = s.states[i].n == 4, up_j = s.states[j].n == 4;
        CHECK(up_i == up_j);
      }
    // every jump moves a coherence between two states of equal "level class":
    // upper-upper -> lower-lower (emission) or lower-lower -> upper-upper (absorption)
    for (const auto& j : d.jumps()) {
      const bool from_up = s.states[j.from_row].n == 4;
      CHECK(from_up == (s.states[j.from_col].n == 4));
      CHECK((s.states[j.to_row].n == 4) == !from_up);
      CHECK((s.states[j.to_col].n == 4) == !from_up);
    }
    // no Hamiltonian-like cross shift unless requested
    CHECK(d.shift_hamiltonian().isZero(0.0));
  }

  TEST_CASE("Hamiltonian structure") {
    const auto& s = fixtures::scheme();
    DriveConfig drive;
    const Eigen::MatrixXcd h0 = build_hamiltonian(s, drive);
    CHECK(h0(s.reference_upper, s.reference_upper) == 0.0);
    CHECK((h0 - h0.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < h0.rows(); ++i)
      for (Eigen::Index j = 0; j < h0.cols(); ++j)
        if (i != j && h0(i, j) != 0.0) CHECK(s.states[i].mf == s.states[j].mf);

    // 4P3/2 F=1 M=0 is resonant at a detuning equal to the energy-ladder offset
    drive.detuning = s.states[s.second_upper].energy - s.states[s.reference_upper].energy;
    CHECK(std::abs(build_hamiltonian(s, drive)(s.second_upper, s.second_upper)) < 1e-6);
    CHECK(drive.detuning == doctest::Approx(s.peak_splitting()).epsilon(1e-15));

    // Rabi frequency scaling: the stronger of the two pi couplings is rabi_scale * gamma_tot
    drive.detuning = 0.0;
    const double strongest = std::max(std::abs(h0(s.reference_upper, s.driven_ground)),
                                      std::abs(h0(s.second_upper, s.driven_ground)));
    CHECK(2.0 * strongest == doctest::Approx(drive.rabi_scale * s.gamma_tot).epsilon(1e-14));

    DriveConfig bad;
    bad.polarization = Eigen::Vector3d::UnitX();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    DriveConfig strong;
    strong.rabi_scale = 0.1;
    CHECK_FALSE(strong.warnings().empty());
  }

  TEST_CASE("free decay of a single excited sublevel") {
    const auto& s = fixtures::scheme();
    DriveConfig off;
    off.rabi_scale = 0.0;
    const Liouvillian L(s, default_dissipator(), off);
    DensityMatrix rho0 = DensityMatrix::Zero(s.size(), s.size());
    rho0(s.second_upper, s.second_upper) = 1.0;
    CHECK(evolve(L, rho0, 0.0) == rho0);
    // independent oracle: sum of Einstein A coefficients of the channels
    double rate = 0.0;
    for (const auto& t : s.transitions)
      if (t.upper == s.second_upper)
        rate += 4.0 / 3.0 * constants::alpha * std::pow(constants::bohr_radius / constants::c, 2) *
                std::pow(t.omega, 3) * t.dipole_norm2();
    std::vector<double> times;
    for (int k = 1; k <= 5; ++k) times.push_back(k / s.gamma_tot);
    const Trajectory tr = evolve(L, rho0, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double p = tr.states[k](s.second_upper, s.second_upper).real();
      CHECK(p == doctest::Approx(std::exp(-rate * times[k])).epsilon(1e-6));
      CHECK(std::abs(tr.states[k].trace() - 1.0) < 1e-9);
      CHECK(min_eigenvalue(tr.states[k]) > -1e-9);
    }
  }

  TEST_CASE("three-level V system matches textbook optical Bloch equations") {
    const auto& s = fixtures::scheme();
    const LevelScheme sub = s.subset({s.driven_ground, s.reference_upper, s.second_upper});
    const std::size_t g = sub.driven_ground, e1 = sub.reference_upper, e2 = sub.second_upper;
    const Dissipator d = build_dissipator(sub, CoarseGrainConfig{}, Toggles{false, false});
    const double k = 4.0 / 3.0 * constants::alpha * std::pow(constants::bohr_radius / constants::c, 2);
    double g1 = 0, g2 = 0, d1z = 0, d2z = 0;
    for (const auto& t : sub.transitions) {
      const double a = k * std::pow(t.omega, 3) * t.dipole_norm2();
      if (t.upper == e1) g1 = a, d1z = t.dipole[1].real();
      if (t.upper == e2) g2 = a, d2z = t.dipole[1].real();
    }
    const double split = sub.states[e2].energy - sub.states[e1].energy;
    for (double rabi : {1e-3, 0.05}) {
      for (double delta : {0.0, 0.4 * sub.gamma_tot, -1.3 * sub.gamma_tot, 0.5 * split, split + 0.2 * sub.gamma_tot}) {
        DriveConfig drive;
        drive.rabi_scale = rabi;
        drive.detuning = delta;
        const Liouvillian L(sub, d, drive);
        const double largest = std::max(std::fabs(d1z), std::fabs(d2z));
        const double o1 = rabi * sub.gamma_tot * d1z / largest, o2 = rabi * sub.gamma_tot * d2z / largest;
        const Eigen::Matrix3cd want = oracle::v_system_steady_state(-delta, split - delta, o1, o2, g1, g2);
        // only the weak 4P -> 2S F=0 branch damps this closed system (~0.04 gamma_tot),
        // so it needs longer than 500/gamma_tot to settle
        QuasiSteadyOptions opts;
        opts.time_in_gamma = 5000.0;
        const ActiveBlock blk = quasi_steady_block(L, opts);
        REQUIRE(blk.states.size() == 3);
        Eigen::Matrix3cd got;
        const std::size_t order[3] = {g, e1, e2};
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            const auto ia = std::find(blk.states.begin(), blk.states.end(), order[a]) - blk.states.begin();
            const auto ib = std::find(blk.states.begin(), blk.states.end(), order[b]) - blk.states.begin();
            got(a, b) = blk.rho(ia, ib);
          }
        CAPTURE(rabi);
        CAPTURE(delta);
        CAPTURE(got);
        CAPTURE(want);
        // element-wise relative agreement, including the tiny upper-state block
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) CHECK(std::abs(got(a, b) - want(a, b)) <= 1e-8 * std::abs(want(a, b)) + 1e-300);
      }
    }
  }

  TEST_CASE("quasi-steady state") {
    const auto& s = fixtures::scheme();
    const Dissipator& d = default_dissipator();

    DriveConfig off;
    off.rabi_scale = 0.0;
    const DensityMatrix dark = quasi_steady_state(Liouvillian(s, d, off));
    CHECK((dark - ground_state(s)).cwiseAbs().maxCoeff() < 1e-14);

    DriveConfig drive;
    const Liouvillian L(s, d, drive);
    const DensityMatrix rho = quasi_steady_state(L);
    CHECK_NOTHROW(check_density_matrix(rho));
    const ActiveBlock blk = quasi_steady_block(L);
    CHECK(blk.states.size() == 3);
    CHECK(blk.eigen_mismatch < 1e-6);

    // the explicit integrator agrees with the matrix-exponential result
    const DensityMatrix direct = evolve(L, ground_state(s), 500.0 / s.gamma_tot);
    const double pe = rho(s.reference_upper, s.reference_upper).real();
    CHECK(direct(s.reference_upper, s.reference_upper).real() == doctest::Approx(pe).epsilon(1e-6));
    CHECK((direct - rho).cwiseAbs().maxCoeff() < 1e-9);

    // upper populations are quasi-stationary: they follow only the slow
    // optical pumping of the ground state into the sinks (rate ~ rabi^2 gamma)
    const DensityMatrix rate = L.apply(rho);
    const double dpe = rate(s.reference_upper, s.reference_upper).real();
    CHECK(std::fabs(dpe) / s.gamma_tot < 1e-6 * pe);

    // resonance: the population is largest at zero detuning
    double best = -1.0, best_delta = 1.0;
    const QuasiSteadySolver solver(s, d, drive);
    for (int k = -30; k <= 30; ++k) {
      const double delta = 0.1 * k * s.gamma_tot;
      const ActiveBlock b = solver.solve(delta);
      const auto i = std::find(b.states.begin(), b.states.end(), s.reference_upper) - b.states.begin();
      const double p = b.rho(i, i).real();
      if (p > best) best = p, best_delta = delta;
    }
    CHECK(best_delta == 0.0);
  }

  TEST_CASE("weak-drive populations scale quadratically with the Rabi amplitude") {
    const auto& s = fixtures::scheme();
    auto population = [&](double rabi) {
      DriveConfig drive;
      drive.rabi_scale = rabi;
      const ActiveBlock b = quasi_steady_block(Liouvillian(s, default_dissipator(), drive));
      const auto i = std::find(b.states.begin(), b.states.end(), s.reference_upper) - b.states.begin();
      return b.rho(i, i).real();
    };
    const double exponent = std::log10(population(1e-3) / population(1e-4));
    CHECK(exponent == doctest::Approx(2.0).epsilon(0.005));
  }

  TEST_CASE("density-matrix invariants are enforced") {
    DensityMatrix rho = DensityMatrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    CHECK_NOTHROW(check_density_matrix(rho));
    rho(0, 0) = 1.1;
    CHECK_THROWS_AS(check_density_matrix(rho), ModelError);
    rho(0, 0) = 1.2;
    rho(1, 1) = -0.2;
    CHECK_THROWS_AS(check_density_matrix(rho), ModelError);
    rho(1, 1) = 0.0;
    rho(0, 0) = 1.0;
    rho(0, 1) = 0.1;
    CHECK_THROWS_AS(check_density_matrix(rho), ModelError);
  }
}
