#include "xdamp/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>

#include <unsupported/Eigen/MatrixFunctions>

namespace xdamp {
namespace {

constexpr std::complex<double> kI(0.0, 1.0);

// Fine-structure frame energy of each lower frame group (centroid of its
// sublevels); index by group id.
std::map<int, double> lower_frames(const LevelScheme& scheme, const std::vector<int>& groups) {
  std::map<int, std::pair<double, int>> acc;
  for (std::size_t k = 0; k < scheme.size(); ++k) {
    if (groups[k] == 0) continue;
    auto& a = acc[groups[k]];
    a.first += scheme.states[k].energy;
    a.second += 1;
  }
  std::map<int, double> out;
  for (auto& [g, a] : acc) out[g] = a.first / a.second;
  return out;
}

}  // namespace

void DriveConfig::validate() const {
  if (!std::isfinite(detuning)) throw std::invalid_argument("drive.detuning must be finite");
  if (!(rabi_scale >= 0.0) || !std::isfinite(rabi_scale)) throw std::invalid_argument("drive.rabi_scale must be >= 0");
  if (std::fabs(polarization.norm() - 1.0) > 1e-9) throw std::invalid_argument("drive.polarization must be a unit vector");
  if (std::fabs(propagation.norm() - 1.0) > 1e-9) throw std::invalid_argument("drive.propagation must be a unit vector");
  if (std::fabs(polarization.dot(propagation)) > 1e-9)
    throw std::invalid_argument("drive.polarization must be perpendicular to drive.propagation");
}

std::vector<std::string> DriveConfig::warnings() const {
  std::vector<std::string> out;
  if (rabi_scale > 1e-2) out.push_back("drive.rabi_scale is not small; weak-drive line shapes no longer apply");
  return out;
}

double min_eigenvalue(const DensityMatrix& rho) {
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void check_density_matrix(const DensityMatrix& rho, double hermiticity_tol, double trace_tol, double eigen_tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw ModelError("density matrix must be square and non-empty");
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > hermiticity_tol) throw ModelError("density matrix not Hermitian: deviation " + std::to_string(herm));
  const double tr = std::abs(rho.trace() - 1.0);
  if (tr > trace_tol) throw ModelError("density matrix trace deviates from 1 by " + std::to_string(tr));
  const double ev = min_eigenvalue(rho);
  if (ev < -eigen_tol) throw ModelError("density matrix has negative eigenvalue " + std::to_string(ev));
}

Eigen::MatrixXcd build_hamiltonian(const LevelScheme& scheme, const DriveConfig& drive) {
  drive.validate();
  const auto n = static_cast<Eigen::Index>(scheme.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  const auto groups = scheme.frame_groups();
  const auto frames = lower_frames(scheme, groups);
  const std::size_t g0 = scheme.driven_ground;
  const double ground_offset = scheme.states[g0].energy - frames.at(groups[g0]);
  const double reference = scheme.states[scheme.reference_upper].energy;
  for (std::size_t k = 0; k < scheme.size(); ++k) {
    const double e = scheme.states[k].energy;
    const auto kk = static_cast<Eigen::Index>(k);
    h(kk, kk) = groups[k] == 0 ? e - reference - drive.detuning + ground_offset : e - frames.at(groups[k]);
  }

  std::vector<std::pair<const Transition*, std::complex<double>>> driven;
  double largest = 0.0;
  for (const auto& t : scheme.transitions) {
    if (scheme.states[t.lower].sink) continue;
    // <e| r . eps |g> = conj(<g| r |e>) . eps; Eigen's dot conjugates its first argument.
    const std::complex<double> coupling = t.dipole_cartesian().dot(drive.polarization.cast<std::complex<double>>());
    driven.emplace_back(&t, coupling);
    largest = std::max(largest, std::abs(coupling));
  }
  if (largest == 0.0 || drive.rabi_scale == 0.0) return h;
  for (auto [t, coupling] : driven) {
    const std::complex<double> rabi = drive.rabi_scale * scheme.gamma_tot * coupling / largest;
    const auto e = static_cast<Eigen::Index>(t->upper), g = static_cast<Eigen::Index>(t->lower);
    h(e, g) += -0.5 * rabi;
    h(g, e) += -0.5 * std::conj(rabi);
  }
  return h;
}

Eigen::MatrixXcd build_cross_shift_hamiltonian(const LevelScheme& scheme, const CoarseGrainConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(scheme.size());
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
  const bool thermal = cfg.temperature > 0.0;
  for (std::size_t i = 0; i < scheme.transitions.size(); ++i) {
    const auto& ti = scheme.transitions[i];
    for (std::size_t j = 0; j < scheme.transitions.size(); ++j) {
      const auto& tj = scheme.transitions[j];
      if (ti.lower != tj.lower || ti.upper == tj.upper) continue;
      std::complex<double> shift = -(cross_shift(ti, tj, cfg, ShiftSign::Minus, false) +
                                     cross_shift(ti, tj, cfg, ShiftSign::Plus, false));
      if (thermal)
        shift -= cross_shift(ti, tj, cfg, ShiftSign::Minus, true) + cross_shift(ti, tj, cfg, ShiftSign::Plus, true);
      s(static_cast<Eigen::Index>(ti.upper), static_cast<Eigen::Index>(tj.upper)) += shift;
    }
  }
  return 0.5 * (s + s.adjoint());
}

Dissipator build_dissipator(const LevelScheme& scheme, const CoarseGrainConfig& cfg, const Toggles& toggles) {
  const GammaMatrix gamma = build_gamma_matrix(scheme, cfg, toggles.cross_damping);
  Dissipator d;
  d.min_ratio_ = gamma.min_eigenvalue_ratio();
  if (d.min_ratio_ < -1e-8)
    throw ModelError("damping matrix is not positive semidefinite: min/max eigenvalue ratio " +
                     std::to_string(d.min_ratio_));
  d.dim_ = scheme.size();
  d.toggles_ = toggles;
  d.cfg_ = cfg;
  const auto n = static_cast<Eigen::Index>(d.dim_);
  d.decay_ = Eigen::MatrixXcd::Zero(n, n);
  d.shift_ = toggles.cross_shift ? build_cross_shift_hamiltonian(scheme, cfg) : Eigen::MatrixXcd::Zero(n, n);

  const auto groups = scheme.frame_groups();
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, std::complex<double>> jumps;
  const auto m = scheme.transitions.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& ti = scheme.transitions[i];
    for (std::size_t j = 0; j < m; ++j) {
      const std::complex<double> g = gamma.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (g == 0.0) continue;
      const auto& tj = scheme.transitions[j];
      const double n_th = cfg.temperature > 0.0 ? thermal_n(0.5 * (ti.omega + tj.omega), cfg.temperature) : 0.0;

      // Emission, L = |g><e|.
      const std::complex<double> c_em = (1.0 + n_th) * g;
      if (groups[ti.lower] == groups[tj.lower]) jumps[{tj.lower, ti.lower, tj.upper, ti.upper}] += c_em;
      if (ti.lower == tj.lower)
        d.decay_(static_cast<Eigen::Index>(ti.upper), static_cast<Eigen::Index>(tj.upper)) += c_em;

      // Absorption, L = |e><g|, only out of states that are not sinks.
      if (n_th == 0.0 || scheme.states[ti.lower].sink || scheme.states[tj.lower].sink) continue;
      const std::complex<double> c_ab = n_th * std::conj(g);
      if (groups[ti.lower] == groups[tj.lower]) {
        jumps[{tj.upper, ti.upper, tj.lower, ti.lower}] += c_ab;
        if (ti.upper == tj.upper)
          d.decay_(static_cast<Eigen::Index>(ti.lower), static_cast<Eigen::Index>(tj.lower)) += c_ab;
      }
    }
  }
  d.jumps_.reserve(jumps.size());
  for (const auto& [key, c] : jumps) {
    if (c == 0.0) continue;
    auto [tr, tc, fr, fc_] = key;
    d.jumps_.push_back({tr, tc, fr, fc_, c});
  }
  return d;
}

Liouvillian::Liouvillian(const LevelScheme& scheme, const Dissipator& dissipator, const DriveConfig& drive)
    : scheme_(&scheme), dissipator_(&dissipator), drive_(drive) {
  if (dissipator.dim() != scheme.size()) throw ModelError("dissipator and level scheme dimensions differ");
  hamiltonian_ = build_hamiltonian(scheme, drive);
  if (dissipator.toggles().cross_shift) hamiltonian_ += dissipator.shift_hamiltonian();
  effective_ = hamiltonian_ - 0.5 * kI * dissipator.decay_operator();
  for (Eigen::Index c = 0; c < effective_.cols(); ++c)
    for (Eigen::Index r = 0; r < effective_.rows(); ++r)
      if (effective_(r, c) != 0.0)
        effective_nz_.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), effective_(r, c)});
}

DensityMatrix Liouvillian::apply(const DensityMatrix& rho) const {
  const auto n = static_cast<Eigen::Index>(dim());
  if (rho.rows() != n || rho.cols() != n) throw ModelError("density matrix dimension mismatch");
  DensityMatrix out = DensityMatrix::Zero(n, n);
  // -i (A rho - rho A^dagger) with A = H - i K/2.
  for (const auto& e : effective_nz_) {
    const auto r = static_cast<Eigen::Index>(e.row), c = static_cast<Eigen::Index>(e.col);
    out.row(r) += (-kI * e.value) * rho.row(c);
    out.col(r) += (kI * std::conj(e.value)) * rho.col(c);
  }
  for (const auto& j : dissipator_->jumps())
    out(static_cast<Eigen::Index>(j.to_row), static_cast<Eigen::Index>(j.to_col)) +=
        j.coeff * rho(static_cast<Eigen::Index>(j.from_row), static_cast<Eigen::Index>(j.from_col));
  return out;
}

Eigen::MatrixXcd Liouvillian::superoperator() const {
  std::vector<std::size_t> all(dim());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return restricted(all);
}

std::vector<std::size_t> Liouvillian::active_states() const {
  const std::size_t n = dim();
  // Couplings this far below the decay rate (thermal absorption at optical
  // frequencies, ~1e-43 at room temperature) cannot populate a state.
  const double negligible = 1e-30 * scheme_->gamma_tot;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : effective_nz_) {
    if (std::abs(e.value) < negligible) continue;
    adj[e.row].push_back(e.col);
    adj[e.col].push_back(e.row);
  }
  for (const auto& j : dissipator_->jumps()) {
    if (std::abs(j.coeff) < negligible) continue;
    adj[j.from_row].push_back(j.to_row);
    adj[j.from_col].push_back(j.to_col);
  }
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> todo;
  todo.push(scheme_->driven_ground);
  seen[scheme_->driven_ground] = true;
  while (!todo.empty()) {
    const std::size_t k = todo.front();
    todo.pop();
    for (std::size_t m : adj[k]) {
      if (seen[m] || scheme_->states[m].sink) continue;
      seen[m] = true;
      todo.push(m);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < n; ++k)
    if (seen[k]) out.push_back(k);
  return out;
}

Eigen::MatrixXcd Liouvillian::restricted(const std::vector<std::size_t>& states) const {
  constexpr auto npos = static_cast<Eigen::Index>(-1);
  std::vector<Eigen::Index> local(dim(), npos);
  for (std::size_t k = 0; k < states.size(); ++k) local.at(states[k]) = static_cast<Eigen::Index>(k);
  const auto m = static_cast<Eigen::Index>(states.size());
  auto idx = [m](Eigen::Index a, Eigen::Index b) { return a + m * b; };
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(m * m, m * m);
  for (const auto& e : effective_nz_) {
    const Eigen::Index r = local[e.row], c = local[e.col];
    if (r == npos || c == npos) continue;
    for (Eigen::Index y = 0; y < m; ++y) {
      s(idx(r, y), idx(c, y)) += -kI * e.value;
      s(idx(y, r), idx(y, c)) += kI * std::conj(e.value);
    }
  }
  for (const auto& j : dissipator_->jumps()) {
    const Eigen::Index tr = local[j.to_row], tc = local[j.to_col], fr = local[j.from_row], fcol = local[j.from_col];
    if (tr == npos || tc == npos || fr == npos || fcol == npos) continue;
    s(idx(tr, tc), idx(fr, fcol)) += j.coeff;
  }
  return s;
}

Trajectory evolve(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<double>& output_times,
                  const EvolveOptions& options) {
  if (!std::is_sorted(output_times.begin(), output_times.end()))
    throw std::invalid_argument("evolve: output times must be sorted");
  if (!output_times.empty() && output_times.front() < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
  const auto n = static_cast<Eigen::Index>(L.dim());
  if (rho0.rows() != n || rho0.cols() != n) throw ModelError("evolve: density matrix dimension mismatch");

  // Dormand-Prince 5(4) tableau.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2;
  (void)c3;
  (void)c4;
  (void)c5;

  Trajectory traj;
  DensityMatrix rho = rho0;
  double t = 0.0;
  const double span = output_times.empty() ? 0.0 : output_times.back();
  const double min_step = options.min_step > 0.0 ? options.min_step : 1e-14 * std::max(span, 1e-300);
  const double rate_scale = L.hamiltonian().cwiseAbs().maxCoeff() + L.dissipator().decay_operator().cwiseAbs().maxCoeff();
  double h = rate_scale > 0.0 ? 0.01 / rate_scale : span;

  DensityMatrix k1 = L.apply(rho), k2, k3, k4, k5, k6, k7;
  for (double target : output_times) {
    while (t < target) {
      if (traj.steps + traj.rejected >= options.max_steps) {
        std::ostringstream os;
        os << "evolve: exceeded " << options.max_steps << " steps at t=" << t;
        throw ModelError(os.str());
      }
      const bool last = (t + h >= target);
      const double step = last ? target - t : h;
      k2 = L.apply(rho + step * a21 * k1);
      k3 = L.apply(rho + step * (a31 * k1 + a32 * k2));
      k4 = L.apply(rho + step * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = L.apply(rho + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = L.apply(rho + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      DensityMatrix next = rho + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = L.apply(next);
      const DensityMatrix err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
      const double err_norm = err.cwiseAbs().maxCoeff() / (options.tolerance * scale);
      const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      if (err_norm <= 1.0) {
        t = last ? target : t + step;
        rho = std::move(next);
        k1 = k7;
        ++traj.steps;
        if (!last || factor < 1.0) h = step * factor;
      } else {
        ++traj.rejected;
        h = step * factor;
        if (h < min_step) {
          std::ostringstream os;
          os << "evolve: step size underflow at t=" << t << " s (h=" << h << " s, error ratio " << err_norm << ")";
          throw ModelError(os.str());
        }
      }
    }
    traj.times.push_back(target);
    traj.states.push_back(rho);
  }
  return traj;
}

DensityMatrix evolve(const Liouvillian& L, const DensityMatrix& rho0, double t, const EvolveOptions& options) {
  if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
  return evolve(L, rho0, std::vector<double>{t}, options).states.front();
}

DensityMatrix ground_state(const LevelScheme& scheme) {
  const auto n = static_cast<Eigen::Index>(scheme.size());
  DensityMatrix rho = DensityMatrix::Zero(n, n);
  const auto g = static_cast<Eigen::Index>(scheme.driven_ground);
  rho(g, g) = 1.0;
  return rho;
}

namespace {

Eigen::Index local_index(const std::vector<std::size_t>& states, std::size_t k) {
  auto it = std::lower_bound(states.begin(), states.end(), k);
  if (it == states.end() || *it != k) return -1;
  return static_cast<Eigen::Index>(it - states.begin());
}

struct BlockSolution {
  std::vector<std::size_t> states;
  Eigen::MatrixXcd generator;
  Eigen::VectorXcd x0;
  double time = 0.0;
};

BlockSolution prepare_block(const Liouvillian& L, const QuasiSteadyOptions& options) {
  const auto& scheme = L.scheme();
  if (!(scheme.gamma_tot > 0.0)) throw ModelError("quasi_steady_state: gamma_tot must be positive");
  if (!(options.time_in_gamma >= 0.0)) throw std::invalid_argument("quasi_steady_state: time must be >= 0");
  BlockSolution b;
  b.states = L.active_states();
  b.generator = L.restricted(b.states);
  const auto m = static_cast<Eigen::Index>(b.states.size());
  const Eigen::Index g = local_index(b.states, scheme.driven_ground);
  b.x0 = Eigen::VectorXcd::Zero(m * m);
  b.x0(g + m * g) = 1.0;
  b.time = options.time_in_gamma / scheme.gamma_tot;
  return b;
}

std::complex<double> block_trace(const Eigen::VectorXcd& v, Eigen::Index m) {
  std::complex<double> tr = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) tr += v(k + m * k);
  return tr;
}

// Relative mismatch between the trace-normalized evolved block and the
// slowest eigenmode of the generator, judged on the whole block and on its
// upper-state part separately (the latter is ~rabi^2 smaller).
double eigenmode_mismatch(const BlockSolution& b, const Eigen::VectorXcd& x, const LevelScheme& scheme) {
  const auto m = static_cast<Eigen::Index>(b.states.size());
  const Eigen::Index n2 = m * m;
  const double shift = 1e-3 * scheme.gamma_tot;
  Eigen::MatrixXcd shifted = b.generator - shift * Eigen::MatrixXcd::Identity(n2, n2);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  Eigen::VectorXcd v = x / x.norm();
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXcd w = lu.solve(v);
    w /= w.norm();
    const std::complex<double> phase = w.dot(v);
    if (std::abs(phase) > 0.0) w *= std::conj(phase) / std::abs(phase);
    const double change = (w - v).norm();
    v = w;
    if (change < 1e-15) break;
  }
  const Eigen::VectorXcd a = x / block_trace(x, m);
  const Eigen::VectorXcd e = v / block_trace(v, m);
  double full_scale = 0.0, full_diff = 0.0, up_scale = 0.0, up_diff = 0.0;
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < m; ++r) {
      const Eigen::Index k = r + m * c;
      const double diff = std::abs(a(k) - e(k));
      full_scale = std::max(full_scale, std::abs(a(k)));
      full_diff = std::max(full_diff, diff);
      if (!scheme.states[b.states[static_cast<std::size_t>(r)]].sink && r != local_index(b.states, scheme.driven_ground) &&
          c != local_index(b.states, scheme.driven_ground)) {
        up_scale = std::max(up_scale, std::abs(a(k)));
        up_diff = std::max(up_diff, diff);
      }
    }
  }
  double mismatch = full_scale > 0.0 ? full_diff / full_scale : 0.0;
  if (up_scale > 0.0) mismatch = std::max(mismatch, up_diff / up_scale);
  return mismatch;
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index m) {
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), m, m);
}

}  // namespace

QuasiSteadySolver::QuasiSteadySolver(const LevelScheme& scheme, const Dissipator& dissipator, const DriveConfig& drive,
                                     const QuasiSteadyOptions& options)
    : scheme_(&scheme), options_(options), base_detuning_(drive.detuning) {
  const Liouvillian L(scheme, dissipator, drive);
  BlockSolution b = prepare_block(L, options);
  states_ = std::move(b.states);
  generator_ = std::move(b.generator);
  x0_ = std::move(b.x0);
  const auto m = static_cast<Eigen::Index>(states_.size());
  // H contains -detuning on every upper state; -i[H, rho] gives +i (u_a - u_b) per entry.
  const auto groups = scheme.frame_groups();
  detuning_diagonal_ = Eigen::VectorXcd::Zero(m * m);
  for (Eigen::Index c = 0; c < m; ++c)
    for (Eigen::Index r = 0; r < m; ++r) {
      const double ur = groups[states_[static_cast<std::size_t>(r)]] == 0 ? 1.0 : 0.0;
      const double uc = groups[states_[static_cast<std::size_t>(c)]] == 0 ? 1.0 : 0.0;
      detuning_diagonal_(r + m * c) = kI * (ur - uc);
    }
}

ActiveBlock QuasiSteadySolver::solve(double detuning) const {
  BlockSolution b;
  b.states = states_;
  b.generator = generator_;
  b.generator.diagonal() += (detuning - base_detuning_) * detuning_diagonal_;
  b.x0 = x0_;
  b.time = options_.time_in_gamma / scheme_->gamma_tot;
  const auto m = static_cast<Eigen::Index>(b.states.size());
  const Eigen::VectorXcd x = (b.generator * b.time).exp() * b.x0;
  ActiveBlock out;
  out.states = b.states;
  out.rho = unvec(x, m);
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
  if (options_.cross_check && m > 1) {
    out.eigen_mismatch = eigenmode_mismatch(b, x, *scheme_);
    if (out.eigen_mismatch > options_.tolerance) {
      std::ostringstream os;
      os << "quasi_steady_state: evolved state and slowest generator eigenmode disagree by " << out.eigen_mismatch
         << " at detuning " << detuning << " rad/s";
      throw ModelError(os.str());
    }
  }
  return out;
}

ActiveBlock quasi_steady_block(const Liouvillian& L, const QuasiSteadyOptions& options) {
  return QuasiSteadySolver(L.scheme(), L.dissipator(), L.drive(), options).solve(L.drive().detuning);
}

DensityMatrix quasi_steady_state(const Liouvillian& L, const QuasiSteadyOptions& options) {
  const ActiveBlock block = quasi_steady_block(L, options);
  BlockSolution b = prepare_block(L, options);
  const auto& states = b.states;
  const auto m = static_cast<Eigen::Index>(states.size());
  const Eigen::Index n2 = m * m;
  const std::size_t n = L.dim();

  // Sinks receiving coherences with the active block, rows rho(s, x).
  std::vector<std::size_t> coherent_sinks;
  for (const auto& j : L.dissipator().jumps()) {
    if (local_index(states, j.from_row) < 0 || local_index(states, j.from_col) < 0) continue;
    if (L.scheme().states[j.to_row].sink && local_index(states, j.to_col) >= 0) coherent_sinks.push_back(j.to_row);
  }
  std::sort(coherent_sinks.begin(), coherent_sinks.end());
  coherent_sinks.erase(std::unique(coherent_sinks.begin(), coherent_sinks.end()), coherent_sinks.end());
  const auto ns = static_cast<Eigen::Index>(coherent_sinks.size());

  // Sink pairs fed directly by jumps out of the active block.
  std::map<std::pair<std::size_t, std::size_t>, Eigen::Index> sink_pairs;
  for (const auto& j : L.dissipator().jumps()) {
    if (local_index(states, j.from_row) < 0 || local_index(states, j.from_col) < 0) continue;
    if (L.scheme().states[j.to_row].sink && L.scheme().states[j.to_col].sink)
      sink_pairs.try_emplace({j.to_row, j.to_col}, static_cast<Eigen::Index>(sink_pairs.size()));
  }
  const auto np = static_cast<Eigen::Index>(sink_pairs.size());

  // Augmented linear system [x; coherence rows rho(s, x); sink pairs].
  const Eigen::MatrixXcd& h = L.hamiltonian();
  const Eigen::Index pair_base = n2 + ns * m;
  const Eigen::Index dim = pair_base + np;
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(dim, dim);
  w.topLeftCorner(n2, n2) = b.generator;
  // d rho(s, x)/dt = -i H(s,s) rho(s, x) + i sum_c rho(s, c) conj(A(x, c)) + jumps, A = H - iK/2.
  const Eigen::MatrixXcd eff = h - 0.5 * kI * L.dissipator().decay_operator();
  for (Eigen::Index s = 0; s < ns; ++s) {
    const Eigen::Index base = n2 + s * m;
    const auto sk = static_cast<Eigen::Index>(coherent_sinks[static_cast<std::size_t>(s)]);
    for (Eigen::Index x = 0; x < m; ++x) {
      w(base + x, base + x) += -kI * h(sk, sk);
      for (Eigen::Index c = 0; c < m; ++c) {
        const std::complex<double> a = eff(static_cast<Eigen::Index>(states[static_cast<std::size_t>(x)]),
                                           static_cast<Eigen::Index>(states[static_cast<std::size_t>(c)]));
        if (a != 0.0) w(base + x, base + c) += kI * std::conj(a);
      }
    }
  }
  for (const auto& [key, p] : sink_pairs) {
    const auto r = static_cast<Eigen::Index>(key.first), c = static_cast<Eigen::Index>(key.second);
    w(pair_base + p, pair_base + p) = -kI * (h(r, r) - h(c, c));
  }
  for (const auto& j : L.dissipator().jumps()) {
    const Eigen::Index fr = local_index(states, j.from_row), fcol = local_index(states, j.from_col);
    if (fr < 0 || fcol < 0) continue;
    auto pit = sink_pairs.find({j.to_row, j.to_col});
    if (pit != sink_pairs.end()) {
      w(pair_base + pit->second, fr + m * fcol) += j.coeff;
      continue;
    }
    auto it = std::lower_bound(coherent_sinks.begin(), coherent_sinks.end(), j.to_row);
    const Eigen::Index tc = local_index(states, j.to_col);
    if (it != coherent_sinks.end() && *it == j.to_row && tc >= 0)
      w(n2 + (it - coherent_sinks.begin()) * m + tc, fr + m * fcol) += j.coeff;
  }
  Eigen::VectorXcd start = Eigen::VectorXcd::Zero(dim);
  start.head(n2) = b.x0;
  const Eigen::VectorXcd y = (w * b.time).exp() * start;

  const auto nn = static_cast<Eigen::Index>(n);
  DensityMatrix rho = DensityMatrix::Zero(nn, nn);
  for (Eigen::Index c = 0; c < m; ++c)
    for (Eigen::Index r = 0; r < m; ++r)
      rho(static_cast<Eigen::Index>(states[static_cast<std::size_t>(r)]),
          static_cast<Eigen::Index>(states[static_cast<std::size_t>(c)])) = block.rho(r, c);
  for (Eigen::Index s = 0; s < ns; ++s) {
    const auto row = static_cast<Eigen::Index>(coherent_sinks[static_cast<std::size_t>(s)]);
    for (Eigen::Index x = 0; x < m; ++x) {
      const auto col = static_cast<Eigen::Index>(states[static_cast<std::size_t>(x)]);
      rho(row, col) = y(n2 + s * m + x);
      rho(col, row) = std::conj(y(n2 + s * m + x));
    }
  }
  for (const auto& [key, p] : sink_pairs)
    rho(static_cast<Eigen::Index>(key.first), static_cast<Eigen::Index>(key.second)) = y(pair_base + p);
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace xdamp
