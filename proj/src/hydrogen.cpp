#include "xdamp/hydrogen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "xdamp/constants.hpp"
#include "xdamp/wigner.hpp"

namespace xdamp {
namespace {

constexpr char kOrbitalLetters[] = "SPDFGH";
const HalfInt kSpin = HalfInt::half(1);
const HalfInt kNuclearSpin = HalfInt::half(1);

double reduced_mass_factor() { return 1.0 / (1.0 + constants::electron_proton_mass_ratio); }

long double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long double factorial(int n) {
  long double r = 1.0L;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// R_nl(r) = norm * exp(-r/n) * sum_i coeff[i] r^(l+i), r in units of a0.
struct RadialPolynomial {
  long double norm;
  std::vector<long double> coeff;
};

RadialPolynomial radial_polynomial(int n, int l) {
  const int k = n - l - 1;
  const int a = 2 * l + 1;
  RadialPolynomial p;
  p.norm = std::sqrt(std::pow(2.0L / n, 3) * factorial(k) / (2.0L * n * factorial(n + l)));
  p.norm *= std::pow(2.0L / n, l);
  for (int i = 0; i <= k; ++i) {
    const long double sign = (i % 2 == 0) ? 1.0L : -1.0L;
    p.coeff.push_back(sign * binomial(k + a, k - i) * std::pow(2.0L / n, i) / factorial(i));
  }
  return p;
}

// One term of a hyperfine state expanded in |l m_l> |s m_s> |I m_I>.
struct UncoupledTerm {
  HalfInt ml, ms, mi;
  double amplitude;
};

std::vector<UncoupledTerm> uncouple(int l, HalfInt j, HalfInt f, HalfInt mf) {
  std::vector<UncoupledTerm> terms;
  const HalfInt hl = HalfInt::integer(l);
  for (int tmj = -j.twice(); tmj <= j.twice(); tmj += 2) {
    const HalfInt mj = HalfInt::from_twice(tmj);
    const HalfInt mi = mf - mj;
    if (!valid_projection(kNuclearSpin, mi)) continue;
    const double c_hf = clebsch_gordan(j, mj, kNuclearSpin, mi, f, mf);
    if (c_hf == 0.0) continue;
    for (int ml = -l; ml <= l; ++ml) {
      const HalfInt hml = HalfInt::integer(ml);
      const HalfInt ms = mj - hml;
      if (!valid_projection(kSpin, ms)) continue;
      const double c_fs = clebsch_gordan(hl, hml, kSpin, ms, j, mj);
      if (c_fs == 0.0) continue;
      terms.push_back({hml, ms, mi, c_hf * c_fs});
    }
  }
  return terms;
}

// <l m| C^1_q |l' m'> for the unit-normalized dipole operator, so that
// <n l m| r_q |n' l' m'> = R * orbital_dipole(...).
double orbital_dipole(int l, HalfInt ml, int lp, HalfInt mlp, int q) {
  const HalfInt hl = HalfInt::integer(l), hlp = HalfInt::integer(lp), one = HalfInt::integer(1);
  const double reduced = phase(hl) * std::sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0)) *
                         wigner3j(hl, one, hlp, HalfInt{}, HalfInt{}, HalfInt{});
  if (reduced == 0.0) return 0.0;
  return phase(hl - ml) * wigner3j(hl, one, hlp, -ml, HalfInt::integer(q), mlp) * reduced;
}

double hyperfine_offset(double a_hz, HalfInt j, HalfInt f) {
  const double J = j.value(), F = f.value(), I = kNuclearSpin.value();
  return 0.5 * a_hz * (F * (F + 1.0) - I * (I + 1.0) - J * (J + 1.0));
}

}  // namespace

std::string ManifoldId::label() const {
  std::ostringstream os;
  os << n << kOrbitalLetters[l] << j.twice() << "/2";
  return os.str();
}

std::string AtomicState::label() const {
  std::ostringstream os;
  os << manifold().label() << " F=" << f.str() << " M=" << mf.str();
  return os.str();
}

Eigen::Vector3cd spherical_to_cartesian(const SphericalVector& v) {
  // v = sum_q v_q e_q^*, e_{+1} = -(x + i y)/sqrt2, e_0 = z, e_{-1} = (x - i y)/sqrt2.
  const double s = 1.0 / std::sqrt(2.0);
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> vm = v[0], v0 = v[1], vp = v[2];
  Eigen::Vector3cd out;
  out.x() = s * (vm - vp);
  out.y() = s * i * (vm + vp);
  out.z() = v0;
  return out;
}

std::complex<double> dipole_dot(const SphericalVector& a, const SphericalVector& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

double Transition::dipole_norm2() const { return dipole_dot(dipole, dipole).real(); }

double radial_integral(int n1, int l1, int n2, int l2) {
  if (n1 < 1 || n2 < 1 || l1 < 0 || l2 < 0 || l1 >= n1 || l2 >= n2)
    throw ModelError("radial_integral: not a bound hydrogen state");
  if (std::abs(l1 - l2) != 1) throw ModelError("radial_integral: dipole selection rule requires l2 = l1 +- 1");
  const RadialPolynomial p1 = radial_polynomial(n1, l1);
  const RadialPolynomial p2 = radial_polynomial(n2, l2);
  const long double beta = 1.0L / n1 + 1.0L / n2;
  long double sum = 0.0L;
  for (std::size_t i = 0; i < p1.coeff.size(); ++i) {
    for (std::size_t k = 0; k < p2.coeff.size(); ++k) {
      const int m = 3 + l1 + l2 + static_cast<int>(i + k);
      sum += p1.coeff[i] * p2.coeff[k] * factorial(m) / std::pow(beta, m + 1);
    }
  }
  return static_cast<double>(p1.norm * p2.norm * sum);
}

double hyperfine_constant_hz(int n, int l, HalfInt j) {
  const double J = j.value();
  return constants::alpha * constants::alpha * constants::proton_g_factor * constants::electron_proton_mass_ratio *
         constants::rydberg_frequency / (n * n * n * (l + 0.5) * J * (J + 1.0));
}

double dirac_energy_hz(int n, HalfInt j) {
  const double a2 = constants::alpha * constants::alpha;
  const double rh = constants::rydberg_frequency * reduced_mass_factor();
  return -rh / (n * n) * (1.0 + a2 / (n * n) * (n / (j.value() + 0.5) - 0.75));
}

SphericalVector angular_dipole(int l_lower, HalfInt j_lower, HalfInt f_lower, HalfInt m_lower, int l_upper,
                               HalfInt j_upper, HalfInt f_upper, HalfInt m_upper) {
  SphericalVector out{};
  if (std::abs(l_lower - l_upper) != 1) return out;
  const HalfInt one = HalfInt::integer(1);
  if (!triangle(j_lower, one, j_upper) || !triangle(f_lower, one, f_upper)) return out;
  // r_q|m> carries projection m + q.
  const int q = (m_lower - m_upper).twice() / 2;
  if (std::abs((m_lower - m_upper).twice()) > 2) return out;
  const auto lower = uncouple(l_lower, j_lower, f_lower, m_lower);
  const auto upper = uncouple(l_upper, j_upper, f_upper, m_upper);
  double sum = 0.0;
  for (const auto& a : lower) {
    for (const auto& b : upper) {
      if (a.ms != b.ms || a.mi != b.mi) continue;
      sum += a.amplitude * b.amplitude * orbital_dipole(l_lower, a.ml, l_upper, b.ml, q);
    }
  }
  // Cancellations that are exact in closed form leave roundoff residue.
  if (std::fabs(sum) < 1e-13) sum = 0.0;
  out[static_cast<std::size_t>(q + 1)] = sum;
  return out;
}

std::pair<int, int> parse_term(const std::string& term) {
  if (term.size() < 2) throw ModelError("bad term label '" + term + "'");
  const std::string digits = term.substr(0, term.size() - 1);
  const char letter = term.back();
  const char* pos = std::char_traits<char>::find(kOrbitalLetters, 6, letter);
  if (!pos || digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
    throw ModelError("bad term label '" + term + "'");
  const int n = std::stoi(digits);
  const int l = static_cast<int>(pos - kOrbitalLetters);
  if (l >= n) throw ModelError("bad term label '" + term + "'");
  return {n, l};
}

std::optional<std::size_t> LevelScheme::find(int n, int l, HalfInt j, HalfInt f, HalfInt mf) const {
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    if (s.n == n && s.l == l && s.j == j && s.f == f && s.mf == mf) return k;
  }
  return std::nullopt;
}

std::size_t LevelScheme::index(int n, int l, HalfInt j, HalfInt f, HalfInt mf) const {
  auto k = find(n, l, j, f, mf);
  if (!k) throw ModelError("state not in level scheme");
  return *k;
}

double LevelScheme::peak_splitting() const {
  return states.at(second_upper).energy - states.at(reference_upper).energy;
}

std::vector<int> LevelScheme::frame_groups() const {
  std::map<ManifoldId, int> ids;
  std::vector<bool> is_upper(states.size(), false);
  for (const auto& t : transitions) is_upper[t.upper] = true;
  std::vector<int> groups(states.size(), 0);
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (is_upper[k]) continue;
    auto [it, inserted] = ids.try_emplace(states[k].manifold(), static_cast<int>(ids.size()) + 1);
    groups[k] = it->second;
  }
  return groups;  // upper states share group 0
}

std::vector<std::size_t> LevelScheme::transitions_from(std::size_t upper) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < transitions.size(); ++i)
    if (transitions[i].upper == upper) out.push_back(i);
  return out;
}

LevelScheme LevelScheme::subset(const std::vector<std::size_t>& keep) const {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> remap(states.size(), npos);
  LevelScheme out;
  for (std::size_t k : keep) {
    remap.at(k) = out.states.size();
    out.states.push_back(states[k]);
  }
  for (const auto& t : transitions) {
    if (remap[t.lower] == npos || remap[t.upper] == npos) continue;
    Transition u = t;
    u.lower = remap[t.lower];
    u.upper = remap[t.upper];
    out.transitions.push_back(u);
  }
  out.gamma_tot = gamma_tot;
  auto map_required = [&](std::size_t k) {
    if (remap.at(k) == npos) throw ModelError("subset must keep the driven and reference states");
    return remap[k];
  };
  out.driven_ground = map_required(driven_ground);
  out.reference_upper = map_required(reference_upper);
  out.second_upper = remap[second_upper] == npos ? out.reference_upper : remap[second_upper];
  return out;
}

LevelScheme build_level_scheme(const ModelConfig& config) {
  if (!(config.gamma_scale > 0.0)) throw ModelError("model.gamma_scale must be positive");
  if (!config.compute_missing_splittings) {
    std::vector<std::string> missing;
    if (!config.fine_structure_4p_hz) missing.push_back("fine_structure_4p_hz");
    if (!config.hyperfine_4p12_hz) missing.push_back("hyperfine_4p12_hz");
    if (!config.hyperfine_4p32_hz) missing.push_back("hyperfine_4p32_hz");
    if (config.lower_hyperfine_resolved && !config.hyperfine_2s_hz) missing.push_back("hyperfine_2s_hz");
    if (!missing.empty()) {
      std::string msg = "missing splittings:";
      for (const auto& m : missing) msg += " model." + m;
      throw ModelError(msg);
    }
  }

  std::vector<std::pair<int, int>> sinks;
  for (const auto& term : config.sink_manifolds) {
    auto nl = parse_term(term);
    if (nl.second == 1 || nl.first >= 4) throw ModelError("sink manifold '" + term + "' is not a 4P decay channel");
    sinks.push_back(nl);
  }
  std::sort(sinks.begin(), sinks.end());
  sinks.erase(std::unique(sinks.begin(), sinks.end()), sinks.end());
  const bool has_2s = std::find(sinks.begin(), sinks.end(), std::pair{2, 0}) != sinks.end();

  const HalfInt half = HalfInt::half(1), three_half = HalfInt::half(3);
  const double ref_hz = dirac_energy_hz(2, half);

  // Fine-structure level energies [Hz] relative to 2S1/2.
  auto level_hz = [&](int n, int l, HalfInt j) {
    double e = dirac_energy_hz(n, j) - ref_hz;
    if (n == 4 && l == 1 && j == three_half && config.fine_structure_4p_hz)
      e = dirac_energy_hz(4, half) - ref_hz + *config.fine_structure_4p_hz;
    return e;
  };
  auto hyperfine_a_hz = [&](int n, int l, HalfInt j) {
    if (n == 4 && l == 1 && j == half && config.hyperfine_4p12_hz) return *config.hyperfine_4p12_hz;
    if (n == 4 && l == 1 && j == three_half && config.hyperfine_4p32_hz) return *config.hyperfine_4p32_hz / 2.0;
    if (n == 2 && l == 0 && config.hyperfine_2s_hz) return *config.hyperfine_2s_hz;
    return hyperfine_constant_hz(n, l, j);
  };

  LevelScheme scheme;
  auto add_level = [&](int n, int l, HalfInt j, bool upper, bool only_driven) {
    const bool resolved = upper || config.lower_hyperfine_resolved;
    for (int tf = std::abs(j.twice() - 1); tf <= j.twice() + 1; tf += 2) {
      const HalfInt f = HalfInt::from_twice(tf);
      for (int tm = -tf; tm <= tf; tm += 2) {
        const HalfInt m = HalfInt::from_twice(tm);
        const bool driven = (n == 2 && l == 0 && tf == 0);
        if (only_driven && !driven) continue;
        AtomicState s;
        s.n = n;
        s.l = l;
        s.j = j;
        s.f = f;
        s.mf = m;
        double hz = level_hz(n, l, j);
        if (resolved) hz += hyperfine_offset(hyperfine_a_hz(n, l, j), j, f);
        s.energy = 2.0 * constants::pi * hz;
        s.sink = !upper && !driven;
        scheme.states.push_back(s);
      }
    }
  };

  // Lower manifolds in (n, l) order; 2S always contributes the driven state.
  std::vector<std::pair<int, int>> lower_terms = sinks;
  if (!has_2s) lower_terms.insert(std::upper_bound(lower_terms.begin(), lower_terms.end(), std::pair{2, 0}), {2, 0});
  for (auto [n, l] : lower_terms) {
    const bool only_driven = (n == 2 && l == 0 && !has_2s);
    if (l == 0) {
      add_level(n, l, half, false, only_driven);
    } else {
      add_level(n, l, HalfInt::integer(l) - half, false, only_driven);
      add_level(n, l, HalfInt::integer(l) + half, false, only_driven);
    }
  }
  const std::size_t first_upper = scheme.states.size();
  add_level(4, 1, half, true, false);
  add_level(4, 1, three_half, true, false);

  scheme.driven_ground = scheme.index(2, 0, half, HalfInt{}, HalfInt{});
  scheme.reference_upper = scheme.index(4, 1, half, HalfInt::integer(1), HalfInt{});
  scheme.second_upper = scheme.index(4, 1, three_half, HalfInt::integer(1), HalfInt{});

  const double length_scale = 1.0 / reduced_mass_factor();  // a_H / a0
  const double dipole_scale = std::sqrt(config.gamma_scale);
  std::map<std::pair<int, int>, double> radial_cache;

  for (std::size_t u = first_upper; u < scheme.states.size(); ++u) {
    const auto& up = scheme.states[u];
    for (std::size_t g = 0; g < first_upper; ++g) {
      const auto& lo = scheme.states[g];
      if (std::abs(lo.l - up.l) != 1) continue;
      if (!has_2s && lo.n == 2) continue;
      auto d = angular_dipole(lo.l, lo.j, lo.f, lo.mf, up.l, up.j, up.f, up.mf);
      if (d[0] == 0.0 && d[1] == 0.0 && d[2] == 0.0) continue;
      auto key = std::pair{lo.n, lo.l};
      auto it = radial_cache.find(key);
      if (it == radial_cache.end()) it = radial_cache.emplace(key, radial_integral(lo.n, lo.l, up.n, up.l)).first;
      const double scale = it->second * length_scale * dipole_scale;
      for (auto& c : d) c *= scale;
      scheme.transitions.push_back({g, u, d, up.energy - lo.energy});
    }
  }

  // Total decay rate at term-centroid frequencies; identical for every 4P
  // sublevel because the sum over a complete lower term is rotationally
  // invariant.
  auto centroid = [&](int n, int l) {
    double sum = 0.0;
    int count = 0;
    for (const auto& s : scheme.states)
      if (s.n == n && s.l == l) {
        sum += s.energy;
        ++count;
      }
    return sum / count;
  };
  const double upper_centroid = centroid(4, 1);
  const double k_rate = 4.0 / 3.0 * constants::alpha * std::pow(constants::bohr_radius / constants::c, 2);
  std::map<std::pair<int, int>, double> strength;
  for (std::size_t i : scheme.transitions_from(scheme.reference_upper)) {
    const auto& t = scheme.transitions[i];
    strength[{scheme.states[t.lower].n, scheme.states[t.lower].l}] += t.dipole_norm2();
  }
  double gamma = 0.0;
  for (auto [nl, s2] : strength) {
    const double w = upper_centroid - centroid(nl.first, nl.second);
    gamma += k_rate * w * w * w * s2;
  }
  scheme.gamma_tot = gamma;
  return scheme;
}

double dfrak(const LevelScheme& scheme, std::size_t e, std::size_t e2, const ManifoldId& ground) {
  std::complex<double> sum = 0.0;
  for (const auto& ti : scheme.transitions) {
    if (ti.upper != e || scheme.states[ti.lower].manifold() != ground) continue;
    for (const auto& tj : scheme.transitions) {
      if (tj.upper != e2 || tj.lower != ti.lower) continue;
      sum += dipole_dot(ti.dipole, tj.dipole);
    }
  }
  return sum.real();
}

}  // namespace xdamp
