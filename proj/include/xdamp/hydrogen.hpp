#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xdamp/half_int.hpp"

namespace xdamp {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fine-structure level (n, L, J). Hyperfine sublevels of one manifold share
/// a rotating frame.
struct ManifoldId {
  int n = 1;
  int l = 0;
  HalfInt j = HalfInt::half(1);

  auto operator<=>(const ManifoldId&) const = default;
  std::string label() const;  // e.g. "4P3/2"
};

struct AtomicState {
  int n = 1;
  int l = 0;
  HalfInt j;
  HalfInt f;
  HalfInt mf;
  double energy = 0.0;  ///< rad/s, relative to the 2S1/2 fine-structure level
  bool sink = false;    ///< absorbing: never driven, never decays

  ManifoldId manifold() const { return {n, l, j}; }
  std::string label() const;  // e.g. "4P1/2 F=1 M=0"
};

/// Spherical-basis component index: q = -1, 0, +1 stored at q + 1.
using SphericalVector = std::array<std::complex<double>, 3>;

/// Spherical components <q|v> -> Cartesian (x, y, z) vector.
Eigen::Vector3cd spherical_to_cartesian(const SphericalVector& v);

struct Transition {
  std::size_t lower = 0;  ///< index into LevelScheme::states
  std::size_t upper = 0;
  SphericalVector dipole{};  ///< <lower| r_q |upper> in units of e a0
  double omega = 0.0;        ///< rad/s, E_upper - E_lower

  Eigen::Vector3cd dipole_cartesian() const { return spherical_to_cartesian(dipole); }
  double dipole_norm2() const;
};

/// Conjugate-linear dot product d_i^* . d_j of two spherical-basis dipoles.
std::complex<double> dipole_dot(const SphericalVector& a, const SphericalVector& b);

/// Energy and composition knobs for the hydrogen 2S-4P model. All frequencies
/// are in Hz; unset values are computed from the Dirac fine-structure formula
/// and the non-relativistic magnetic-dipole hyperfine constant.
struct ModelConfig {
  std::optional<double> fine_structure_4p_hz;  ///< E(4P3/2) - E(4P1/2)
  std::optional<double> hyperfine_4p12_hz;     ///< F=1 - F=0 splitting of 4P1/2
  std::optional<double> hyperfine_4p32_hz;     ///< F=2 - F=1 splitting of 4P3/2
  std::optional<double> hyperfine_2s_hz;       ///< F=1 - F=0 splitting of 2S1/2
  bool compute_missing_splittings = true;
  bool lower_hyperfine_resolved = false;
  double gamma_scale = 1.0;
  std::vector<std::string> sink_manifolds{"1S", "2S", "3S", "3D"};

  bool operator==(const ModelConfig&) const = default;
};

class LevelScheme {
 public:
  std::vector<AtomicState> states;
  std::vector<Transition> transitions;
  double gamma_tot = 0.0;  ///< rad/s, total 4P decay rate at the 4P centroid frequency
  std::size_t driven_ground = 0;    ///< |2S1/2 F=0 M=0>
  std::size_t reference_upper = 0;  ///< |4P1/2 F=1 M=0>
  std::size_t second_upper = 0;     ///< |4P3/2 F=1 M=0>

  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> find(int n, int l, HalfInt j, HalfInt f, HalfInt mf) const;
  std::size_t index(int n, int l, HalfInt j, HalfInt f, HalfInt mf) const;

  /// Angular frequency offset of the 4P3/2 F=1 resonance from the 4P1/2 F=1
  /// resonance [rad/s].
  double peak_splitting() const;

  /// Frame-group id per state: lower states grouped by fine-structure
  /// manifold, all upper states in one group.
  std::vector<int> frame_groups() const;

  std::vector<std::size_t> transitions_from(std::size_t upper) const;

  /// Subset keeping the listed states and every transition between them.
  LevelScheme subset(const std::vector<std::size_t>& keep) const;
};

/// <R_{n1 l1} | r | R_{n2 l2}> for non-relativistic hydrogen, in units of a0.
double radial_integral(int n1, int l1, int n2, int l2);

/// Magnetic-dipole hyperfine constant A for hydrogen level (n, l, j) [Hz].
double hyperfine_constant_hz(int n, int l, HalfInt j);

/// Dirac bound-state energy of (n, j) with reduced-mass Rydberg [Hz].
double dirac_energy_hz(int n, HalfInt j);

/// Spherical components <lower| r_q |upper> / <R|r|R> for hyperfine states;
/// the dipole acts on the orbital part of |L S J; I F M_F>.
SphericalVector angular_dipole(int l_lower, HalfInt j_lower, HalfInt f_lower, HalfInt m_lower, int l_upper,
                               HalfInt j_upper, HalfInt f_upper, HalfInt m_upper);

LevelScheme build_level_scheme(const ModelConfig& config = {});

/// Sum over every hyperfine sublevel g of `ground` of d_ge^* . d_ge'.
double dfrak(const LevelScheme& scheme, std::size_t e, std::size_t e2, const ManifoldId& ground);

/// Parse labels such as "1S", "3D" into (n, l).
std::pair<int, int> parse_term(const std::string& term);

}  // namespace xdamp
