#pragma once
// Independent reference implementations used only by the tests.

#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

namespace oracle {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
using big_float = boost::multiprecision::cpp_bin_float_50;

inline cpp_int factorial(int n) {
  cpp_int r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Racah single-sum formula in exact rational arithmetic; arguments are
// doubled quantum numbers.
inline double wigner3j(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
  if (tm1 + tm2 + tm3 != 0) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) return 0.0;
  if ((tj1 + tm1) % 2 || (tj2 + tm2) % 2 || (tj3 + tm3) % 2) return 0.0;
  if (tj3 < std::abs(tj1 - tj2) || tj3 > tj1 + tj2 || (tj1 + tj2 + tj3) % 2) return 0.0;
  auto h = [](int t) { return t / 2; };  // all combinations below are even
  const int a = h(tj1 + tj2 - tj3), b = h(tj1 - tj2 + tj3), c = h(-tj1 + tj2 + tj3), d = h(tj1 + tj2 + tj3) + 1;
  const cpp_rational triangle(factorial(a) * factorial(b) * factorial(c), factorial(d));
  const cpp_int prod = factorial(h(tj1 + tm1)) * factorial(h(tj1 - tm1)) * factorial(h(tj2 + tm2)) *
                       factorial(h(tj2 - tm2)) * factorial(h(tj3 + tm3)) * factorial(h(tj3 - tm3));
  const int t1 = h(tj3 - tj2 + tm1), t2 = h(tj3 - tj1 - tm2), t3 = h(tj1 + tj2 - tj3), t4 = h(tj1 - tm1),
            t5 = h(tj2 + tm2);
  const int kmin = std::max({0, -t1, -t2}), kmax = std::min({t3, t4, t5});
  cpp_rational sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    const cpp_int den = factorial(k) * factorial(t1 + k) * factorial(t2 + k) * factorial(t3 - k) * factorial(t4 - k) *
                        factorial(t5 - k);
    sum += cpp_rational(k % 2 ? -1 : 1, den);
  }
  if (sum == 0) return 0.0;
  const cpp_rational square = triangle * cpp_rational(prod) * sum * sum;
  big_float value = boost::multiprecision::sqrt(big_float(square));
  const int phase = h(tj1 - tj2 - tm3);
  if ((phase % 2 != 0) != (sum < 0)) value = -value;
  return static_cast<double>(value);
}

// Hydrogen radial function from the generalized Laguerre polynomial.
inline double radial_function(int n, int l, double r) {
  const double rho = 2.0 * r / n;
  const double norm = std::sqrt(std::pow(2.0 / n, 3) * std::tgamma(n - l) / (2.0 * n * std::tgamma(n + l + 1)));
  return norm * std::exp(-rho / 2) * std::pow(rho, l) * boost::math::laguerre(n - l - 1, 2 * l + 1, rho);
}

inline double radial_integral(int n1, int l1, int n2, int l2) {
  auto f = [&](double r) { return radial_function(n1, l1, r) * radial_function(n2, l2, r) * r * r * r; };
  double sum = 0.0;
  for (double a = 0.0; a < 400.0; a += 5.0)
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, a + 5.0, 10, 1e-14);
  return sum;
}

// F_c by direct quadrature of the Gaussian-weighted step function in tau'.
inline std::complex<double> fc(double dw, double tau_c) {
  const double norm = 2.0 / (std::sqrt(M_PI) * tau_c);
  auto theta = [&](double t) -> std::complex<double> {
    const double x = 0.5 * dw * t;
    const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
    return std::polar(sinc, x);
  };
  auto re = [&](double t) { return norm * std::exp(-t * t / (tau_c * tau_c)) * theta(t).real(); };
  auto im = [&](double t) { return norm * std::exp(-t * t / (tau_c * tau_c)) * theta(t).imag(); };
  const int panels = 200;
  const double upper = 9.0 * tau_c;
  double sr = 0.0, si = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = upper * p / panels, b = upper * (p + 1) / panels;
    sr += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(re, a, b, 10, 1e-15);
    si += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(im, a, b, 10, 1e-15);
  }
  return {sr, si};
}

// P int_0^W w^3/(w + s a) dw in closed form (s = +1 or -1).
inline double principal_value(double a, double w, int s) {
  // w^3/(w+b) = w^2 - b w + b^2 - b^3/(w+b), b = s a
  const long double b = static_cast<long double>(s) * a, W = w;
  const long double poly = W * W * W / 3 - b * W * W / 2 + b * b * W;
  const long double logterm = std::log(std::fabs((W + b) / b));
  return static_cast<double>(poly - b * b * b * logterm);
}

// Textbook optical Bloch equations for a V system: ground g, excited 1 and 2,
// Rabi frequencies O1, O2 (H = d1|1><1| + d2|2><2| - (O/2)|e><g| - h.c.),
// decay rates G1, G2 back to g, coherence 1-2 damped at (G1+G2)/2.
// Returns the steady state ordered (g, 1, 2).
inline Eigen::Matrix3cd v_system_steady_state(double d1_, double d2_, std::complex<double> o1, std::complex<double> o2,
                                              double g1_, double g2_) {
  using C = std::complex<long double>;  // extended precision: populations span 11 decades
  const C I(0, 1);
  // Unknown vector: rho_gg, rho_11, rho_22, rho_g1, rho_1g, rho_g2, rho_2g, rho_12, rho_21
  enum { GG, E1, E2, G1_, R1G, G2_, R2G, R12, R21 };
  Eigen::Matrix<C, 10, 9> m = Eigen::Matrix<C, 10, 9>::Zero();
  Eigen::Matrix<C, 10, 1> rhs = Eigen::Matrix<C, 10, 1>::Zero();
  const C h1 = C(o1.real(), o1.imag()) / 2.0L, h2 = C(o2.real(), o2.imag()) / 2.0L;
  const long double g1 = g1_, g2 = g2_, d1 = d1_, d2 = d2_;  // H_1g = -h1, H_g1 = -conj(h1)
  // d rho_11 = -G1 rho_11 + i h1 rho_g1 - i conj(h1) rho_1g
  m(E1, E1) = -g1;
  m(E1, G1_) = I * h1;
  m(E1, R1G) = -I * std::conj(h1);
  m(E2, E2) = -g2;
  m(E2, G2_) = I * h2;
  m(E2, R2G) = -I * std::conj(h2);
  // d rho_gg = G1 rho_11 + G2 rho_22 - i h1 rho_g1 + i conj(h1) rho_1g - (same for 2)
  m(GG, E1) = g1;
  m(GG, E2) = g2;
  m(GG, G1_) = -I * h1;
  m(GG, R1G) = I * std::conj(h1);
  m(GG, G2_) = -I * h2;
  m(GG, R2G) = I * std::conj(h2);
  // d rho_1g = (-i d1 - G1/2) rho_1g + i h1 (rho_gg - rho_11) - i h2 rho_12
  m(R1G, R1G) = -I * d1 - g1 / 2.0L;
  m(R1G, GG) = I * h1;
  m(R1G, E1) = -I * h1;
  m(R1G, R12) = -I * h2;
  m(R2G, R2G) = -I * d2 - g2 / 2.0L;
  m(R2G, GG) = I * h2;
  m(R2G, E2) = -I * h2;
  m(R2G, R21) = -I * h1;
  // rho_g1 = conj(rho_1g)
  m(G1_, G1_) = I * d1 - g1 / 2.0L;
  m(G1_, GG) = -I * std::conj(h1);
  m(G1_, E1) = I * std::conj(h1);
  m(G1_, R21) = I * std::conj(h2);
  m(G2_, G2_) = I * d2 - g2 / 2.0L;
  m(G2_, GG) = -I * std::conj(h2);
  m(G2_, E2) = I * std::conj(h2);
  m(G2_, R12) = I * std::conj(h1);
  // d rho_12 = (-i (d1 - d2) - (G1+G2)/2) rho_12 + i h1 rho_g2 - i conj(h2) rho_1g
  m(R12, R12) = -I * (d1 - d2) - (g1 + g2) / 2.0L;
  m(R12, G2_) = I * h1;
  m(R12, R1G) = -I * std::conj(h2);
  m(R21, R21) = I * (d1 - d2) - (g1 + g2) / 2.0L;
  m(R21, G1_) = I * h2;
  m(R21, R2G) = -I * std::conj(h1);
  // The population equations are dependent; replace by normalization.
  m.row(9).setZero();
  m(9, GG) = m(9, E1) = m(9, E2) = 1.0L;
  rhs(9) = 1.0L;
  m.row(GG).setZero();
  const Eigen::Matrix<C, 9, 1> x = m.bottomRows(9).colPivHouseholderQr().solve(rhs.bottomRows(9));
  const int order[9] = {GG, G1_, G2_, R1G, E1, R12, R2G, R21, E2};
  Eigen::Matrix3cd rho;
  for (int k = 0; k < 9; ++k)
    rho(k / 3, k % 3) = std::complex<double>(static_cast<double>(x(order[k]).real()), static_cast<double>(x(order[k]).imag()));
  return rho;
}

}  // namespace oracle
