#include "xdamp/wigner.hpp"

#include <array>
#include <cmath>

namespace xdamp {
namespace {

constexpr int kMaxFactorial = 256;

struct LogFactorialTable {
  std::array<long double, kMaxFactorial + 1> values{};
  LogFactorialTable() {
    values[0] = 0.0L;
    for (int k = 1; k <= kMaxFactorial; ++k) values[k] = values[k - 1] + std::log(static_cast<long double>(k));
  }
};

long double log_factorial(int n) {
  static const LogFactorialTable table;
  return table.values.at(static_cast<std::size_t>(n));
}

// Neumaier variant of Kahan summation.
struct CompensatedSum {
  long double sum = 0.0L;
  long double carry = 0.0L;
  void add(long double x) {
    const long double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  long double value() const { return sum + carry; }
};

}  // namespace

double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  if ((m1 + m2 + m3).twice() != 0) return 0.0;
  if (!valid_projection(j1, m1) || !valid_projection(j2, m2) || !valid_projection(j3, m3)) return 0.0;
  if (!triangle(j1, j2, j3)) return 0.0;

  // All quantities below are integers; work with twice-values halved.
  const int a = j1.twice(), b = j2.twice(), c = j3.twice();
  const int ma = m1.twice(), mb = m2.twice();
  const int mc = m3.twice();

  const int t1 = (a + b - c) / 2;
  const int t2 = (a - b + c) / 2;
  const int t3 = (-a + b + c) / 2;
  const int t4 = (a + b + c) / 2 + 1;

  const long double log_delta =
      0.5L * (log_factorial(t1) + log_factorial(t2) + log_factorial(t3) - log_factorial(t4));
  const long double log_m =
      0.5L * (log_factorial((a + ma) / 2) + log_factorial((a - ma) / 2) + log_factorial((b + mb) / 2) +
              log_factorial((b - mb) / 2) + log_factorial((c + mc) / 2) + log_factorial((c - mc) / 2));

  // k runs over integers keeping every factorial argument non-negative.
  const int x1 = (c - b + ma) / 2;   // j3 - j2 + m1
  const int x2 = (c - a - mb) / 2;   // j3 - j1 - m2
  const int y1 = (a + b - c) / 2;    // j1 + j2 - j3
  const int y2 = (a - ma) / 2;       // j1 - m1
  const int y3 = (b + mb) / 2;       // j2 + m2
  const int kmin = std::max({0, -x1, -x2});
  const int kmax = std::min({y1, y2, y3});

  CompensatedSum sum;
  for (int k = kmin; k <= kmax; ++k) {
    const long double log_den = log_factorial(k) + log_factorial(x1 + k) + log_factorial(x2 + k) +
                                log_factorial(y1 - k) + log_factorial(y2 - k) + log_factorial(y3 - k);
    const long double term = std::exp(log_delta + log_m - log_den);
    sum.add((k % 2 == 0) ? term : -term);
  }

  // Overall phase (-1)^(j1 - j2 - m3).
  const int phase_exp = (a - b - mc) / 2;
  const long double result = (phase_exp % 2 == 0) ? sum.value() : -sum.value();
  return static_cast<double>(result);
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  const double w = wigner3j(j1, j2, J, m1, m2, -M);
  if (w == 0.0) return 0.0;
  return phase(j1 - j2 + M) * std::sqrt(J.twice() + 1.0) * w;
}

double orthogonality_sum(HalfInt j_g, HalfInt j_e, HalfInt j_e2, HalfInt m_e, HalfInt m_e2) {
  const HalfInt one = HalfInt::integer(1);
  double sum = 0.0;
  for (int tmg = -j_g.twice(); tmg <= j_g.twice(); tmg += 2) {
    const HalfInt mg = HalfInt::from_twice(tmg);
    for (int q = -1; q <= 1; ++q) {
      const HalfInt hq = HalfInt::integer(q);
      sum += wigner3j(j_g, one, j_e, -mg, hq, m_e) * wigner3j(j_g, one, j_e2, -mg, hq, m_e2);
    }
  }
  return sum;
}

}  // namespace xdamp
