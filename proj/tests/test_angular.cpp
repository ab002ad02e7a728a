#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "xdamp/wigner.hpp"

using fixtures::h;
using xdamp::wigner3j;

TEST_SUITE("angular") {
  TEST_CASE("3j matches exact rational Racah sum for |2j| <= 10") {
    double worst = 0.0;
    long count = 0;
    for (int a = 0; a <= 10; ++a)
      for (int b = 0; b <= 10; ++b)
        for (int c = std::abs(a - b); c <= std::min(10, a + b); c += 2)
          for (int ma = -a; ma <= a; ma += 2)
            for (int mb = -b; mb <= b; mb += 2) {
              const int mc = -ma - mb;
              if (std::abs(mc) > c) continue;
              const double got = wigner3j(h(a), h(b), h(c), h(ma), h(mb), h(mc));
              const double want = oracle::wigner3j(a, b, c, ma, mb, mc);
              worst = std::max(worst, std::fabs(got - want));
              ++count;
            }
    INFO("compared " << count << " symbols");
    CHECK(count > 10000);
    CHECK(worst < 1e-13);
  }

  TEST_CASE("selection rules give exact zeros") {
    CHECK(wigner3j(h(2), h(2), h(2), h(0), h(0), h(2)) == 0.0);      // m sum
    CHECK(wigner3j(h(2), h(2), h(6), h(0), h(0), h(0)) == 0.0);      // triangle
    CHECK(wigner3j(h(2), h(2), h(2), h(0), h(0), h(0)) == 0.0);      // odd J, all m = 0
    CHECK(wigner3j(h(1), h(1), h(2), h(3), h(-1), h(-2)) == 0.0);    // |m| > j
  }

  TEST_CASE("symmetry under column permutation and m reversal") {
    for (int a = 0; a <= 6; ++a)
      for (int b = 0; b <= 6; ++b)
        for (int c = std::abs(a - b); c <= a + b; c += 2)
          for (int ma = -a; ma <= a; ma += 2)
            for (int mb = -b; mb <= b; mb += 2) {
              const int mc = -ma - mb;
              if (std::abs(mc) > c) continue;
              const double v = wigner3j(h(a), h(b), h(c), h(ma), h(mb), h(mc));
              const int sum = (a + b + c) / 2;
              const double sign = sum % 2 ? -1.0 : 1.0;
              CHECK(wigner3j(h(b), h(c), h(a), h(mb), h(mc), h(ma)) == doctest::Approx(v).epsilon(1e-14));
              CHECK(wigner3j(h(b), h(a), h(c), h(mb), h(ma), h(mc)) == doctest::Approx(sign * v).epsilon(1e-14));
              CHECK(wigner3j(h(a), h(b), h(c), h(-ma), h(-mb), h(-mc)) == doctest::Approx(sign * v).epsilon(1e-14));
            }
  }

  TEST_CASE("orthogonality over j3 and m3") {
    // sum_{j3 m3} (2 j3 + 1) 3j(j1 j2 j3; m1 m2 m3) 3j(j1 j2 j3; m1' m2' m3) = delta
    const int a = 3, b = 4;
    for (int m1 = -a; m1 <= a; m1 += 2)
      for (int m2 = -b; m2 <= b; m2 += 2)
        for (int n1 = -a; n1 <= a; n1 += 2)
          for (int n2 = -b; n2 <= b; n2 += 2) {
            if (m1 + m2 != n1 + n2) continue;
            double s = 0.0;
            for (int c = std::abs(a - b); c <= a + b; c += 2)
              s += (c + 1) * wigner3j(h(a), h(b), h(c), h(m1), h(m2), h(-m1 - m2)) *
                   wigner3j(h(a), h(b), h(c), h(n1), h(n2), h(-n1 - n2));
            CHECK(s == doctest::Approx(m1 == n1 && m2 == n2 ? 1.0 : 0.0).epsilon(1e-13).scale(1.0));
          }
  }

  TEST_CASE("orthogonality sum over ground projections") {
    // J_g = 1/2, J_e = J_e' = 1/2, M_e = M_e' = 1/2 -> 1/(2 J_e + 1) = 1/2
    CHECK(xdamp::orthogonality_sum(h(1), h(1), h(1), h(1), h(1)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(xdamp::orthogonality_sum(h(1), h(3), h(3), h(-1), h(-1)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::fabs(xdamp::orthogonality_sum(h(1), h(1), h(3), h(1), h(1))) < 1e-15);
    CHECK(std::fabs(xdamp::orthogonality_sum(h(3), h(3), h(3), h(1), h(-1))) < 1e-15);
  }

  TEST_CASE("Clebsch-Gordan reference values") {
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(xdamp::clebsch_gordan(h(1), h(1), h(1), h(-1), h(2), h(0)) == doctest::Approx(s).epsilon(1e-15));
    CHECK(xdamp::clebsch_gordan(h(1), h(1), h(1), h(-1), h(0), h(0)) == doctest::Approx(s).epsilon(1e-15));
    CHECK(xdamp::clebsch_gordan(h(1), h(-1), h(1), h(1), h(0), h(0)) == doctest::Approx(-s).epsilon(1e-15));
    CHECK(xdamp::clebsch_gordan(h(2), h(2), h(1), h(-1), h(3), h(1)) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
  }

  TEST_CASE("half-integer arithmetic is exact") {
    const auto j = xdamp::HalfInt::half(3);
    CHECK(j.value() == 1.5);
    CHECK((j + xdamp::HalfInt::half(1)).is_integer());
    CHECK(j.str() == "3/2");
    CHECK(xdamp::valid_projection(j, xdamp::HalfInt::half(-3)));
    CHECK_FALSE(xdamp::valid_projection(j, xdamp::HalfInt::integer(1)));
    CHECK(xdamp::triangle(j, xdamp::HalfInt::integer(1), xdamp::HalfInt::half(1)));
    CHECK_FALSE(xdamp::triangle(j, xdamp::HalfInt::integer(1), xdamp::HalfInt::half(7)));
  }
}
