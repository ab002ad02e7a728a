#pragma once

#include <compare>
#include <cstdlib>
#include <string>

namespace xdamp {

/// Angular-momentum quantum number stored as twice its value, so that
/// half-integral j and m are represented exactly.
class HalfInt {
 public:
  constexpr HalfInt() = default;

  static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
  static constexpr HalfInt integer(int value) { return HalfInt(2 * value); }
  static constexpr HalfInt half(int numerator) { return HalfInt(numerator); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return HalfInt(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
  constexpr HalfInt& operator+=(HalfInt o) {
    twice_ += o.twice_;
    return *this;
  }

  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string str() const {
    return is_integer() ? std::to_string(twice_ / 2) : std::to_string(twice_) + "/2";
  }

 private:
  constexpr explicit HalfInt(int twice) : twice_(twice) {}
  int twice_ = 0;
};

/// True when m is a valid projection of j: |m| <= j and j - m integral.
constexpr bool valid_projection(HalfInt j, HalfInt m) {
  return j.twice() >= 0 && std::abs(m.twice()) <= j.twice() &&
         (j.twice() - m.twice()) % 2 == 0;
}

/// Triangle rule for coupling j1 and j2 to j3.
constexpr bool triangle(HalfInt j1, HalfInt j2, HalfInt j3) {
  const int a = j1.twice(), b = j2.twice(), c = j3.twice();
  return a >= 0 && b >= 0 && c >= 0 && c <= a + b && c >= std::abs(a - b) &&
         (a + b + c) % 2 == 0;
}

/// (-1)^k for an integer-valued HalfInt.
constexpr int phase(HalfInt k) { return ((k.twice() / 2) % 2 == 0) ? 1 : -1; }

}  // namespace xdamp
