#pragma once

#include "xdamp/hydrogen.hpp"

namespace fixtures {

// Default scheme, built once per test process.
inline const xdamp::LevelScheme& scheme() {
  static const xdamp::LevelScheme s = xdamp::build_level_scheme();
  return s;
}

inline xdamp::HalfInt h(int twice) { return xdamp::HalfInt::from_twice(twice); }

}  // namespace fixtures
