#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kr/errors.hpp"
#include "kr/scalar_field.hpp"

namespace kr::testing {

// Concave bump peaking at (cx, cy) over a deep frame. The sqrt(2) weight keeps
// link neighbours from tying.
inline ScalarField bump_disk(int w = 12, int h = 12, int cx = 6, int cy = 6, double peak = 200.0) {
  std::vector<double> v(static_cast<std::size_t>(w * h), -1e5);
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      double dx = x - cx, dy = y - cy;
      v[static_cast<std::size_t>(y * w + x)] = peak - dx * dx - std::sqrt(2.0) * dy * dy;
    }
  return ScalarField(DomainKind::Disk, w, h, std::move(v));
}

// Code of the kr::Error thrown by fn, or "" if nothing was thrown.
template <class F>
std::string error_code(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace kr::testing
