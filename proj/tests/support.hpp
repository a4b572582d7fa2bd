#pragma once

// Fixtures shared by the unit tests and the acceptance runner.

#include "sbam/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace sbam::testing {

struct PiecewiseSignal {
  std::vector<Sample> samples;
  std::vector<std::size_t> corners;  // sample indices, endpoints included
};

/// Noise-free piecewise-linear signal on [0, 1] with `pieces` segments, corners on sample
/// indices. Every piece spans at least a tenth of the samples and every interior corner
/// deviates from the chord of its neighbors by at least a third of the value range, so
/// each corner is well above the default area threshold.
inline PiecewiseSignal random_piecewise(std::mt19937_64& rng, int pieces, std::size_t n) {
  std::uniform_real_distribution<double> value(-100.0, 100.0);
  PiecewiseSignal sig;
  const std::size_t min_len = n / 10;
  for (;;) {
    std::vector<std::size_t> c{0, n - 1};
    std::uniform_int_distribution<std::size_t> pos(min_len, n - 1 - min_len);
    while (c.size() < static_cast<std::size_t>(pieces) + 1) c.push_back(pos(rng));
    std::sort(c.begin(), c.end());
    bool ok = std::adjacent_find(c.begin(), c.end(), [&](auto a, auto b) { return b - a < min_len; }) == c.end();
    if (!ok) continue;
    std::vector<double> v;
    for (std::size_t k = 0; k < c.size(); ++k) v.push_back(value(rng));
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double amp = *hi - *lo;
    for (std::size_t k = 1; k + 1 < c.size() && ok; ++k) {
      const double u = static_cast<double>(c[k] - c[k - 1]) / static_cast<double>(c[k + 1] - c[k - 1]);
      ok = std::abs(v[k] - (v[k - 1] + u * (v[k + 1] - v[k - 1]))) >= amp / 3.0;
    }
    if (!ok || !(amp > 0.0)) continue;
    sig.corners = c;
    sig.samples.resize(n);
    for (std::size_t k = 0; k + 1 < c.size(); ++k)
      for (std::size_t m = c[k]; m <= c[k + 1]; ++m) {
        const double u = static_cast<double>(m - c[k]) / static_cast<double>(c[k + 1] - c[k]);
        sig.samples[m] = {static_cast<double>(m) / static_cast<double>(n - 1), v[k] + u * (v[k + 1] - v[k])};
      }
    return sig;
  }
}

/// Every true corner has a breakpoint within `tol` samples and vice versa.
inline bool corners_recovered(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& found,
                              std::size_t tol = 1) {
  auto near = [tol](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
    for (std::size_t a : from) {
      bool hit = false;
      for (std::size_t b : to) hit = hit || (a > b ? a - b : b - a) <= tol;
      if (!hit) return false;
    }
    return true;
  };
  return near(truth, found) && near(found, truth);
}

}  // namespace sbam::testing
