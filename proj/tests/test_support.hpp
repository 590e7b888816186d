#pragma once

#include <cmath>
#include <random>

#include "ffp/grid.hpp"

namespace ffp::testing {

inline ScalarField random_field(Grid2D g, std::mt19937& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ScalarField f(g);
  for (auto& v : f) v = d(rng);
  return f;
}

/// Sum of a few low-frequency cosines, rescaled to [lo, hi].
inline ScalarField smooth_field(Grid2D g, std::mt19937& rng, double lo, double hi, int terms = 3) {
  std::uniform_real_distribution<double> freq(0.02, 0.12), phase(0.0, 6.283185307179586), amp(0.5, 1.0);
  ScalarField f(g, 0.0);
  for (int t = 0; t < terms; ++t) {
    const double fx = freq(rng), fy = freq(rng), ph = phase(rng), a = amp(rng);
    for (int y = 0; y < g.height(); ++y) {
      for (int x = 0; x < g.width(); ++x) f(x, y) += a * std::cos(fx * x + fy * y + ph);
    }
  }
  double mn = f[0], mx = f[0];
  for (const double v : f) mn = std::min(mn, v), mx = std::max(mx, v);
  for (auto& v : f) v = lo + (hi - lo) * (mx > mn ? (v - mn) / (mx - mn) : 0.0);
  return f;
}

/// Unit vectors at smoothly varying angles.
inline VectorField2 smooth_unit_field(Grid2D g, std::mt19937& rng) {
  const ScalarField theta = smooth_field(g, rng, 0.0, 6.283185307179586);
  VectorField2 v(g);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {std::cos(theta[i]), std::sin(theta[i])};
  return v;
}

inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace ffp::testing
