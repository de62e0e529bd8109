#pragma once

#include <cmath>
#include <random>

#include "choquard/functionals.hpp"

namespace choquard::testing {

// Positive sum of three Gaussian bumps, centred within the inner quarter of the box.
inline Field random_bumps(const Grid& g, std::mt19937_64& rng) {
  const double L = g.half_length();
  std::uniform_real_distribution<double> centre(-L / 8.0, L / 8.0);
  std::uniform_real_distribution<double> width(L / 40.0, L / 10.0);
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  struct Bump {
    std::array<double, 3> x0;
    double w, a;
  };
  std::vector<Bump> bumps(3);
  for (auto& b : bumps) {
    for (int k = 0; k < 3; ++k) b.x0[k] = k < g.dim() ? centre(rng) : 0.0;
    b.w = width(rng);
    b.a = amp(rng);
  }
  return sample(g, [&](const std::array<double, 3>& x) {
    double v = 0.0;
    for (const auto& b : bumps) {
      double r2 = 0.0;
      for (int k = 0; k < g.dim(); ++k) r2 += (x[k] - b.x0[k]) * (x[k] - b.x0[k]);
      v += b.a * std::exp(-r2 / (2.0 * b.w * b.w));
    }
    return v;
  });
}

inline Field gaussian(const Grid& g, double w, double shift = 0.0) {
  return sample(g, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int k = 0; k < g.dim(); ++k) r2 += (x[k] - shift) * (x[k] - shift);
    return std::exp(-r2 / (2.0 * w * w));
  });
}

// Sign changes of fiber_d1 on a uniform scan of [-T, T].
inline int dense_root_count(const MomentTriple& m, const ProblemParams& pr, double T, int points) {
  int count = 0;
  double prev = fiber_d1(m, -T, pr);
  for (int i = 1; i < points; ++i) {
    const double t = -T + 2.0 * T * i / (points - 1);
    const double v = fiber_d1(m, t, pr);
    if ((prev < 0.0) != (v < 0.0)) ++count;
    prev = v;
  }
  return count;
}

inline double max_abs(const Field& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

inline double min_value(const Field& u) {
  double m = INFINITY;
  for (double v : u.values) m = std::min(m, v);
  return m;
}

}  // namespace choquard::testing
