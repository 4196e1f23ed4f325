#pragma once

// Low-discrepancy sample points in a chart box, plus seeded directions.

#include <random>

#include "hermlab/charts.hpp"

namespace hermlab {

inline double radical_inverse(std::uint64_t i, int base) {
  double f = 1, r = 0;
  while (i > 0) {
    f /= base;
    r += f * double(i % base);
    i /= base;
  }
  return r;
}

inline int nth_prime(int k) {
  static const int p[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (k < 0 || k >= 16) throw ConfigError("too many Halton dimensions");
  return p[k];
}

// Halton points in `box` with a seeded Cranley-Patterson rotation, kept
// `margin` (fraction of width) away from the box faces.
inline std::vector<ChartPoint> halton_points(const Domain& box, int count, std::uint64_t seed,
                                             double margin = 0.02) {
  int n = int(box.box.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<double> shift(2 * n);
  for (auto& s : shift) s = U(rng);
  std::vector<ChartPoint> out;
  for (int k = 0; k < count; ++k) {
    ChartPoint p = ChartPoint::origin(n);
    for (int i = 0; i < n; ++i) {
      double t[2];
      for (int a = 0; a < 2; ++a) {
        double h = radical_inverse(std::uint64_t(k) + 1, nth_prime(2 * i + a)) + shift[2 * i + a];
        h -= std::floor(h);
        t[a] = margin + (1 - 2 * margin) * h;
      }
      const auto& b = box.box[i];
      p.z[i] = cplx(b[0] + t[0] * (b[1] - b[0]), b[2] + t[1] * (b[3] - b[2]));
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace hermlab
