#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace ksgas {

// Points live in R^nu with nu in {1,2,3}; unused components stay zero so the
// same arithmetic works for every dimension.
using Vec = std::array<double, 3>;
using Config = std::vector<Vec>;

inline Vec vec1(double x) { return {x, 0.0, 0.0}; }
inline Vec vec2(double x, double y) { return {x, y, 0.0}; }
inline Vec vec3(double x, double y, double z) { return {x, y, z}; }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Memoisation grid: configurations are snapped to multiples of this before
// evaluation, so translated inputs reproduce results bit for bit.
inline constexpr double kPositionQuantum = 1e-9;

inline double quantize(double x) {
  return std::round(x / kPositionQuantum) * kPositionQuantum;
}

inline std::int64_t quantize_ticks(double x) {
  return static_cast<std::int64_t>(std::llround(x / kPositionQuantum));
}

// Canonical form of a configuration under the symmetries of the correlation
// functions: permutation of points, translation, and (for nu == 1) reflection.
// The first point is moved to the origin and all coordinates are quantized.
inline Config canonical_config(const Config& pts, int nu) {
  Config c = pts;
  std::sort(c.begin(), c.end());
  const Vec origin = c.front();
  for (auto& p : c) p = p - origin;
  if (nu == 1) {
    Config r;
    r.reserve(c.size());
    const double span = c.back()[0];
    for (auto it = c.rbegin(); it != c.rend(); ++it) r.push_back(vec1(span - (*it)[0]));
    if (r < c) c = std::move(r);
  }
  for (auto& p : c)
    for (double& x : p) x = quantize(x);
  return c;
}

}  // namespace ksgas
