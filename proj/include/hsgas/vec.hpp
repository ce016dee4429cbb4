#pragma once

// Small fixed-capacity vector for phase-space coordinates in d = 1, 2 or 3.
// Unused components are kept at zero so d-agnostic loops over all three
// components stay correct.

#include <array>
#include <cmath>
#include <cstddef>

namespace hsgas {

using Vec = std::array<double, 3>;

inline constexpr Vec vec0() { return {0.0, 0.0, 0.0}; }

inline Vec operator+(const Vec& a, const Vec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec operator-(const Vec& a, const Vec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec operator*(double s, const Vec& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline Vec operator-(const Vec& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec& operator+=(Vec& a, const Vec& b) {
  a[0] += b[0]; a[1] += b[1]; a[2] += b[2];
  return a;
}
inline Vec& operator-=(Vec& a, const Vec& b) {
  a[0] -= b[0]; a[1] -= b[1]; a[2] -= b[2];
  return a;
}

inline double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline bool finite(const Vec& a) {
  return std::isfinite(a[0]) && std::isfinite(a[1]) && std::isfinite(a[2]);
}

}  // namespace hsgas
