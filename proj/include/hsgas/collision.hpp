#pragma once

// Two-body collision maps.  The elastic map is templated on the scalar type:
// the double instantiation is the production path, and exact rational
// instantiations are used by tests to certify conservation and involution
// identities that floating-point rounding cannot express bitwise.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "hsgas/box.hpp"
#include "hsgas/system.hpp"
#include "hsgas/vec.hpp"

namespace hsgas {

// Restitution coefficient e in (0, 1]; eps_r = (1 - e)/2 in [0, 1/2).
struct Restitution {
  double e = 1.0;

  explicit Restitution(double coeff) : e(coeff) {
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("Restitution: e must lie in (0, 1]");
  }
  double eps_r() const { return (1.0 - e) / 2.0; }
};

template <class T>
using Vec3T = std::array<T, 3>;

template <class T>
T dot3(const Vec3T<T>& a, const Vec3T<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Elastic exchange of the normal momentum component:
//   p1' = p1 - eta <eta, p1 - p2> / <eta, eta>
//   p2' = p2 + eta <eta, p1 - p2> / <eta, eta>
// The <eta,eta> division makes the map an exact involution for any nonzero
// impact vector, which exact-scalar instantiations rely on.
template <class T>
std::pair<Vec3T<T>, Vec3T<T>> elastic_collision_t(const Vec3T<T>& p1, const Vec3T<T>& p2,
                                                  const Vec3T<T>& eta) {
  const Vec3T<T> g = {p1[0] - p2[0], p1[1] - p2[1], p1[2] - p2[2]};
  const T gamma = dot3(eta, g) / dot3(eta, eta);
  Vec3T<T> q1 = p1, q2 = p2;
  for (int c = 0; c < 3; ++c) {
    const T j = eta[c] * gamma;
    q1[c] = p1[c] - j;
    q2[c] = p2[c] + j;
  }
  return {q1, q2};
}

struct ElasticResult {
  Vec p1, p2;
  Vec impulse;  // applied to particle 2; particle 1 receives the exact negative
};

inline ElasticResult apply_elastic_collision(const Vec& p1, const Vec& p2, const Vec& eta) {
  const double n2 = norm2(eta);
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-9)
    throw std::invalid_argument("apply_elastic_collision: impact vector must be unit length");
  const Vec g = p1 - p2;
  const double gamma = dot(eta, g) / n2;
  const Vec j = gamma * eta;
  return {p1 - j, p2 + j, j};
}

// 1D inelastic forward rule:
//   p1' = eps_r p1 + (1 - eps_r) p2,  p2' = (1 - eps_r) p1 + eps_r p2.
// Momentum is conserved, the post relative velocity is -e times the pre one,
// and composing with the inverse (pre-collision) map is the identity.
template <class T>
std::pair<T, T> inelastic_collision_1d_t(const T& p1, const T& p2, const T& eps_r) {
  const T one = T(1);
  return {eps_r * p1 + (one - eps_r) * p2, (one - eps_r) * p1 + eps_r * p2};
}

inline std::pair<double, double> apply_inelastic_collision_1d(double p1, double p2,
                                                              const Restitution& r) {
  if (r.e == 1.0) return {p2, p1};  // elastic 1D rods exchange velocities exactly
  return inelastic_collision_1d_t<double>(p1, p2, r.eps_r());
}

// Inverse of the forward inelastic rule (the pre-collision map); its
// determinant magnitude is 1/(1 - 2 eps_r) = 1/e.
inline std::pair<double, double> inelastic_precollision_1d(double p1, double p2,
                                                           const Restitution& r) {
  const double eps = r.eps_r();
  const double a = eps / (2.0 * eps - 1.0);
  // p1_pre = p2 + a (p1 - p2), p2_pre = p1 - a (p1 - p2)
  return {p2 + a * (p1 - p2), p1 - a * (p1 - p2)};
}

// Smallest t > 0 with |dq + t dp| = sigma and approach at contact; dq is the
// minimum-image displacement from b to a evaluated at the common time origin.
inline std::optional<double> pair_collision_time(const PhasePoint& a, const PhasePoint& b,
                                                 double sigma, const BoxSpec& box) {
  if (sigma <= 0.0) return std::nullopt;
  const Vec dq = minimum_image_displacement(b.q, a.q, box);
  const Vec dp = a.p - b.p;
  const double bb = dot(dq, dp);
  if (bb >= 0.0) return std::nullopt;  // receding or grazing-parallel
  const double aa = norm2(dp);
  if (aa == 0.0) return std::nullopt;
  const double cc = norm2(dq) - sigma * sigma;
  const double disc = bb * bb - aa * cc;
  if (disc < 0.0) return std::nullopt;
  double t = (-bb - std::sqrt(disc)) / aa;
  if (t < 0.0) {
    // Already touching (post-collision contact state within tolerance): the
    // approach condition was checked above, so treat as immediate contact
    // only when the overlap is within round-off; otherwise no event.
    if (cc > -1e-9 * sigma * sigma) t = 0.0;
    else return std::nullopt;
  }
  return t;
}

}  // namespace hsgas
