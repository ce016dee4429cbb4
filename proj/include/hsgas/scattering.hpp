#pragma once

// Pointwise evaluation of two- and three-body scattering operators and
// their partition-alternating combinations: backward interacting flow for
// time t composed with forward free flight for time t, applied to a
// factorized test function.

#include <functional>
#include <stdexcept>
#include <vector>

#include "hsgas/event_driven.hpp"
#include "hsgas/partition.hpp"
#include "hsgas/system.hpp"

namespace hsgas {

using TestFunction = std::function<double(const PhasePoint&)>;

namespace detail {

// Coordinates of the given subset after backward hard-sphere flow for time t
// followed by forward free flight for time t, the subset evolving alone in
// open space.
inline std::vector<PhasePoint> scattering_flow(double t, const std::vector<PhasePoint>& pts,
                                               double sigma) {
  // One particle: backward free + forward free is the identity.
  if (pts.size() < 2 || sigma <= 0.0 || t == 0.0) return pts;
  double span = 0.0;
  for (const auto& pt : pts) span = std::max({span, std::abs(pt.q[0]), std::abs(pt.q[1]),
                                              std::abs(pt.q[2]), 1.0});
  span += 10.0 * sigma;
  for (const auto& pt : pts) span += std::abs(t) * norm(pt.p);
  // Open box large enough that boundaries never matter.
  BoxSpec box(3, {4.0 * span, 4.0 * span, 4.0 * span}, Boundary::open);
  std::vector<PhasePoint> shifted = pts;
  HardSphereSystem sys(sigma, shifted, box, 0.0);
  HardSphereSystem back = evolve_to(sys, -t);  // backward interacting flow
  std::vector<PhasePoint> out = back.particles;
  for (auto& pt : out) pt.q += t * pt.p;  // forward free flight
  return out;
}

inline double product_of(const TestFunction& phi, const std::vector<PhasePoint>& pts) {
  double v = 1.0;
  for (const auto& pt : pts) v *= phi(pt);
  return v;
}

}  // namespace detail

struct ScatteringResult {
  double scattering = 0.0;  // product of phi over scattering-flow coordinates
  double cumulant = 0.0;    // partition-alternating combination
};

// For n = 2: cumulant = S-value - prod phi(x_i) (one-body scattering is the
// identity).  For n = 3: full alternating sum over the 5 partitions, each
// block evolved alone.
inline ScatteringResult scattering_apply(double t, const std::vector<PhasePoint>& points,
                                         double sigma, const TestFunction& phi) {
  const int n = static_cast<int>(points.size());
  if (n < 2 || n > 3)
    throw std::invalid_argument("scattering_apply: supports 2 or 3 particles");

  auto block_value = [&](const std::vector<int>& blk) {
    std::vector<PhasePoint> sub;
    sub.reserve(blk.size());
    for (int idx : blk) sub.push_back(points[idx]);
    return detail::product_of(phi, detail::scattering_flow(t, sub, sigma));
  };

  ScatteringResult res;
  res.scattering = detail::product_of(phi, detail::scattering_flow(t, points, sigma));
  double acc = 0.0;
  enumerate_set_partitions(n, [&](const SetPartition& p) {
    double w = static_cast<double>(mobius_weight(p).convert_to<long long>());
    double prod = 1.0;
    for (const auto& blk : p.blocks) prod *= block_value(blk);
    acc += w * prod;
  });
  res.cumulant = acc;
  return res;
}

}  // namespace hsgas
