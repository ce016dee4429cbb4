#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hsgas/box.hpp"
#include "hsgas/vec.hpp"

namespace hsgas {

// One particle's position and momentum (unit mass, so p == velocity).
struct PhasePoint {
  Vec q = vec0();
  Vec p = vec0();
};

// A full N-particle microstate: diameter, box, particle list, clock.
struct HardSphereSystem {
  double sigma = 0.0;
  std::vector<PhasePoint> particles;
  BoxSpec box;
  double time = 0.0;

  HardSphereSystem() = default;
  HardSphereSystem(double sig, std::vector<PhasePoint> pts, BoxSpec b, double t = 0.0)
      : sigma(sig), particles(std::move(pts)), box(std::move(b)), time(t) {
    if (sigma < 0.0) throw std::invalid_argument("HardSphereSystem: sigma must be >= 0");
    if (box.boundary == Boundary::periodic && sigma > 0.0) {
      for (int k = 0; k < box.dim; ++k)
        if (!(box.edge[k] > 2.0 * sigma))
          throw std::invalid_argument("HardSphereSystem: periodic edge must exceed 2*sigma");
    }
  }

  std::size_t size() const { return particles.size(); }
};

// One point of a fixed-mean-free-path scaling sequence.
struct ScalingPoint {
  std::size_t n_particles = 1;
  double sigma = 0.0;
  double epsilon = 1.0;  // diameter / mean free path
};

// Checks that within a sequence N * sigma^(d-1) is constant to 1e-12 relative.
inline bool scaling_sequence_consistent(const std::vector<ScalingPoint>& pts, int dim) {
  if (pts.size() < 2) return true;
  auto inv = [dim](const ScalingPoint& s) {
    double v = static_cast<double>(s.n_particles);
    for (int k = 0; k < dim - 1; ++k) v *= s.sigma;
    return v;
  };
  const double ref = inv(pts.front());
  for (const auto& s : pts)
    if (std::abs(inv(s) - ref) > 1e-12 * std::abs(ref)) return false;
  return true;
}

// True iff every distinct pair has minimum-image separation >= sigma, with
// absolute slack 1e-12*sigma for post-collision contact states.
inline bool is_allowed_configuration(const HardSphereSystem& sys) {
  const double lim = sys.sigma * (1.0 - 1e-12);
  const double lim2 = lim * lim;
  const std::size_t n = sys.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec d = minimum_image_displacement(sys.particles[i].q, sys.particles[j].q, sys.box);
      if (norm2(d) < lim2) return false;
    }
  return true;
}

// (total momentum, total kinetic energy).
inline std::pair<Vec, double> conserved_quantities(const HardSphereSystem& sys) {
  Vec mom = vec0();
  double en = 0.0;
  for (const auto& pt : sys.particles) {
    mom += pt.p;
    en += 0.5 * norm2(pt.p);
  }
  return {mom, en};
}

}  // namespace hsgas
