#pragma once

#include <stdexcept>

#include "hsgas/vec.hpp"

namespace hsgas {

enum class Boundary { periodic, open };

// Simulation domain: d-dimensional rectangular box, periodic or open.
struct BoxSpec {
  int dim = 3;
  Vec edge = {1.0, 1.0, 1.0};  // lengths of the first `dim` axes
  Boundary boundary = Boundary::periodic;

  BoxSpec() = default;
  BoxSpec(int d, const Vec& lengths, Boundary b) : dim(d), edge(lengths), boundary(b) {
    if (d < 1 || d > 3) throw std::invalid_argument("BoxSpec: dimension must be 1, 2 or 3");
    for (int k = 0; k < d; ++k)
      if (!(edge[k] > 0.0)) throw std::invalid_argument("BoxSpec: edge lengths must be positive");
    for (int k = d; k < 3; ++k) edge[k] = 0.0;
  }

  static BoxSpec cubic(int d, double length, Boundary b = Boundary::periodic) {
    Vec e = vec0();
    for (int k = 0; k < d; ++k) e[k] = length;
    return BoxSpec(d, e, b);
  }

  double volume() const {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= edge[k];
    return v;
  }

  // Wrap a position into [0, L_k) on each periodic axis.
  Vec wrap(Vec q) const {
    if (boundary != Boundary::periodic) return q;
    for (int k = 0; k < dim; ++k) {
      const double L = edge[k];
      q[k] -= L * std::floor(q[k] / L);
      if (q[k] >= L) q[k] -= L;  // guard against q/L rounding up
    }
    return q;
  }
};

// b - a with each periodic component reduced to [-L/2, L/2).
inline Vec minimum_image_displacement(const Vec& a, const Vec& b, const BoxSpec& box) {
  Vec d = b - a;
  if (box.boundary == Boundary::periodic) {
    for (int k = 0; k < box.dim; ++k) {
      const double L = box.edge[k];
      d[k] -= L * std::floor(d[k] / L + 0.5);
      if (d[k] >= 0.5 * L) d[k] -= L;
      if (d[k] < -0.5 * L) d[k] += L;
    }
  }
  return d;
}

}  // namespace hsgas
