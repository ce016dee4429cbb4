#pragma once

// Deterministic 1D granular solvers: the quasi-elastic nonlinear friction
// equation on a (q, p) grid and the leading inelastic collision term on a
// momentum grid.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hsgas/collision.hpp"

namespace hsgas {

// Nonnegative density tabulated on a uniform grid, node-centered in momentum:
// p_j = p_min + j dp.  nq = 1 is the spatially homogeneous mode.
struct GridDensity1D {
  int nq = 1;
  int np = 0;
  double q_len = 1.0;  // periodic spatial period (ignored when nq = 1)
  double p_min = 0.0;
  double dp = 0.0;
  std::vector<double> f;  // row-major, f[i*np + j] = f(q_i, p_j)

  void validate() const {
    if (nq < 1 || np < 2 || !(dp > 0.0) || (nq > 1 && !(q_len > 0.0)))
      throw std::invalid_argument("GridDensity1D: bad grid");
    if (f.size() != static_cast<std::size_t>(nq) * np)
      throw std::invalid_argument("GridDensity1D: value count mismatch");
    for (double v : f)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("GridDensity1D: values must be finite and nonnegative");
  }

  double p_at(int j) const { return p_min + j * dp; }
  double dq() const { return nq > 1 ? q_len / nq : 1.0; }
  double& at(int i, int j) { return f[static_cast<std::size_t>(i) * np + j]; }
  double at(int i, int j) const { return f[static_cast<std::size_t>(i) * np + j]; }

  double mass() const {
    double m = 0.0;
    for (double v : f) m += v;
    return m * dp * dq();
  }

  double momentum() const {
    double m = 0.0;
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < np; ++j) m += p_at(j) * at(i, j);
    return m * dp * dq();
  }

  double energy() const {
    double m = 0.0;
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < np; ++j) m += p_at(j) * p_at(j) * at(i, j);
    return m * dp * dq();
  }

  // Momentum marginal (integrated over q).
  std::vector<double> p_marginal() const {
    std::vector<double> m(np, 0.0);
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < np; ++j) m[j] += at(i, j) * dq();
    return m;
  }

  static GridDensity1D homogeneous(double p_max, int np, const std::vector<double>& values) {
    GridDensity1D g;
    g.np = np;
    g.p_min = -p_max;
    g.dp = 2.0 * p_max / (np - 1);
    g.f = values;
    g.validate();
    return g;
  }
};

namespace detail {

// Friction drift integrand: relative speed times signed separation, oriented
// so the drift pushes momentum toward the bulk mean and energy decays.
inline std::vector<double> friction_drift(const std::vector<double>& marginal,
                                          const GridDensity1D& g, double rate,
                                          const std::vector<double>& p_edges) {
  std::vector<double> J(p_edges.size(), 0.0);
  for (std::size_t e = 0; e < p_edges.size(); ++e) {
    double p = p_edges[e];
    double acc = 0.0;
    for (int k = 0; k < g.np; ++k) {
      double d = p - g.p_at(k);
      acc += std::abs(d) * d * marginal[k];
    }
    J[e] = rate * acc * g.dp;
  }
  return J;
}

}  // namespace detail

struct FrictionStepStats {
  long long clipped_cells = 0;
  double max_clip = 0.0;
};

// One explicit step of df/dt = -p df/dq + d/dp [J f], J the quadratic drift
// kernel scaled by `rate`, conservative upwind fluxes in both variables.
inline GridDensity1D granular_friction_step(const GridDensity1D& g, double dt, double rate = 1.0,
                                            FrictionStepStats* stats = nullptr) {
  g.validate();
  if (!(dt > 0.0) || !(rate >= 0.0))
    throw std::invalid_argument("granular_friction_step: bad dt or rate");
  GridDensity1D out = g;

  if (g.nq > 1) {
    double pmax_abs = std::max(std::abs(g.p_at(0)), std::abs(g.p_at(g.np - 1)));
    if (dt * pmax_abs / g.dq() > 1.0)
      throw std::invalid_argument("granular_friction_step: dt violates the transport CFL bound");
  }

  // Momentum-space drift on interior cell edges p_{j+1/2}, per spatial cell.
  std::vector<double> edges(g.np - 1);
  for (int j = 0; j + 1 < g.np; ++j) edges[j] = g.p_at(j) + 0.5 * g.dp;
  std::vector<double> row(g.np);
  for (int i = 0; i < g.nq; ++i) {
    for (int j = 0; j < g.np; ++j) row[j] = g.at(i, j);
    auto J = detail::friction_drift(row, g, rate, edges);
    double jmax = 0.0;
    for (double v : J) jmax = std::max(jmax, std::abs(v));
    if (dt * jmax / g.dp > 1.0)
      throw std::invalid_argument("granular_friction_step: dt violates the momentum CFL bound");
    // d/dp [J f]: advection with velocity -J, zero flux through the ends.
    for (int j = 0; j < g.np; ++j) {
      double flux_hi = 0.0, flux_lo = 0.0;
      if (j + 1 < g.np) {
        double a = -J[j];
        flux_hi = a > 0.0 ? a * g.at(i, j) : a * g.at(i, j + 1);
      }
      if (j > 0) {
        double a = -J[j - 1];
        flux_lo = a > 0.0 ? a * g.at(i, j - 1) : a * g.at(i, j);
      }
      out.at(i, j) -= dt / g.dp * (flux_hi - flux_lo);
    }
  }

  if (g.nq > 1) {
    GridDensity1D tmp = out;
    for (int i = 0; i < g.nq; ++i) {
      int up = (i - 1 + g.nq) % g.nq;
      int dn = (i + 1) % g.nq;
      for (int j = 0; j < g.np; ++j) {
        double p = g.p_at(j);
        double grad = p > 0.0 ? tmp.at(i, j) - tmp.at(up, j) : tmp.at(dn, j) - tmp.at(i, j);
        out.at(i, j) = tmp.at(i, j) - dt * p / g.dq() * grad;
      }
    }
  }

  double fmax = 0.0;
  for (double v : g.f) fmax = std::max(fmax, v);
  for (double& v : out.f) {
    if (v < 0.0) {
      if (v < -1e-12 * fmax)
        throw std::runtime_error("granular_friction_step: instability, large negative value");
      if (stats) {
        ++stats->clipped_cells;
        stats->max_clip = std::max(stats->max_clip, -v);
      }
      v = 0.0;
    }
  }
  return out;
}

// Analytic energy-decay rate of the friction dynamics for the current state:
// minus the double quadrature of |p1-p| (p1-p)^2 f f, scaled by `rate`.
inline double friction_energy_decay_rate(const GridDensity1D& g, double rate = 1.0) {
  auto m = g.p_marginal();
  double acc = 0.0;
  for (int j = 0; j < g.np; ++j)
    for (int k = 0; k < g.np; ++k) {
      double d = g.p_at(k) - g.p_at(j);
      acc += std::abs(d) * d * d * m[j] * m[k];
    }
  return -rate * acc * g.dp * g.dp;
}

// Leading collision term of the 1D inelastic kinetic equation on a momentum
// grid.  Evaluated in scattering form: every ordered pre-collision pair of
// grid momenta removes loss mass at its own node and deposits the same mass
// at the post-collision momentum with linear node weights.  This is the
// change of variables applied to the gain term written over pre-collision
// momenta with the compression Jacobian, and it makes the mass and momentum
// moments of the output vanish to rounding instead of to quadrature error.
// Identically zero at e = 1, where the collision map only swaps momenta.
inline std::vector<double> granular_boltzmann_rhs(const GridDensity1D& g, const Restitution& r) {
  g.validate();
  if (g.nq != 1) throw std::invalid_argument("granular_boltzmann_rhs: momentum-only grid expected");
  const double eps = r.eps_r();
  std::vector<double> rhs(g.np, 0.0);
  if (eps == 0.0) return rhs;

  double fmax = 0.0;
  for (double v : g.f) fmax = std::max(fmax, v);
  // A density with mass at the window boundary scatters into momenta whose
  // neighborhood the grid cannot represent; demand compact support instead.
  if (g.f.front() > 1e-12 * fmax || g.f.back() > 1e-12 * fmax)
    throw std::runtime_error("granular_boltzmann_rhs: density has mass at the window boundary, "
                             "increase the momentum window");

  for (int ku = 0; ku < g.np; ++ku) {
    if (g.f[ku] == 0.0) continue;
    const double u = g.p_at(ku);
    for (int kv = 0; kv < g.np; ++kv) {
      if (kv == ku || g.f[kv] == 0.0) continue;
      const double v = g.p_at(kv);
      const double loss = g.f[ku] * g.f[kv] * std::abs(u - v) * g.dp;
      rhs[ku] -= loss;
      // Post-collision momentum of the particle that carried u; a convex
      // combination of u and v, so it always stays inside the window.
      const double post = eps * u + (1.0 - eps) * v;
      double x = (post - g.p_min) / g.dp;
      int j0 = std::min(g.np - 2, std::max(0, static_cast<int>(std::floor(x))));
      double t = x - j0;
      rhs[j0] += (1.0 - t) * loss;
      rhs[j0 + 1] += t * loss;
    }
  }
  return rhs;
}

}  // namespace hsgas
