#pragma once

// Stochastic particle solver for the hard-sphere collisional kinetic
// equation: free streaming plus a no-time-counter majorant collision step,
// with optional initial-correlation weights and contact-offset pairing.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hsgas/collision.hpp"
#include "hsgas/rng.hpp"
#include "hsgas/sampling.hpp"
#include "hsgas/system.hpp"

namespace hsgas {

// Empirical-measure representation of a one-particle density: samples of
// equal statistical weight on a periodic box with a uniform cell grid.
struct KineticEnsemble {
  BoxSpec box;
  double sigma = 0.0;       // effective diameter entering the collision kernel
  double weight = 1.0;      // physical number represented by each sample
  std::vector<PhasePoint> samples;
  double time = 0.0;
  int cells_per_axis = 1;
  long long step_index = 0;  // collision steps taken, keys the rng substreams
  long long collisions = 0;

  void validate() const {
    if (box.boundary != Boundary::periodic)
      throw std::invalid_argument("KineticEnsemble: box must be periodic");
    if (box.dim < 2 || box.dim > 3)
      throw std::invalid_argument("KineticEnsemble: dim must be 2 or 3");
    if (!(sigma > 0.0) || !(weight > 0.0) || cells_per_axis < 1)
      throw std::invalid_argument("KineticEnsemble: bad parameters");
    for (const auto& s : samples)
      if (!finite(s.q) || !finite(s.p)) throw std::invalid_argument("KineticEnsemble: non-finite sample");
  }

  int n_cells() const {
    int n = 1;
    for (int k = 0; k < box.dim; ++k) n *= cells_per_axis;
    return n;
  }

  double cell_volume() const { return box.volume() / n_cells(); }

  int cell_of(const Vec& q) const {
    int idx = 0;
    for (int k = 0; k < box.dim; ++k) {
      double x = q[k] / box.edge[k] * cells_per_axis;
      int b = std::min(cells_per_axis - 1, std::max(0, static_cast<int>(std::floor(x))));
      idx = idx * cells_per_axis + b;
    }
    return idx;
  }
};

enum class CollideMode { boltzmann, initial_correlations, enskog_offset };

struct CollideOptions {
  CollideMode mode = CollideMode::boltzmann;
  PairCorrelation g2;        // initial_correlations mode
  double shell_width = 0.1;  // enskog_offset: partner separation in [sigma, (1+w) sigma]
};

inline KineticEnsemble dsmc_stream(const KineticEnsemble& ens, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dsmc_stream: dt must be positive");
  KineticEnsemble out = ens;
  for (auto& s : out.samples) s.q = out.box.wrap(s.q + dt * s.p);
  out.time += dt;
  return out;
}

namespace detail {

inline Vec hemisphere_eta(const Vec& dp, int dim, RngStream& rng) {
  Vec eta{0.0, 0.0, 0.0};
  if (dim == 2) {
    double th = rng.uniform(0.0, 2.0 * M_PI);
    eta = {std::cos(th), std::sin(th), 0.0};
  } else {
    double z = rng.uniform(-1.0, 1.0);
    double th = rng.uniform(0.0, 2.0 * M_PI);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    eta = {r * std::cos(th), r * std::sin(th), z};
  }
  if (dot(eta, dp) < 0.0) eta = -1.0 * eta;  // reflect into the approach hemisphere
  return eta;
}

}  // namespace detail

// No-time-counter collision step.  Candidate pairs per cell are drawn from a
// majorant rate built on 1.5x the largest possible relative speed in the
// cell; acceptance is proportional to the projected relative momentum.
inline KineticEnsemble dsmc_collide(const KineticEnsemble& ens, double dt,
                                    const CollideOptions& opt, RngStream& rng) {
  ens.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dsmc_collide: dt must be positive");
  KineticEnsemble out = ens;
  const int d = out.box.dim;
  const double hemi_area = d == 3 ? 2.0 * M_PI : M_PI;
  const double vc = out.cell_volume();

  double g2_max = 1.0;
  if (opt.mode == CollideMode::initial_correlations) {
    opt.g2.validate();
    for (double g : opt.g2.g) g2_max = std::max(g2_max, g);
  }

  std::vector<std::vector<int>> members(out.n_cells());
  for (int i = 0; i < static_cast<int>(out.samples.size()); ++i)
    members[out.cell_of(out.samples[i].q)].push_back(i);

  RngStream step_rng = rng.sub("collide").sub(static_cast<std::uint64_t>(out.step_index));
  for (int c = 0; c < out.n_cells(); ++c) {
    auto& idx = members[c];
    const int nc = static_cast<int>(idx.size());
    if (nc < 2) continue;
    RngStream cr = step_rng.sub(static_cast<std::uint64_t>(c));
    // Majorant on the relative speed: sum of the two largest speeds, padded.
    double s1 = 0.0, s2 = 0.0;
    for (int i : idx) {
      double s = norm(out.samples[i].p);
      if (s > s1) {
        s2 = s1;
        s1 = s;
      } else if (s > s2) {
        s2 = s;
      }
    }
    const double bmax = 1.5 * (s1 + s2);
    if (bmax <= 0.0) continue;
    const double pair_rate = out.weight * std::pow(out.sigma, d - 1) * hemi_area * bmax / vc;
    if (pair_rate * dt >= 1.0)
      throw std::runtime_error("dsmc_collide: majorant exceeds one collision per pair, dt too large");
    const double expected = 0.5 * nc * (nc - 1) * pair_rate * dt;
    const long long n_cand = static_cast<long long>(std::floor(expected + cr.next_double()));
    for (long long t = 0; t < n_cand; ++t) {
      int a = static_cast<int>(cr.next_below(nc));
      int b = static_cast<int>(cr.next_below(nc - 1));
      if (b >= a) ++b;
      PhasePoint& p1 = out.samples[idx[a]];
      PhasePoint& p2 = out.samples[idx[b]];
      if (opt.mode == CollideMode::enskog_offset) {
        Vec sep = minimum_image_displacement(p2.q, p1.q, out.box);
        double r = norm(sep);
        if (r < out.sigma || r > (1.0 + opt.shell_width) * out.sigma) continue;
      }
      Vec dp = p1.p - p2.p;
      Vec eta = detail::hemisphere_eta(dp, d, cr);
      double flux = dot(eta, dp);
      double accept = flux / bmax;
      if (opt.mode == CollideMode::initial_correlations) {
        auto post = elastic_collision_t<double>({p1.p[0], p1.p[1], p1.p[2]},
                                                {p2.p[0], p2.p[1], p2.p[2]},
                                                {eta[0], eta[1], eta[2]});
        Vec post_dp{post.first[0] - post.second[0], post.first[1] - post.second[1],
                    post.first[2] - post.second[2]};
        accept *= opt.g2(out.time * norm(post_dp)) / g2_max;
      }
      if (accept > 1.0)
        throw std::runtime_error("dsmc_collide: acceptance weight exceeds majorant");
      if (cr.next_double() < accept) {
        auto res = apply_elastic_collision(p1.p, p2.p, eta);
        p1.p = res.p1;
        p2.p = res.p2;
        ++out.collisions;
      }
    }
  }
  ++out.step_index;
  return out;
}

struct HEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Entropy-type functional of a density table: sum of f log f times the cell
// volume, with a Poisson-sampling error estimate when a sample count is given.
inline HEstimate h_functional_of_table(const std::vector<double>& density, double cell_volume,
                                       long long n_samples = 0) {
  if (density.empty()) throw std::invalid_argument("h_functional: empty input");
  HEstimate h;
  double var = 0.0;
  for (double f : density) {
    if (f < 0.0) throw std::invalid_argument("h_functional: negative density");
    if (f == 0.0) continue;
    h.value += f * std::log(f) * cell_volume;
    if (n_samples > 0) {
      double var_f = f / (n_samples * cell_volume);
      double dldf = std::log(f) + 1.0;
      var += dldf * dldf * var_f * cell_volume * cell_volume;
    }
  }
  h.std_error = std::sqrt(var);
  return h;
}

// H functional of the ensemble's momentum distribution on a uniform d-cube
// momentum grid, normalized to unit mass.
inline HEstimate h_functional(const KineticEnsemble& ens, double p_max, int bins_per_axis) {
  ens.validate();
  if (ens.samples.empty()) throw std::invalid_argument("h_functional: empty ensemble");
  const int d = ens.box.dim;
  std::size_t n_cells = 1;
  for (int k = 0; k < d; ++k) n_cells *= bins_per_axis;
  std::vector<double> counts(n_cells, 0.0);
  long long in_window = 0;
  for (const auto& s : ens.samples) {
    std::size_t idx = 0;
    bool ok = true;
    for (int k = 0; k < d; ++k) {
      int b = static_cast<int>(std::floor((s.p[k] + p_max) / (2.0 * p_max) * bins_per_axis));
      if (b < 0 || b >= bins_per_axis) {
        ok = false;
        break;
      }
      idx = idx * bins_per_axis + b;
    }
    if (!ok) continue;
    counts[idx] += 1.0;
    ++in_window;
  }
  if (in_window == 0) throw std::runtime_error("h_functional: no samples inside momentum window");
  const double cell_vol = std::pow(2.0 * p_max / bins_per_axis, d);
  for (auto& c : counts) c /= in_window * cell_vol;
  return h_functional_of_table(counts, cell_vol, in_window);
}

}  // namespace hsgas
