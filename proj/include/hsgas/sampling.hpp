#pragma once

// Construction of initial ensembles: independently placed (chaos) states and
// Markov-chain sampled states carrying a prescribed radial pair correlation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hsgas/rng.hpp"
#include "hsgas/system.hpp"

namespace hsgas {

// Tabulated radial pair-correlation profile: zero below contact, interpolated
// linearly between knots, constant beyond the last knot.
struct PairCorrelation {
  std::vector<double> r;
  std::vector<double> g;
  double sigma = 0.0;

  void validate() const {
    if (r.size() != g.size() || r.size() < 2)
      throw std::invalid_argument("PairCorrelation: need >= 2 tabulated points");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) throw std::invalid_argument("PairCorrelation: radii must increase");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] > sigma && !(g[i] > 0.0))
        throw std::invalid_argument("PairCorrelation: profile must be positive beyond contact");
    }
    if (std::abs(g.back() - 1.0) > 0.01)
      throw std::invalid_argument("PairCorrelation: profile must tend to 1 at large radius");
  }

  double operator()(double rr) const {
    if (rr < sigma) return 0.0;
    if (rr <= r.front()) return g.front();
    if (rr >= r.back()) return g.back();
    std::size_t hi = 1;
    while (r[hi] < rr) ++hi;
    double t = (rr - r[hi - 1]) / (r[hi] - r[hi - 1]);
    return g[hi - 1] + t * (g[hi] - g[hi - 1]);
  }

  static PairCorrelation flat(double sigma) { return {{sigma, 2.0 * sigma + 1.0}, {1.0, 1.0}, sigma}; }
};

enum class InitialMode { chaos, correlated };

struct InitialStateSpec {
  InitialMode mode = InitialMode::chaos;
  double beta = 1.0;  // inverse temperature; momentum std dev is 1/sqrt(beta)
  PairCorrelation g2;  // correlated mode only

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("InitialStateSpec: beta must be positive");
    if (mode == InitialMode::correlated) g2.validate();
  }

  double momentum_window() const { return 5.0 / std::sqrt(beta); }
};

namespace detail {

inline Vec maxwellian_momentum(int dim, double beta, RngStream& rng) {
  Vec p{0.0, 0.0, 0.0};
  const double sd = 1.0 / std::sqrt(beta);
  for (int k = 0; k < dim; ++k) p[k] = sd * rng.next_gaussian();
  return p;
}

inline Vec uniform_position(const BoxSpec& box, RngStream& rng) {
  Vec q{0.0, 0.0, 0.0};
  for (int k = 0; k < box.dim; ++k) q[k] = rng.uniform(0.0, box.edge[k]);
  return q;
}

inline bool clear_of(const Vec& q, const std::vector<PhasePoint>& placed, std::size_t count,
                     double sigma, const BoxSpec& box) {
  if (sigma <= 0.0) return true;
  for (std::size_t j = 0; j < count; ++j) {
    Vec d = minimum_image_displacement(placed[j].q, q, box);
    if (norm2(d) < sigma * sigma) return false;
  }
  return true;
}

inline void check_packing(int N, double sigma, const BoxSpec& box) {
  if (sigma <= 0.0) return;
  static constexpr double kBallVol[4] = {0.0, 1.0, M_PI / 4.0, M_PI / 6.0};
  double packing = N * kBallVol[box.dim] * std::pow(sigma, box.dim) / box.volume();
  if (packing > 0.25) throw std::invalid_argument("sampler: packing fraction exceeds 0.25");
}

}  // namespace detail

inline constexpr int kPlacementRejectionCap = 100000;

inline HardSphereSystem sample_chaos_configuration(const InitialStateSpec& spec, int N,
                                                   double sigma, const BoxSpec& box,
                                                   RngStream& rng) {
  spec.validate();
  if (N < 1) throw std::invalid_argument("sample_chaos_configuration: N must be positive");
  detail::check_packing(N, sigma, box);
  std::vector<PhasePoint> pts(N);
  for (int i = 0; i < N; ++i) {
    int tries = 0;
    for (;;) {
      Vec q = detail::uniform_position(box, rng);
      if (detail::clear_of(q, pts, i, sigma, box)) {
        pts[i].q = q;
        break;
      }
      if (++tries >= kPlacementRejectionCap)
        throw std::runtime_error("sample_chaos_configuration: placement rejection cap hit");
    }
  }
  for (int i = 0; i < N; ++i) pts[i].p = detail::maxwellian_momentum(box.dim, spec.beta, rng);
  return HardSphereSystem(sigma, std::move(pts), box, 0.0);
}

struct CorrelatedSamplerStats {
  long long proposals = 0;
  long long accepted = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / proposals;
  }
};

// Metropolis chain targeting the product of pairwise g2 factors over allowed
// configurations, single-particle moves, burn-in of 100 N accepted moves and
// stride N between emitted states.
class CorrelatedSampler {
 public:
  CorrelatedSampler(InitialStateSpec spec, int N, double sigma, BoxSpec box, RngStream rng)
      : spec_(std::move(spec)), sigma_(sigma), box_(box), rng_(std::move(rng)) {
    spec_.validate();
    if (spec_.mode != InitialMode::correlated)
      throw std::invalid_argument("CorrelatedSampler: spec mode must be correlated");
    detail::check_packing(N, sigma, box_);
    // Initial allowed configuration from independent placement.
    InitialStateSpec chaos = spec_;
    chaos.mode = InitialMode::chaos;
    RngStream init = rng_.sub("init");
    state_ = sample_chaos_configuration(chaos, N, sigma, box_, init);
    step_scale_ = 0.0;
    for (int k = 0; k < box_.dim; ++k) step_scale_ = std::max(step_scale_, box_.edge[k]);
    step_scale_ *= 0.1;
    long long burn = 100LL * N;
    while (stats_.accepted < burn) advance_one();
  }

  HardSphereSystem next() {
    const int N = static_cast<int>(state_.particles.size());
    for (int m = 0; m < N; ++m) advance_one();
    if (stats_.proposals >= 1000) {
      double rate = stats_.acceptance_rate();
      if (rate < 0.05 || rate > 0.95)
        throw std::runtime_error("CorrelatedSampler: acceptance rate outside [0.05, 0.95]");
    }
    HardSphereSystem out = state_;
    RngStream prng = rng_.sub("momenta").sub(emitted_++);
    for (auto& pt : out.particles) pt.p = detail::maxwellian_momentum(box_.dim, spec_.beta, prng);
    return out;
  }

  const CorrelatedSamplerStats& stats() const { return stats_; }

 private:
  bool move_allowed(int i, const Vec& q) const {
    if (sigma_ <= 0.0) return true;
    for (std::size_t j = 0; j < state_.particles.size(); ++j) {
      if (static_cast<int>(j) == i) continue;
      Vec d = minimum_image_displacement(state_.particles[j].q, q, box_);
      if (norm2(d) < sigma_ * sigma_) return false;
    }
    return true;
  }

  double log_weight_of(int i, const Vec& q) const {
    double lw = 0.0;
    for (std::size_t j = 0; j < state_.particles.size(); ++j) {
      if (static_cast<int>(j) == i) continue;
      Vec d = minimum_image_displacement(state_.particles[j].q, q, box_);
      double g = spec_.g2(norm(d));
      if (g <= 0.0) return -std::numeric_limits<double>::infinity();
      lw += std::log(g);
    }
    return lw;
  }

  void advance_one() {
    const int N = static_cast<int>(state_.particles.size());
    int i = static_cast<int>(rng_.next_below(static_cast<std::uint64_t>(N)));
    Vec q = state_.particles[i].q;
    for (int k = 0; k < box_.dim; ++k) q[k] += rng_.uniform(-step_scale_, step_scale_);
    q = box_.wrap(q);
    ++stats_.proposals;
    if (!move_allowed(i, q)) return;
    double dlw = log_weight_of(i, q) - log_weight_of(i, state_.particles[i].q);
    if (dlw >= 0.0 || rng_.next_double() < std::exp(dlw)) {
      state_.particles[i].q = q;
      ++stats_.accepted;
    }
  }

  InitialStateSpec spec_;
  double sigma_;
  BoxSpec box_;
  RngStream rng_;
  HardSphereSystem state_;
  CorrelatedSamplerStats stats_;
  double step_scale_;
  std::uint64_t emitted_ = 0;
};

inline HardSphereSystem sample_correlated_configuration(const InitialStateSpec& spec, int N,
                                                        double sigma, const BoxSpec& box,
                                                        RngStream& rng) {
  CorrelatedSampler chain(spec, N, sigma, box, rng.sub("chain"));
  return chain.next();
}

}  // namespace hsgas
