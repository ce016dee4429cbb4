#pragma once

// Estimation of reduced s-particle densities and correlation functions from
// ensembles of microstates, plus the chaos metric and the dispersion
// functional for additive observables.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "hsgas/graded.hpp"
#include "hsgas/system.hpp"

namespace hsgas {

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 1;
};

// Per-particle binning: one axis per position component and one per momentum
// component.  Axes with a single bin act as marginalizations but still
// contribute their span to the cell volume.
struct BinningSpec {
  int dim = 3;
  std::vector<Axis> q_axes;
  std::vector<Axis> p_axes;

  void validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("BinningSpec: dim must be 1..3");
    if (static_cast<int>(q_axes.size()) != dim || static_cast<int>(p_axes.size()) != dim)
      throw std::invalid_argument("BinningSpec: need one q axis and one p axis per dimension");
    for (const auto& a : q_axes)
      if (!(a.hi > a.lo) || a.bins < 1) throw std::invalid_argument("BinningSpec: bad q axis");
    for (const auto& a : p_axes)
      if (!(a.hi > a.lo) || a.bins < 1) throw std::invalid_argument("BinningSpec: bad p axis");
  }

  // Momentum-marginal binning: bins in p_x only, everything else integrated out.
  static BinningSpec momentum_marginal(const BoxSpec& box, double p_max, int p_bins) {
    BinningSpec b;
    b.dim = box.dim;
    for (int k = 0; k < box.dim; ++k) b.q_axes.push_back({0.0, box.edge[k], 1});
    b.p_axes.push_back({-p_max, p_max, p_bins});
    for (int k = 1; k < box.dim; ++k) b.p_axes.push_back({-p_max, p_max, 1});
    return b;
  }

  int cells_per_particle() const {
    int m = 1;
    for (const auto& a : q_axes) m *= a.bins;
    for (const auto& a : p_axes) m *= a.bins;
    return m;
  }

  double cell_volume() const {
    double v = 1.0;
    for (const auto& a : q_axes) v *= (a.hi - a.lo) / a.bins;
    for (const auto& a : p_axes) v *= (a.hi - a.lo) / a.bins;
    return v;
  }

  // Flat per-particle cell index, or nullopt if the point leaves the window.
  std::optional<int> locate(const PhasePoint& pt, const BoxSpec& box) const {
    int idx = 0;
    for (int k = 0; k < dim; ++k) {
      const Axis& a = q_axes[k];
      double q = box.boundary == Boundary::periodic
                     ? a.lo + std::fmod(std::fmod(pt.q[k] - a.lo, a.hi - a.lo) + (a.hi - a.lo),
                                        a.hi - a.lo)
                     : pt.q[k];
      int b = static_cast<int>(std::floor((q - a.lo) / (a.hi - a.lo) * a.bins));
      if (b < 0 || b >= a.bins) return std::nullopt;
      idx = idx * a.bins + b;
    }
    for (int k = 0; k < dim; ++k) {
      const Axis& a = p_axes[k];
      int b = static_cast<int>(std::floor((pt.p[k] - a.lo) / (a.hi - a.lo) * a.bins));
      if (b < 0 || b >= a.bins) return std::nullopt;
      idx = idx * a.bins + b;
    }
    return idx;
  }
};

// Estimate of the order-s reduced density: symmetrized accumulation of
// ordered s-tuples of distinct particles, falling-factorial normalized so
// the order-1 estimate integrates to 1.
class GradedHistogram {
 public:
  GradedHistogram(int s, BinningSpec binning) : s_(s), binning_(std::move(binning)) {
    if (s_ < 1 || s_ > 3) throw std::invalid_argument("GradedHistogram: order must be 1..3");
    binning_.validate();
    std::size_t n = 1;
    for (int i = 0; i < s_; ++i) n *= static_cast<std::size_t>(binning_.cells_per_particle());
    sum_.assign(n, 0.0);
    sumsq_.assign(n, 0.0);
  }

  int order() const { return s_; }
  const BinningSpec& binning() const { return binning_; }
  std::size_t n_cells() const { return sum_.size(); }
  long long samples() const { return n_samples_; }
  long long out_of_window() const { return out_of_window_; }

  void accumulate(const HardSphereSystem& sys) {
    const int N = static_cast<int>(sys.particles.size());
    if (N < s_) throw std::invalid_argument("GradedHistogram: order exceeds particle count");
    std::vector<int> loc(N, -1);
    for (int i = 0; i < N; ++i) {
      auto c = binning_.locate(sys.particles[i], sys.box);
      if (c)
        loc[i] = *c;
      else
        ++out_of_window_;
    }
    double ff = 1.0;
    for (int k = 0; k < s_; ++k) ff *= static_cast<double>(N - k);
    const double w = 1.0 / (ff * std::pow(binning_.cell_volume(), s_));
    const int M = binning_.cells_per_particle();
    std::vector<double> shot(sum_.size(), 0.0);
    if (s_ == 1) {
      for (int i = 0; i < N; ++i)
        if (loc[i] >= 0) shot[loc[i]] += w;
    } else if (s_ == 2) {
      for (int i = 0; i < N; ++i) {
        if (loc[i] < 0) continue;
        for (int j = 0; j < N; ++j) {
          if (j == i || loc[j] < 0) continue;
          shot[static_cast<std::size_t>(loc[i]) * M + loc[j]] += w;
        }
      }
    } else {
      for (int i = 0; i < N; ++i) {
        if (loc[i] < 0) continue;
        for (int j = 0; j < N; ++j) {
          if (j == i || loc[j] < 0) continue;
          for (int k = 0; k < N; ++k) {
            if (k == i || k == j || loc[k] < 0) continue;
            shot[(static_cast<std::size_t>(loc[i]) * M + loc[j]) * M + loc[k]] += w;
          }
        }
      }
    }
    for (std::size_t c = 0; c < sum_.size(); ++c) {
      sum_[c] += shot[c];
      sumsq_[c] += shot[c] * shot[c];
    }
    ++n_samples_;
  }

  // Normalized density per cell (mean over accumulated snapshots).
  std::vector<double> density() const {
    if (derived_) return *derived_;
    if (n_samples_ == 0) throw std::runtime_error("GradedHistogram: no samples");
    std::vector<double> d(sum_.size());
    for (std::size_t c = 0; c < sum_.size(); ++c) d[c] = sum_[c] / n_samples_;
    return d;
  }

  std::vector<double> std_error() const {
    if (derived_ || n_samples_ < 2) return std::vector<double>(sum_.size(), 0.0);
    std::vector<double> se(sum_.size());
    const double n = static_cast<double>(n_samples_);
    for (std::size_t c = 0; c < sum_.size(); ++c) {
      double mean = sum_[c] / n;
      double var = std::max(0.0, sumsq_[c] / n - mean * mean);
      se[c] = std::sqrt(var / (n - 1.0));
    }
    return se;
  }

  double total_cell_volume() const { return std::pow(binning_.cell_volume(), s_); }

  void merge(const GradedHistogram& other) {
    if (other.s_ != s_ || other.sum_.size() != sum_.size())
      throw std::invalid_argument("GradedHistogram::merge: incompatible binning");
    for (std::size_t c = 0; c < sum_.size(); ++c) {
      sum_[c] += other.sum_[c];
      sumsq_[c] += other.sumsq_[c];
    }
    n_samples_ += other.n_samples_;
    out_of_window_ += other.out_of_window_;
  }

  // A histogram whose density is a precomputed table (used for correlation
  // estimates and synthetic inputs).
  static GradedHistogram from_density(int s, BinningSpec binning, std::vector<double> d) {
    GradedHistogram h(s, std::move(binning));
    if (d.size() != h.sum_.size())
      throw std::invalid_argument("GradedHistogram::from_density: size mismatch");
    h.derived_ = std::move(d);
    return h;
  }

  void export_text(std::ostream& os) const;

 private:
  int s_;
  BinningSpec binning_;
  std::vector<double> sum_, sumsq_;
  long long n_samples_ = 0;
  long long out_of_window_ = 0;
  std::optional<std::vector<double>> derived_;
};

inline GradedHistogram estimate_reduced_density(const std::vector<HardSphereSystem>& snapshots,
                                                int s, const BinningSpec& binning) {
  GradedHistogram h(s, binning);
  for (const auto& sys : snapshots) h.accumulate(sys);
  return h;
}

// Cumulant of the density estimates, cell by cell: order 2 gives
// F2 - F1*F1, order 3 the five-partition alternating sum.
inline GradedHistogram estimate_correlations(const std::vector<GradedHistogram>& F) {
  const int s = static_cast<int>(F.size());
  if (s < 1 || s > 3) throw std::invalid_argument("estimate_correlations: need orders 1..s, s<=3");
  for (int k = 0; k < s; ++k) {
    if (F[k].order() != k + 1) throw std::invalid_argument("estimate_correlations: orders must be 1..s");
    if (F[k].binning().cells_per_particle() != F[0].binning().cells_per_particle())
      throw std::invalid_argument("estimate_correlations: binning mismatch");
  }
  const int M = F[0].binning().cells_per_particle();
  std::vector<std::vector<double>> d;
  for (const auto& f : F) d.push_back(f.density());
  std::vector<double> out(d[s - 1].size());
  std::vector<int> cell(s);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t rest = flat;
    for (int k = s - 1; k >= 0; --k) {
      cell[k] = static_cast<int>(rest % M);
      rest /= M;
    }
    auto f_of_block = [&](const std::vector<int>& blk) {
      std::size_t idx = 0;
      for (int slot : blk) idx = idx * M + cell[slot];
      return d[blk.size() - 1][idx];
    };
    out[flat] = cluster_invert<double>(s, f_of_block);
  }
  return GradedHistogram::from_density(s, F[s - 1].binning(), std::move(out));
}

// Weighted L1 distance between F2 and the factorized product F1 x F1,
// restricted to cells where the product exceeds `floor` times its maximum.
inline double chaos_metric(const GradedHistogram& F1, const GradedHistogram& F2,
                           double floor = 1e-3) {
  if (F1.order() != 1 || F2.order() != 2)
    throw std::invalid_argument("chaos_metric: need orders 1 and 2");
  const int M = F1.binning().cells_per_particle();
  if (F2.binning().cells_per_particle() != M)
    throw std::invalid_argument("chaos_metric: binning mismatch");
  auto d1 = F1.density();
  auto d2 = F2.density();
  double prod_max = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) prod_max = std::max(prod_max, d1[a] * d1[b]);
  const double vol2 = F2.total_cell_volume();
  double metric = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      double prod = d1[a] * d1[b];
      if (prod < floor * prod_max) continue;
      metric += std::abs(d2[static_cast<std::size_t>(a) * M + b] - prod) * vol2;
    }
  return metric;
}

// Variance of a sum of one-particle observables over the ensemble:
// integral of (a1^2 - <A>^2) G1 plus the double integral of a1 a1 G2,
// with <A> the G1-average of a1.  All integrals are cell sums.
inline double dispersion_of_additive_observable(const std::vector<double>& a1,
                                                const GradedHistogram& G1,
                                                const GradedHistogram& G2) {
  if (G1.order() != 1 || G2.order() != 2)
    throw std::invalid_argument("dispersion: need orders 1 and 2");
  const int M = G1.binning().cells_per_particle();
  if (static_cast<int>(a1.size()) != M || G2.binning().cells_per_particle() != M)
    throw std::invalid_argument("dispersion: binning mismatch");
  auto g1 = G1.density();
  auto g2 = G2.density();
  const double v1 = G1.total_cell_volume();
  const double v2 = G2.total_cell_volume();
  double mean = 0.0;
  for (int a = 0; a < M; ++a) mean += a1[a] * g1[a] * v1;
  double out = 0.0;
  for (int a = 0; a < M; ++a) out += (a1[a] * a1[a] - mean * mean) * g1[a] * v1;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      out += a1[a] * a1[b] * g2[static_cast<std::size_t>(a) * M + b] * v2;
  return out;
}

inline void GradedHistogram::export_text(std::ostream& os) const {
  os << "# graded-histogram order=" << s_ << " dim=" << binning_.dim
     << " samples=" << n_samples_ << " out_of_window=" << out_of_window_ << "\n";
  os << "# q-axes:";
  for (const auto& a : binning_.q_axes) os << " [" << a.lo << "," << a.hi << ")x" << a.bins;
  os << "\n# p-axes:";
  for (const auto& a : binning_.p_axes) os << " [" << a.lo << "," << a.hi << ")x" << a.bins;
  os << "\n# columns: flat-cell-index value std-error\n";
  auto d = density();
  auto se = std_error();
  for (std::size_t c = 0; c < d.size(); ++c) {
    if (d[c] == 0.0) continue;
    os << c << " " << d[c] << " " << se[c] << "\n";
  }
}

}  // namespace hsgas
