#pragma once

// Orchestrated sweeps: dilute-limit trend experiments (MD vs the stochastic
// kinetic solver), correlation transport along free characteristics, and 1D
// inelastic cooling versus the friction equation.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsgas/dsmc.hpp"
#include "hsgas/event_driven.hpp"
#include "hsgas/granular.hpp"
#include "hsgas/histogram.hpp"
#include "hsgas/rng.hpp"
#include "hsgas/sampling.hpp"
#include "hsgas/system.hpp"

namespace hsgas {

struct DistanceResult {
  double l1 = 0.0;
  double ks = 0.0;
};

// L1 and Kolmogorov-Smirnov distances between two histograms on a shared
// uniform binning; inputs are normalized to unit mass first.
inline DistanceResult compare_distributions(const std::vector<double>& h1,
                                            const std::vector<double>& h2, double bin_width) {
  if (h1.size() != h2.size() || h1.empty())
    throw std::invalid_argument("compare_distributions: binning mismatch");
  double m1 = 0.0, m2 = 0.0;
  for (double v : h1) m1 += v;
  for (double v : h2) m2 += v;
  if (!(m1 > 0.0) || !(m2 > 0.0))
    throw std::invalid_argument("compare_distributions: empty histogram");
  DistanceResult r;
  double c1 = 0.0, c2 = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    double a = h1[i] / (m1 * bin_width), b = h2[i] / (m2 * bin_width);
    r.l1 += std::abs(a - b) * bin_width;
    c1 += a * bin_width;
    c2 += b * bin_width;
    r.ks = std::max(r.ks, std::abs(c1 - c2));
  }
  return r;
}

struct SweepObservation {
  double t = 0.0;
  double chaos_metric = 0.0;
  double l1_md_vs_dsmc = 0.0;
  double correlation_discrepancy = 0.0;
};

struct SweepPointResult {
  ScalingPoint point;
  std::uint64_t seed = 0;
  std::vector<SweepObservation> observations;
};

struct SweepReport {
  std::vector<SweepPointResult> points;
  bool trend_chaos_ok = false;
  bool trend_l1_ok = false;
  bool trend_correlation_ok = false;
  double chaos_floor = 1e-3;
};

struct SweepOptions {
  int p_bins = 16;
  double p_max = 5.0;           // momentum window half-width
  int dsmc_samples = 20000;
  double dsmc_dt = 0.02;
  int dsmc_cells_per_axis = 2;
  double chaos_floor = 1e-3;
};

namespace detail {

// Non-increasing within noise, allowing at most one inversion.
inline bool trend_non_increasing(const std::vector<double>& v) {
  int inversions = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) ++inversions;
  return inversions <= 1;
}

inline std::vector<double> momentum_marginal_of(const GradedHistogram& F1) {
  return F1.density();
}

}  // namespace detail

// Dilute-limit sweep: for each scaling point, chaos-sampled MD replicas are
// evolved elastically and their one- and two-particle momentum histograms
// compared against a matched stochastic kinetic run started from the same
// one-particle data.
inline SweepReport run_boltzmann_grad_sweep(const std::vector<ScalingPoint>& points,
                                            const InitialStateSpec& init, const BoxSpec& box,
                                            const std::vector<double>& t_obs, int replicas,
                                            std::uint64_t seed, const SweepOptions& opt = {}) {
  if (points.empty()) throw std::invalid_argument("run_boltzmann_grad_sweep: no scaling points");
  if (t_obs.empty() || replicas < 1)
    throw std::invalid_argument("run_boltzmann_grad_sweep: need times and replicas");
  if (!scaling_sequence_consistent(points, box.dim))
    throw std::invalid_argument("run_boltzmann_grad_sweep: points violate the fixed N sigma^(d-1) rule");
  init.validate();

  RngStream master(seed, "boltzmann-grad-sweep");
  BinningSpec binning = BinningSpec::momentum_marginal(box, opt.p_max, opt.p_bins);
  SweepReport report;
  report.chaos_floor = opt.chaos_floor;

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const ScalingPoint& sp = points[pi];
    RngStream prng = master.sub("point").sub(static_cast<std::uint64_t>(pi));
    SweepPointResult pr;
    pr.point = sp;
    pr.seed = seed;

    // MD replicas, histograms accumulated at each observation time.
    std::vector<GradedHistogram> F1, F2;
    for (std::size_t ti = 0; ti < t_obs.size(); ++ti) {
      F1.emplace_back(1, binning);
      F2.emplace_back(2, binning);
    }
    for (int r = 0; r < replicas; ++r) {
      RngStream rrng = prng.sub("replica").sub(static_cast<std::uint64_t>(r));
      HardSphereSystem sys = sample_chaos_configuration(init, sp.n_particles, sp.sigma, box, rrng);
      for (std::size_t ti = 0; ti < t_obs.size(); ++ti) {
        sys = evolve_to(sys, t_obs[ti]);
        F1[ti].accumulate(sys);
        F2[ti].accumulate(sys);
      }
    }

    // Matched stochastic run from the same one-particle law.
    RngStream drng = prng.sub("dsmc");
    KineticEnsemble ens;
    ens.box = box;
    ens.sigma = sp.sigma;
    ens.cells_per_axis = opt.dsmc_cells_per_axis;
    ens.weight = static_cast<double>(sp.n_particles) / opt.dsmc_samples;
    RngStream srng = drng.sub("init");
    for (int s = 0; s < opt.dsmc_samples; ++s) {
      PhasePoint pt;
      pt.q = detail::uniform_position(box, srng);
      pt.p = detail::maxwellian_momentum(box.dim, init.beta, srng);
      ens.samples.push_back(pt);
    }
    std::vector<GradedHistogram> dsmc_F1;
    std::size_t next_obs = 0;
    double t_now = 0.0;
    while (next_obs < t_obs.size()) {
      double dt = std::min(opt.dsmc_dt, t_obs[next_obs] - t_now);
      if (dt > 0.0) {
        ens = dsmc_stream(ens, dt);
        ens = dsmc_collide(ens, dt, CollideOptions{}, drng);
        t_now += dt;
      }
      if (t_now >= t_obs[next_obs] - 1e-12) {
        GradedHistogram h(1, binning);
        HardSphereSystem snap(0.0, ens.samples, box, t_now);
        h.accumulate(snap);
        dsmc_F1.push_back(h);
        ++next_obs;
      }
    }

    for (std::size_t ti = 0; ti < t_obs.size(); ++ti) {
      SweepObservation obs;
      obs.t = t_obs[ti];
      obs.chaos_metric = chaos_metric(F1[ti], F2[ti], opt.chaos_floor);
      auto md = F1[ti].density();
      auto ds = dsmc_F1[ti].density();
      obs.l1_md_vs_dsmc = compare_distributions(md, ds, binning.cell_volume()).l1;
      pr.observations.push_back(obs);
    }
    report.points.push_back(std::move(pr));
  }

  std::vector<double> chaos_seq, l1_seq;
  for (const auto& pr : report.points) {
    chaos_seq.push_back(pr.observations.back().chaos_metric);
    l1_seq.push_back(pr.observations.back().l1_md_vs_dsmc);
  }
  report.trend_chaos_ok = report.points.size() >= 2 && detail::trend_non_increasing(chaos_seq);
  report.trend_l1_ok = report.points.size() >= 2 && detail::trend_non_increasing(l1_seq);
  return report;
}

struct CorrelationSweepOptions {
  int r_bins = 16;
  double r_max_factor = 4.0;  // radial window in units of sigma
};

// Pair correlations transported along backward free characteristics: the
// measured radial pair law at back-streamed separations is compared against
// the initial profile.
inline SweepReport run_correlation_propagation(const std::vector<ScalingPoint>& points,
                                               const InitialStateSpec& init, const BoxSpec& box,
                                               const std::vector<double>& t_obs, int replicas,
                                               std::uint64_t seed,
                                               const CorrelationSweepOptions& opt = {}) {
  if (points.empty()) throw std::invalid_argument("run_correlation_propagation: no scaling points");
  if (init.mode != InitialMode::correlated)
    throw std::invalid_argument("run_correlation_propagation: needs a correlated initial state");
  init.validate();

  RngStream master(seed, "correlation-propagation");
  SweepReport report;

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const ScalingPoint& sp = points[pi];
    RngStream prng = master.sub("point").sub(static_cast<std::uint64_t>(pi));
    SweepPointResult pr;
    pr.point = sp;
    pr.seed = seed;

    const double r_max = opt.r_max_factor * sp.sigma;
    const double dr = r_max / opt.r_bins;

    InitialStateSpec spec = init;
    spec.g2.sigma = sp.sigma;
    CorrelatedSampler chain(spec, sp.n_particles, sp.sigma, box, prng.sub("chain"));
    std::vector<HardSphereSystem> states;
    for (int r = 0; r < replicas; ++r) states.push_back(chain.next());

    for (double t : t_obs) {
      std::vector<double> counts(opt.r_bins, 0.0);
      std::vector<double> ref_counts(opt.r_bins, 0.0);
      std::vector<HardSphereSystem> evolved;
      for (const auto& s0 : states) evolved.push_back(evolve_to(s0, t));
      for (const auto& s : evolved) {
        const int N = static_cast<int>(s.particles.size());
        for (int i = 0; i < N; ++i)
          for (int j = i + 1; j < N; ++j) {
            Vec dq = minimum_image_displacement(s.particles[j].q, s.particles[i].q, s.box);
            Vec dp = s.particles[i].p - s.particles[j].p;
            double rb = norm(dq - t * dp);  // back-streamed separation
            int b = static_cast<int>(std::floor(rb / dr));
            if (b >= 0 && b < opt.r_bins) counts[b] += 1.0;
          }
      }
      // Uncorrelated reference: pairs mixed across distinct replicas.
      for (std::size_t a = 0; a + 1 < evolved.size(); ++a) {
        const auto& s1 = evolved[a];
        const auto& s2 = evolved[a + 1];
        const int N = static_cast<int>(s1.particles.size());
        for (int i = 0; i < N; ++i)
          for (int j = i + 1; j < N; ++j) {
            Vec dq = minimum_image_displacement(s2.particles[j].q, s1.particles[i].q, s1.box);
            Vec dp = s1.particles[i].p - s2.particles[j].p;
            double rb = norm(dq - t * dp);
            int b = static_cast<int>(std::floor(rb / dr));
            if (b >= 0 && b < opt.r_bins) ref_counts[b] += 1.0;
          }
      }
      SweepObservation obs;
      obs.t = t;
      double disc = 0.0;
      int used = 0;
      for (int b = 0; b < opt.r_bins; ++b) {
        if (ref_counts[b] <= 0.0) continue;
        double scale = static_cast<double>(evolved.size()) / (evolved.size() - 1);
        double g_meas = counts[b] / (ref_counts[b] * scale);
        double r_mid = (b + 0.5) * dr;
        disc += std::abs(g_meas - init.g2(r_mid)) * dr;
        ++used;
      }
      obs.correlation_discrepancy = used > 0 ? disc : 0.0;
      pr.observations.push_back(obs);
    }
    report.points.push_back(std::move(pr));
  }

  std::vector<double> seq;
  for (const auto& pr : report.points) seq.push_back(pr.observations.back().correlation_discrepancy);
  report.trend_correlation_ok = report.points.size() >= 2 && detail::trend_non_increasing(seq);
  return report;
}

struct CoolingPoint {
  double t = 0.0;
  double md_energy_mean = 0.0;   // ensemble mean of the total kinetic energy
  double md_energy_se = 0.0;
  double friction_energy = 0.0;  // matched friction-equation second moment, MD units
};

struct CoolingReport {
  std::vector<CoolingPoint> curve;
  double initial_energy = 0.0;   // MD ensemble mean at t = 0
  bool friction_compared = false;
  double friction_rate = 0.0;    // quasi-elastic rate constant used
  double max_rel_deviation = 0.0;  // over the >= 90 percent energy window
  int window_points = 0;           // curve points inside that window
};

struct CoolingOptions {
  double beta = 1.0;
  int friction_bins = 201;
  double friction_dt = 1e-3;
};

// 1D inelastic cooling: ensemble MD energy curve, and for near-elastic e a
// matched integration of the homogeneous friction equation.
inline CoolingReport run_granular_cooling(int N, double sigma, double e, double box_len,
                                          const std::vector<double>& t_grid, int replicas,
                                          std::uint64_t seed, const CoolingOptions& opt = {}) {
  if (N < 2 || replicas < 1 || t_grid.empty())
    throw std::invalid_argument("run_granular_cooling: bad arguments");
  Restitution rest{e};
  BoxSpec box = BoxSpec::cubic(1, box_len, Boundary::periodic);
  InitialStateSpec init;
  init.beta = opt.beta;

  RngStream master(seed, "granular-cooling");
  std::vector<std::vector<double>> energies(t_grid.size());
  double initial_energy_mean = 0.0;
  EvolutionMode mode = e == 1.0 ? EvolutionMode::elastic() : EvolutionMode::inelastic(rest);
  for (int r = 0; r < replicas; ++r) {
    RngStream rrng = master.sub("replica").sub(static_cast<std::uint64_t>(r));
    HardSphereSystem sys = sample_chaos_configuration(init, N, sigma, box, rrng);
    initial_energy_mean += conserved_quantities(sys).second / replicas;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      sys = evolve_to(sys, t_grid[ti], mode);
      energies[ti].push_back(conserved_quantities(sys).second);
    }
  }

  CoolingReport report;
  report.initial_energy = initial_energy_mean;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    CoolingPoint cp;
    cp.t = t_grid[ti];
    double n = static_cast<double>(energies[ti].size());
    double mean = 0.0;
    for (double v : energies[ti]) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : energies[ti]) var += (v - mean) * (v - mean);
    cp.md_energy_mean = mean;
    cp.md_energy_se = n > 1 ? std::sqrt(var / (n * (n - 1))) : 0.0;
    report.curve.push_back(cp);
  }

  if (e >= 0.95 && e < 1.0) {
    report.friction_compared = true;
    const double eps = rest.eps_r();
    const double free_len = box_len - N * sigma;
    report.friction_rate = static_cast<double>(N) / free_len * eps * (1.0 - eps);
    const double p_max = 6.0 / std::sqrt(opt.beta);
    std::vector<double> vals(opt.friction_bins);
    GridDensity1D f;
    {
      double dp = 2.0 * p_max / (opt.friction_bins - 1);
      double mass = 0.0;
      for (int j = 0; j < opt.friction_bins; ++j) {
        double p = -p_max + j * dp;
        vals[j] = std::exp(-0.5 * opt.beta * p * p);
        mass += vals[j] * dp;
      }
      for (auto& v : vals) v /= mass;
      f = GridDensity1D::homogeneous(p_max, opt.friction_bins, vals);
    }
    // Anchor the friction curve to the MD ensemble energy at t = 0, where
    // both start from the same Maxwellian.
    const double e_scale = initial_energy_mean / (0.5 * f.energy());
    double t_now = 0.0;
    std::size_t ti = 0;
    while (ti < t_grid.size()) {
      if (t_now >= t_grid[ti] - 1e-12) {
        report.curve[ti].friction_energy = 0.5 * f.energy() * e_scale;
        ++ti;
        continue;
      }
      double dt = std::min(opt.friction_dt, t_grid[ti] - t_now);
      f = granular_friction_step(f, dt, report.friction_rate);
      t_now += dt;
    }
    const double e0 = initial_energy_mean;
    for (const auto& cp : report.curve) {
      if (cp.md_energy_mean < 0.9 * e0) break;
      double rel = std::abs(cp.friction_energy - cp.md_energy_mean) / cp.md_energy_mean;
      report.max_rel_deviation = std::max(report.max_rel_deviation, rel);
      ++report.window_points;
    }
  }
  return report;
}

}  // namespace hsgas
