#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hsgas/experiments.hpp"
#include "hsgas/histogram.hpp"
#include "hsgas/rng.hpp"
#include "hsgas/sampling.hpp"

using namespace hsgas;

namespace {

BinningSpec p_marginal_2d(double p_max, int bins) {
  return BinningSpec::momentum_marginal(BoxSpec::cubic(2, 1.0), p_max, bins);
}

}  // namespace

TEST_CASE("chaos sampler: sigma=0 accepts immediately, output always allowed") {
  InitialStateSpec spec;
  spec.beta = 2.0;
  BoxSpec box = BoxSpec::cubic(2, 1.0);
  RngStream rng(71, "chaos-basic");
  HardSphereSystem ideal = sample_chaos_configuration(spec, 50, 0.0, box, rng);
  CHECK(ideal.particles.size() == 50);
  for (int trial = 0; trial < 10; ++trial) {
    RngStream r2 = rng.sub(static_cast<std::uint64_t>(trial));
    HardSphereSystem sys = sample_chaos_configuration(spec, 20, 0.05, box, r2);
    CHECK(is_allowed_configuration(sys));
  }
  // Two spheres nearly half the box wide still place (exact contact allowed).
  RngStream r3 = rng.sub("two");
  BoxSpec big = BoxSpec::cubic(2, 10.0);
  HardSphereSystem two = sample_chaos_configuration(spec, 2, 2.0, big, r3);
  CHECK(is_allowed_configuration(two));
  CHECK_THROWS_AS(sample_chaos_configuration(spec, 300, 0.4, BoxSpec::cubic(2, 10.0), rng),
                  std::invalid_argument);  // packing guard
}

TEST_CASE("chaos sampler momenta follow the target gaussian law") {
  InitialStateSpec spec;
  spec.beta = 4.0;  // momentum std dev 0.5
  BoxSpec box = BoxSpec::cubic(2, 5.0);
  RngStream rng(72, "chaos-maxwell");
  const int bins = 40;
  const double p_max = 5.0 / std::sqrt(spec.beta);
  std::vector<double> counts(bins, 0.0), target(bins, 0.0);
  for (int r = 0; r < 100; ++r) {
    RngStream rr = rng.sub(static_cast<std::uint64_t>(r));
    HardSphereSystem sys = sample_chaos_configuration(spec, 100, 0.0, box, rr);
    for (const auto& pt : sys.particles) {
      int b = static_cast<int>((pt.p[0] + p_max) / (2 * p_max) * bins);
      if (b >= 0 && b < bins) counts[b] += 1.0;
    }
  }
  const double dw = 2 * p_max / bins;
  for (int b = 0; b < bins; ++b) {
    double p = -p_max + (b + 0.5) * dw;
    target[b] = std::exp(-0.5 * spec.beta * p * p);
  }
  auto dist = compare_distributions(counts, target, dw);
  CHECK(dist.ks < 0.05);
}

TEST_CASE("correlated sampler reproduces a depleted-shell pair law") {
  InitialStateSpec spec;
  spec.mode = InitialMode::correlated;
  spec.beta = 1.0;
  const double sigma = 0.05;
  // Step profile suppressing separations below 2 sigma.
  spec.g2.sigma = sigma;
  spec.g2.r = {sigma, 2 * sigma, 2 * sigma + 1e-6, 10 * sigma};
  spec.g2.g = {0.05, 0.05, 1.0, 1.0};
  BoxSpec box = BoxSpec::cubic(2, 1.0);
  CorrelatedSampler chain(spec, 40, sigma, box, RngStream(73, "corr"));
  long long inside = 0, outside = 0;
  for (int s = 0; s < 60; ++s) {
    HardSphereSystem sys = chain.next();
    CHECK(is_allowed_configuration(sys));
    for (int i = 0; i < 40; ++i)
      for (int j = i + 1; j < 40; ++j) {
        double r = norm(minimum_image_displacement(sys.particles[i].q, sys.particles[j].q, box));
        if (r < 2 * sigma)
          ++inside;
        else if (r < 4 * sigma)
          ++outside;
      }
  }
  // The shell [sigma, 2 sigma) is depleted relative to [2 sigma, 4 sigma).
  // Area ratio of the annuli is (4 - 1) / (16 - 4) = 1/4 for a flat law.
  CHECK(static_cast<double>(inside) < 0.25 * 0.25 * static_cast<double>(outside));
  double rate = chain.stats().acceptance_rate();
  CHECK(rate > 0.05);
  CHECK(rate < 0.95);
}

TEST_CASE("order-1 histogram normalizes to a unit-mass density") {
  BinningSpec bn = p_marginal_2d(5.0, 10);
  GradedHistogram h(1, bn);
  std::vector<PhasePoint> pts(3);
  for (auto& pt : pts) {
    pt.q = {0.5, 0.5, 0.0};
    pt.p = {0.0, 0.0, 0.0};  // all in one momentum cell
  }
  HardSphereSystem sys(0.0, pts, BoxSpec::cubic(2, 1.0), 0.0);
  h.accumulate(sys);
  auto d = h.density();
  double mass = 0.0;
  for (double v : d) mass += v * bn.cell_volume();
  CHECK(mass == Catch::Approx(1.0));
  // Delta-like state: single occupied cell at 1/(cell volume).
  int occupied = 0;
  for (double v : d)
    if (v != 0.0) {
      ++occupied;
      CHECK(v == Catch::Approx(1.0 / bn.cell_volume()));
    }
  CHECK(occupied == 1);
}

TEST_CASE("ideal-gas pair histogram shows the (N-1)/N sampling factor") {
  const int N = 10;
  InitialStateSpec spec;
  spec.beta = 1.0;
  BoxSpec box = BoxSpec::cubic(2, 1.0);
  BinningSpec bn = BinningSpec::momentum_marginal(box, 5.0, 4);
  RngStream rng(75, "ideal-ratio");
  GradedHistogram F1(1, bn), F2(2, bn);
  for (int r = 0; r < 4000; ++r) {
    RngStream rr = rng.sub(static_cast<std::uint64_t>(r));
    HardSphereSystem sys = sample_chaos_configuration(spec, N, 0.0, box, rr);
    F1.accumulate(sys);
    F2.accumulate(sys);
  }
  auto d1 = F1.density();
  auto d2 = F2.density();
  const int M = bn.cells_per_particle();
  // Count-weighted regression slope of the pair density against the
  // product density; the falling-factorial normalization makes it 1, and
  // renormalizing pairs by N^2 instead must reproduce the 1 - 1/N factor.
  double num = 0.0, den = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      double prod = d1[a] * d1[b];
      num += d2[a * M + b] * prod;
      den += prod * prod;
    }
  REQUIRE(den > 0.0);
  double slope = num / den;
  CHECK(slope == Catch::Approx(1.0).margin(0.02));
  double per_n2 = slope * static_cast<double>(N - 1) / N;
  CHECK(per_n2 == Catch::Approx(static_cast<double>(N - 1) / N).margin(0.02));
}

TEST_CASE("uniform gas has a flat position density") {
  InitialStateSpec spec;
  spec.beta = 1.0;
  BoxSpec box = BoxSpec::cubic(2, 1.0);
  BinningSpec bn;
  bn.dim = 2;
  bn.q_axes = {{0.0, 1.0, 8}, {0.0, 1.0, 1}};
  bn.p_axes = {{-5.0, 5.0, 1}, {-5.0, 5.0, 1}};
  GradedHistogram h(1, bn);
  RngStream rng(76, "flat");
  for (int r = 0; r < 500; ++r) {
    RngStream rr = rng.sub(static_cast<std::uint64_t>(r));
    h.accumulate(sample_chaos_configuration(spec, 50, 0.0, box, rr));
  }
  auto d = h.density();
  auto se = h.std_error();
  for (std::size_t c = 0; c < d.size(); ++c)
    CHECK(std::abs(d[c] - 1.0 / (bn.cell_volume() * d.size())) <= 3.0 * se[c] + 1e-12);
}

TEST_CASE("correlation estimate: factorized input vanishes, offsets pass through") {
  BinningSpec bn = p_marginal_2d(5.0, 4);
  const int M = bn.cells_per_particle();
  std::vector<double> d1(M);
  for (int a = 0; a < M; ++a) d1[a] = 0.1 + 0.05 * a;
  std::vector<double> d2(static_cast<std::size_t>(M) * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) d2[a * M + b] = d1[a] * d1[b];
  auto F1 = GradedHistogram::from_density(1, bn, d1);
  auto F2 = GradedHistogram::from_density(2, bn, d2);
  auto G2 = estimate_correlations({F1, F2});
  for (double v : G2.density()) CHECK(v == Catch::Approx(0.0).margin(1e-14));
  CHECK(chaos_metric(F1, F2) == 0.0);

  d2[5] += 0.25;
  auto F2b = GradedHistogram::from_density(2, bn, d2);
  auto G2b = estimate_correlations({F1, F2b});
  CHECK(G2b.density()[5] == Catch::Approx(0.25));

  // Doubling F2 on every retained cell: metric equals the retained product mass.
  std::vector<double> d2c(static_cast<std::size_t>(M) * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) d2c[a * M + b] = 2.0 * d1[a] * d1[b];
  auto F2c = GradedHistogram::from_density(2, bn, d2c);
  double expect = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) expect += d1[a] * d1[b] * F2c.total_cell_volume();
  CHECK(chaos_metric(F1, F2c, 0.0) == Catch::Approx(expect));
}

TEST_CASE("cluster round trip on histograms closes to 1e-10 per cell") {
  BinningSpec bn = p_marginal_2d(5.0, 3);
  const int M = bn.cells_per_particle();
  RngStream rng(77, "hist-roundtrip");
  std::vector<double> d1(M), d2(static_cast<std::size_t>(M) * M);
  for (auto& v : d1) v = rng.uniform(0.5, 2.0);
  for (int a = 0; a < M; ++a)
    for (int b = a; b < M; ++b)
      d2[a * M + b] = d2[b * M + a] = rng.uniform(0.5, 2.0);
  auto F1 = GradedHistogram::from_density(1, bn, d1);
  auto F2 = GradedHistogram::from_density(2, bn, d2);
  auto G2 = estimate_correlations({F1, F2});
  auto g2d = G2.density();
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      CHECK(g2d[a * M + b] + d1[a] * d1[b] == Catch::Approx(d2[a * M + b]).epsilon(1e-10));
}

TEST_CASE("three-particle correlation of a factorized table vanishes") {
  BinningSpec bn = p_marginal_2d(5.0, 3);
  const int M = bn.cells_per_particle();
  std::vector<double> d1(M);
  for (int a = 0; a < M; ++a) d1[a] = 0.2 + 0.1 * a;
  std::vector<double> d2(static_cast<std::size_t>(M) * M);
  std::vector<double> d3(static_cast<std::size_t>(M) * M * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      d2[a * M + b] = d1[a] * d1[b];
      for (int c = 0; c < M; ++c) d3[(a * M + b) * M + c] = d1[a] * d1[b] * d1[c];
    }
  auto G3 = estimate_correlations({GradedHistogram::from_density(1, bn, d1),
                                   GradedHistogram::from_density(2, bn, d2),
                                   GradedHistogram::from_density(3, bn, d3)});
  for (double v : G3.density()) CHECK(v == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("histogram merge is order-independent") {
  BinningSpec bn = p_marginal_2d(5.0, 6);
  InitialStateSpec spec;
  spec.beta = 1.0;
  BoxSpec box = BoxSpec::cubic(2, 1.0);
  RngStream rng(78, "merge");
  std::vector<HardSphereSystem> snaps;
  for (int r = 0; r < 12; ++r) {
    RngStream rr = rng.sub(static_cast<std::uint64_t>(r));
    snaps.push_back(sample_chaos_configuration(spec, 20, 0.0, box, rr));
  }
  GradedHistogram a(1, bn), b(1, bn), c(1, bn), all(1, bn);
  for (int r = 0; r < 4; ++r) a.accumulate(snaps[r]);
  for (int r = 4; r < 8; ++r) b.accumulate(snaps[r]);
  for (int r = 8; r < 12; ++r) c.accumulate(snaps[r]);
  for (int r = 0; r < 12; ++r) all.accumulate(snaps[r]);
  GradedHistogram left = a;
  left.merge(b);
  left.merge(c);
  GradedHistogram right = c;
  right.merge(b);
  right.merge(a);
  auto dl = left.density(), dr = right.density(), da = all.density();
  for (std::size_t i = 0; i < dl.size(); ++i) {
    CHECK(dl[i] == Catch::Approx(dr[i]).epsilon(1e-12).margin(1e-15));
    CHECK(dl[i] == Catch::Approx(da[i]).epsilon(1e-12).margin(1e-15));
  }
}

TEST_CASE("dispersion functional reduces to the plain variance when G2 = 0") {
  BinningSpec bn = p_marginal_2d(5.0, 8);
  const int M = bn.cells_per_particle();
  RngStream rng(79, "dispersion");
  std::vector<double> g1(M), a1(M);
  double mass = 0.0;
  for (int c = 0; c < M; ++c) {
    g1[c] = rng.uniform(0.1, 1.0);
    mass += g1[c] * bn.cell_volume();
  }
  for (auto& v : g1) v /= mass;  // unit-mass density
  for (int c = 0; c < M; ++c) a1[c] = rng.uniform(-2.0, 2.0);
  auto G1 = GradedHistogram::from_density(1, bn, g1);
  auto G2 = GradedHistogram::from_density(
      2, bn, std::vector<double>(static_cast<std::size_t>(M) * M, 0.0));
  double mean = 0.0, second = 0.0;
  for (int c = 0; c < M; ++c) {
    mean += a1[c] * g1[c] * bn.cell_volume();
    second += a1[c] * a1[c] * g1[c] * bn.cell_volume();
  }
  CHECK(dispersion_of_additive_observable(a1, G1, G2) ==
        Catch::Approx(second - mean * mean));
  std::vector<double> zero(M, 0.0);
  CHECK(dispersion_of_additive_observable(zero, G1, G2) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("dispersion functional matches the direct ensemble variance") {
  // Additive observable: kinetic energy per particle; compare the functional
  // against the across-replica variance of the summed observable.
  const int N = 8;
  InitialStateSpec spec;
  spec.beta = 1.0;
  BoxSpec box = BoxSpec::cubic(2, 1.0);
  BinningSpec bn = BinningSpec::momentum_marginal(box, 6.0, 24);
  const int M = bn.cells_per_particle();
  RngStream rng(80, "dispersion-md");
  GradedHistogram F1(1, bn), F2(2, bn);
  std::vector<double> sums;
  for (int r = 0; r < 3000; ++r) {
    RngStream rr = rng.sub(static_cast<std::uint64_t>(r));
    HardSphereSystem sys = sample_chaos_configuration(spec, N, 0.0, box, rr);
    F1.accumulate(sys);
    F2.accumulate(sys);
    double s = 0.0;
    for (const auto& pt : sys.particles) s += 0.5 * norm2(pt.p);
    sums.push_back(s);
  }
  // Observable value per cell: kinetic energy at the p_x bin midpoint; the
  // other momentum components are integrated out, so compare using the p_x
  // part only on both sides.
  std::vector<double> a1(M);
  for (int c = 0; c < M; ++c) {
    double p = -6.0 + (c + 0.5) * (12.0 / 24);
    a1[c] = 0.5 * p * p;
  }
  std::vector<double> sums_x;
  {
    RngStream rr2(80, "dispersion-md");  // same ensemble, x-part sums
    for (int r = 0; r < 3000; ++r) {
      RngStream rr = rr2.sub(static_cast<std::uint64_t>(r));
      HardSphereSystem sys = sample_chaos_configuration(spec, N, 0.0, box, rr);
      double s = 0.0;
      for (const auto& pt : sys.particles) s += 0.5 * pt.p[0] * pt.p[0];
      sums_x.push_back(s);
    }
  }
  double mean = 0.0;
  for (double s : sums_x) mean += s;
  mean /= sums_x.size();
  double var = 0.0;
  for (double s : sums_x) var += (s - mean) * (s - mean);
  var /= (sums_x.size() - 1);

  auto G2 = estimate_correlations({F1, F2});
  // Scale: the functional is per typical particle; the additive sum over N
  // exchangeable particles has variance N [ (a^2 - <A>^2) G1 ] + N(N-1) [ a a G2 ].
  auto g1d = F1.density();
  auto g2d = G2.density();
  double meanA = 0.0;
  for (int c = 0; c < M; ++c) meanA += a1[c] * g1d[c] * bn.cell_volume();
  double term1 = 0.0;
  for (int c = 0; c < M; ++c)
    term1 += (a1[c] * a1[c] - meanA * meanA) * g1d[c] * bn.cell_volume();
  double term2 = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      term2 += a1[a] * a1[b] * g2d[static_cast<std::size_t>(a) * M + b] *
               bn.cell_volume() * bn.cell_volume();
  CHECK(dispersion_of_additive_observable(a1, F1, G2) ==
        Catch::Approx(term1 + term2).epsilon(1e-10));
  double functional_sum = N * term1 + N * (N - 1.0) * term2;
  double se = var * std::sqrt(2.0 / (sums_x.size() - 1));
  CHECK(std::abs(functional_sum - var) < 3.0 * se + 0.05 * var);
  CHECK(sums.size() == sums_x.size());
}
