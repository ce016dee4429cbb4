#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hsgas/dsmc.hpp"
#include "hsgas/experiments.hpp"
#include "hsgas/granular.hpp"
#include "hsgas/rng.hpp"

using namespace hsgas;

namespace {

KineticEnsemble make_ensemble(int n_samples, double sigma, double beta, int dim,
                              std::uint64_t seed) {
  KineticEnsemble ens;
  ens.box = BoxSpec::cubic(dim, 1.0);
  ens.sigma = sigma;
  ens.weight = 100.0 / n_samples;
  ens.cells_per_axis = 2;
  RngStream rng(seed, "kinetic-test-init");
  for (int i = 0; i < n_samples; ++i) {
    PhasePoint pt;
    pt.q = detail::uniform_position(ens.box, rng);
    pt.p = detail::maxwellian_momentum(dim, beta, rng);
    ens.samples.push_back(pt);
  }
  return ens;
}

GridDensity1D gaussian_grid(double p_max, int np, double beta) {
  std::vector<double> vals(np);
  double dp = 2.0 * p_max / (np - 1);
  double mass = 0.0;
  for (int j = 0; j < np; ++j) {
    double p = -p_max + j * dp;
    vals[j] = std::exp(-0.5 * beta * p * p);
    mass += vals[j] * dp;
  }
  for (auto& v : vals) v /= mass;
  return GridDensity1D::homogeneous(p_max, np, vals);
}

}  // namespace

TEST_CASE("streaming moves positions only and wraps periodically") {
  auto ens = make_ensemble(200, 0.02, 1.0, 3, 91);
  auto before = ens.samples;
  auto out = dsmc_stream(ens, 0.37);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(out.samples[i].p == before[i].p);
    for (int k = 0; k < 3; ++k) {
      CHECK(out.samples[i].q[k] >= 0.0);
      CHECK(out.samples[i].q[k] < 1.0);
    }
  }
  // Zero momenta stay put.
  for (auto& s : ens.samples) s.p = {0.0, 0.0, 0.0};
  auto still = dsmc_stream(ens, 1.0);
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(still.samples[i].q == ens.samples[i].q);
}

TEST_CASE("collision step conserves momentum, energy, weight and count") {
  auto ens = make_ensemble(2000, 0.05, 1.0, 3, 92);
  Vec mom0 = vec0();
  double en0 = 0.0;
  for (const auto& s : ens.samples) {
    mom0 += s.p;
    en0 += norm2(s.p);
  }
  RngStream rng(92, "collide");
  auto out = dsmc_collide(ens, 0.01, CollideOptions{}, rng);
  CHECK(out.samples.size() == ens.samples.size());
  CHECK(out.weight == ens.weight);
  CHECK(out.collisions > 0);
  Vec mom1 = vec0();
  double en1 = 0.0;
  for (const auto& s : out.samples) {
    mom1 += s.p;
    en1 += norm2(s.p);
  }
  CHECK(norm(mom1 - mom0) < 1e-10);
  CHECK(std::abs(en1 - en0) < 1e-10 * en0);
}

TEST_CASE("collision step is deterministic per seed and flat g2 matches plain mode") {
  auto ens = make_ensemble(1000, 0.05, 1.0, 2, 93);
  RngStream r1(93, "det"), r2(93, "det"), r3(93, "det");
  auto a = dsmc_collide(ens, 0.01, CollideOptions{}, r1);
  auto b = dsmc_collide(ens, 0.01, CollideOptions{}, r2);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].p == b.samples[i].p);
  }
  // A unit pair-correlation weight with zero contact radius never rejects,
  // so the draw-for-draw path matches the plain mode exactly.
  CollideOptions flat;
  flat.mode = CollideMode::initial_correlations;
  flat.g2 = PairCorrelation::flat(0.0);
  auto c = dsmc_collide(ens, 0.01, flat, r3);
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].p == c.samples[i].p);
}

TEST_CASE("empty and single-occupancy cells produce no collisions") {
  auto ens = make_ensemble(1, 0.05, 1.0, 3, 94);
  RngStream rng(94, "single");
  auto out = dsmc_collide(ens, 0.01, CollideOptions{}, rng);
  CHECK(out.collisions == 0);
}

TEST_CASE("too large a time step trips the majorant guard") {
  auto ens = make_ensemble(500, 0.5, 1.0, 3, 95);
  ens.weight = 1e6;
  RngStream rng(95, "majorant");
  CHECK_THROWS_AS(dsmc_collide(ens, 1.0, CollideOptions{}, rng), std::runtime_error);
}

TEST_CASE("maxwellian input stays statistically stationary") {
  auto ens = make_ensemble(20000, 0.05, 1.0, 3, 96);
  double en0 = 0.0, m4_0 = 0.0;
  for (const auto& s : ens.samples) {
    en0 += norm2(s.p);
    m4_0 += norm2(s.p) * norm2(s.p);
  }
  RngStream rng(96, "stationary");
  for (int step = 0; step < 20; ++step) {
    ens = dsmc_stream(ens, 0.005);
    ens = dsmc_collide(ens, 0.005, CollideOptions{}, rng);
  }
  double m2 = 0.0, m4 = 0.0;
  for (const auto& s : ens.samples) {
    m2 += norm2(s.p);
    m4 += norm2(s.p) * norm2(s.p);
  }
  m2 /= ens.samples.size();
  m4 /= ens.samples.size();
  CHECK(m4 / (m2 * m2) == Catch::Approx(5.0 / 3.0).margin(0.05));
}

TEST_CASE("contact-offset pairing collides only shell-separated partners") {
  auto ens = make_ensemble(2000, 0.05, 1.0, 2, 97);
  CollideOptions opt;
  opt.mode = CollideMode::enskog_offset;
  RngStream rng(97, "shell");
  auto out = dsmc_collide(ens, 0.01, opt, rng);
  // Rates are reduced relative to plain pairing but remain nonnegative.
  RngStream rng2(97, "shell");
  auto plain = dsmc_collide(ens, 0.01, CollideOptions{}, rng2);
  CHECK(out.collisions <= plain.collisions);
}

TEST_CASE("entropy functional closed forms") {
  // Uniform mass-1 density over volume V: sum f log f vol = -log V.
  std::vector<double> uniform(8, 1.0 / (8 * 0.25));
  auto h = h_functional_of_table(uniform, 0.25);
  CHECK(h.value == Catch::Approx(-std::log(2.0)));
  CHECK_THROWS_AS(h_functional_of_table({}, 1.0), std::invalid_argument);

  // Tabulated 1d gaussian: differential entropy -(1/2) log(2 pi sigma^2) - 1/2.
  const double beta = 1.0;
  auto g = gaussian_grid(8.0, 2001, beta);
  auto hg = h_functional_of_table(g.f, g.dp);
  CHECK(hg.value == Catch::Approx(-0.5 * std::log(2.0 * M_PI / beta) - 0.5).margin(1e-6));
}

TEST_CASE("friction step conserves mass and mean momentum, dissipates energy") {
  auto g = gaussian_grid(6.0, 301, 1.0);
  const double m0 = g.mass();
  const double p0 = g.momentum();
  const double e0 = g.energy();
  FrictionStepStats stats;
  GridDensity1D cur = g;
  for (int step = 0; step < 2000; ++step) cur = granular_friction_step(cur, 5e-4, 1.0, &stats);
  CHECK(std::abs(cur.mass() - m0) < 1e-10 * m0);
  CHECK(std::abs(cur.momentum() - p0) < 1e-10);
  CHECK(cur.energy() < e0);
  // Symmetric initial data keeps mean momentum at zero.
  CHECK(std::abs(cur.momentum()) < 1e-10);
}

TEST_CASE("friction energy decay matches the quadrature identity") {
  // First-order upwind flux: the grid must be fine for a 1% match.
  auto g = gaussian_grid(6.0, 2401, 1.0);
  const double dt = 2e-5;
  GridDensity1D next = granular_friction_step(g, dt, 1.0);
  double de_dt = (next.energy() - g.energy()) / dt;
  double predicted = friction_energy_decay_rate(g, 1.0);
  CHECK(de_dt == Catch::Approx(predicted).epsilon(0.01));
  CHECK(predicted < 0.0);
}

TEST_CASE("friction step rejects CFL-violating steps") {
  auto g = gaussian_grid(6.0, 101, 1.0);
  CHECK_THROWS_AS(granular_friction_step(g, 50.0, 1.0), std::invalid_argument);
}

TEST_CASE("inelastic collision term vanishes identically in the elastic limit") {
  auto g = gaussian_grid(6.0, 201, 1.0);
  auto rhs = granular_boltzmann_rhs(g, Restitution{1.0});
  for (double v : rhs) CHECK(v == 0.0);
}

TEST_CASE("inelastic collision term conserves mass and momentum, loses energy") {
  const double p_max = 12.0;
  auto g = gaussian_grid(p_max, 401, 2.0);
  for (double e : {1.0 / 3.0, 0.9}) {
    auto rhs = granular_boltzmann_rhs(g, Restitution{e});
    double mass = 0.0, mom = 0.0, en = 0.0;
    for (int j = 0; j < g.np; ++j) {
      mass += rhs[j] * g.dp;
      mom += g.p_at(j) * rhs[j] * g.dp;
      en += g.p_at(j) * g.p_at(j) * rhs[j] * g.dp;
    }
    CHECK(std::abs(mass) < 1e-8);
    CHECK(std::abs(mom) < 1e-8);
    CHECK(en < 0.0);
  }
}

TEST_CASE("distribution distances: identical, disjoint, shifted") {
  std::vector<double> a = {0.0, 1.0, 1.0, 0.0};
  std::vector<double> b = {1.0, 0.0, 0.0, 1.0};
  auto same = compare_distributions(a, a, 0.5);
  CHECK(same.l1 == 0.0);
  CHECK(same.ks == 0.0);
  auto disjoint = compare_distributions(a, b, 0.5);
  CHECK(disjoint.l1 == Catch::Approx(2.0));
  CHECK_THROWS_AS(compare_distributions(a, std::vector<double>{1.0}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("granular cooling: elastic control conserves, inelastic dissipates") {
  auto elastic = run_granular_cooling(20, 0.01, 1.0, 10.0, {0.5, 1.0, 1.5}, 3, 201);
  double e0 = elastic.curve.front().md_energy_mean;
  for (const auto& cp : elastic.curve)
    CHECK(std::abs(cp.md_energy_mean - e0) < 1e-8 * e0);
  CHECK_FALSE(elastic.friction_compared);

  auto cooling = run_granular_cooling(20, 0.01, 0.9, 10.0, {0.5, 1.0, 1.5}, 3, 202);
  for (std::size_t i = 1; i < cooling.curve.size(); ++i)
    CHECK(cooling.curve[i].md_energy_mean <= cooling.curve[i - 1].md_energy_mean);
}
