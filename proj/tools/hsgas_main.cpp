// Command-line surface: runs the simulators, estimators and sweeps from a
// JSON config and writes deterministic text reports.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hsgas/dsmc.hpp"
#include "hsgas/event_driven.hpp"
#include "hsgas/experiments.hpp"
#include "hsgas/histogram.hpp"
#include "hsgas/io.hpp"
#include "hsgas/partition.hpp"
#include "hsgas/sampling.hpp"

namespace {

using namespace hsgas;

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool quiet = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name, std::uint64_t hash) {
  std::filesystem::create_directories(cfg.out_dir);
  std::string path = cfg.out_dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << provenance_header(hash, cfg.seed);
  return out;
}

int run_combinatorics_selftest(bool quiet) {
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok) {
    all_ok = all_ok && ok;
    if (!quiet) std::cout << (ok ? "pass  " : "FAIL  ") << name << "\n";
  };
  for (int n = 1; n <= 10; ++n) {
    BigInt want = n == 1 ? 1 : 0;
    report("delta identity n=" + std::to_string(n), delta_identity_check(n) == want);
  }
  for (int n = 1; n <= 12; ++n) {
    BigInt sum = 0;
    for (int k = 0; k <= n; ++k) sum += stirling2(n, k);
    report("stirling sum = Bell n=" + std::to_string(n), sum == bell_number(n));
  }
  for (int n = 0; n <= 12; ++n)
    report("cumulant bound n=" + std::to_string(n), cumulant_bound_check(n).holds);
  for (int n = 0; n <= 20; ++n) {
    auto c = reduced_cumulant_coefficients(n);
    BigInt sum = 0;
    for (const auto& v : c) sum += v;
    report("reduced cumulant coefficient sum n=" + std::to_string(n),
           sum == (n == 0 ? 1 : 0));
  }
  {
    RngStream rng(7, "selftest-roundtrip");
    bool ok = true;
    for (int trial = 0; trial < 3 && ok; ++trial) {
      GradedSequence<Rational> h;
      h.levels.assign(9, Rational(0));
      for (int s = 1; s <= 8; ++s)
        h.levels[s] = Rational(static_cast<long long>(rng.next_below(200)) - 100,
                               static_cast<long long>(rng.next_below(40)) + 1);
      auto back = ln_star(exp_star(h));
      for (int s = 0; s <= 8; ++s) ok = ok && back.levels[s] == h.levels[s];
    }
    report("ln_star after exp_star identity to level 8", ok);
  }
  if (!quiet) std::cout << (all_ok ? "selftest: all checks passed" : "selftest: FAILURES") << "\n";
  return all_ok ? 0 : 2;
}

void run_simulate(const RunConfig& cfg, std::uint64_t hash, bool quiet) {
  InitialStateSpec init;
  init.beta = cfg.beta;
  RngStream rng(cfg.seed, "simulate");
  HardSphereSystem sys = sample_chaos_configuration(init, cfg.n, cfg.sigma, cfg.box(), rng);
  EvolutionMode mode =
      cfg.e && *cfg.e < 1.0 ? EvolutionMode::inelastic(Restitution{*cfg.e}) : EvolutionMode::elastic();
  std::filesystem::create_directories(cfg.out_dir);
  std::size_t total_events = 0;
  for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
    std::size_t events = 0;
    sys = evolve_to(sys, cfg.times[ti], mode, &events);
    total_events += events;
    write_snapshot(sys, cfg.out_dir + "/snapshot_" + std::to_string(ti) + ".txt",
                   provenance_header(hash, cfg.seed));
  }
  if (!quiet)
    std::cout << "simulate: " << cfg.times.size() << " snapshots, " << total_events
              << " collisions\n";
}

void run_dsmc(const RunConfig& cfg, std::uint64_t hash, bool quiet) {
  KineticEnsemble ens;
  ens.box = cfg.box();
  ens.sigma = cfg.sigma;
  ens.cells_per_axis = 2;
  ens.weight = 1.0;
  RngStream rng(cfg.seed, "dsmc");
  RngStream srng = rng.sub("init");
  for (int i = 0; i < cfg.n; ++i) {
    PhasePoint pt;
    pt.q = detail::uniform_position(ens.box, srng);
    pt.p = detail::maxwellian_momentum(ens.box.dim, cfg.beta, srng);
    ens.samples.push_back(pt);
  }
  auto out = open_out(cfg, "dsmc.jsonl", hash);
  const double dt = 0.02;
  double t_now = 0.0;
  for (double t_obs : cfg.times) {
    while (t_now < t_obs - 1e-12) {
      double step = std::min(dt, t_obs - t_now);
      ens = dsmc_stream(ens, step);
      ens = dsmc_collide(ens, step, CollideOptions{}, rng);
      t_now += step;
    }
    Vec mom = vec0();
    double energy = 0.0;
    for (const auto& s : ens.samples) {
      mom += s.p;
      energy += 0.5 * norm2(s.p);
    }
    auto h = h_functional(ens, cfg.momentum_window(), 12);
    out << "{\"t\": " << format_g17(t_obs) << ", \"samples\": " << ens.samples.size()
        << ", \"px\": " << format_g17(mom[0]) << ", \"energy\": " << format_g17(energy)
        << ", \"h\": " << format_g17(h.value) << ", \"h_se\": " << format_g17(h.std_error)
        << ", \"collisions\": " << ens.collisions << "}\n";
  }
  if (!quiet) std::cout << "dsmc: " << ens.collisions << " collisions over t=" << t_now << "\n";
}

void run_scaling(const RunConfig& cfg, std::uint64_t hash, bool quiet) {
  if (cfg.scaling_points.size() < 1)
    throw std::invalid_argument("scaling: config needs scaling_points");
  InitialStateSpec init;
  init.beta = cfg.beta;
  SweepOptions opt;
  opt.p_bins = cfg.p_bins;
  opt.p_max = cfg.momentum_window();
  SweepReport rep = run_boltzmann_grad_sweep(cfg.scaling_points, init, cfg.box(), cfg.times,
                                             cfg.replicas, cfg.seed, opt);
  auto out = open_out(cfg, "sweep.jsonl", hash);
  for (const auto& pr : rep.points)
    for (const auto& obs : pr.observations)
      out << "{\"n\": " << pr.point.n_particles << ", \"sigma\": " << format_g17(pr.point.sigma)
          << ", \"epsilon\": " << format_g17(pr.point.epsilon) << ", \"t\": " << format_g17(obs.t)
          << ", \"chaos_metric\": " << format_g17(obs.chaos_metric)
          << ", \"l1_md_vs_dsmc\": " << format_g17(obs.l1_md_vs_dsmc) << "}\n";
  out << "{\"trend_chaos_ok\": " << (rep.trend_chaos_ok ? "true" : "false")
      << ", \"trend_l1_ok\": " << (rep.trend_l1_ok ? "true" : "false")
      << ", \"chaos_floor\": " << format_g17(rep.chaos_floor) << "}\n";
  if (!quiet)
    std::cout << "scaling: " << rep.points.size() << " points, trends "
              << (rep.trend_chaos_ok && rep.trend_l1_ok ? "ok" : "mixed") << "\n";
}

void run_granular(const RunConfig& cfg, std::uint64_t hash, bool quiet) {
  if (!cfg.e) throw std::invalid_argument("granular: config needs key \"e\"");
  CoolingOptions opt;
  opt.beta = cfg.beta;
  CoolingReport rep = run_granular_cooling(cfg.n, cfg.sigma, *cfg.e, cfg.box_len, cfg.times,
                                           cfg.replicas, cfg.seed, opt);
  auto out = open_out(cfg, "cooling.jsonl", hash);
  for (const auto& cp : rep.curve)
    out << "{\"t\": " << format_g17(cp.t) << ", \"energy\": " << format_g17(cp.md_energy_mean)
        << ", \"energy_se\": " << format_g17(cp.md_energy_se)
        << ", \"friction_energy\": " << format_g17(cp.friction_energy) << "}\n";
  out << "{\"friction_compared\": " << (rep.friction_compared ? "true" : "false")
      << ", \"friction_rate\": " << format_g17(rep.friction_rate)
      << ", \"max_rel_deviation\": " << format_g17(rep.max_rel_deviation) << "}\n";
  if (!quiet)
    std::cout << "granular: e=" << *cfg.e << " max deviation " << rep.max_rel_deviation << "\n";
}

void run_estimate(const RunConfig& cfg, std::uint64_t hash, bool quiet) {
  InitialStateSpec init;
  init.beta = cfg.beta;
  if (!cfg.g2_path.empty()) {
    init.mode = InitialMode::correlated;
    init.g2 = read_pair_correlation(cfg.g2_path, cfg.sigma);
  }
  RngStream rng(cfg.seed, "estimate");
  BinningSpec binning = BinningSpec::momentum_marginal(cfg.box(), cfg.momentum_window(), cfg.p_bins);
  GradedHistogram F1(1, binning), F2(2, binning);
  for (int r = 0; r < cfg.replicas; ++r) {
    RngStream rrng = rng.sub("replica").sub(static_cast<std::uint64_t>(r));
    HardSphereSystem sys =
        init.mode == InitialMode::correlated
            ? sample_correlated_configuration(init, cfg.n, cfg.sigma, cfg.box(), rrng)
            : sample_chaos_configuration(init, cfg.n, cfg.sigma, cfg.box(), rrng);
    if (!cfg.times.empty()) sys = evolve_to(sys, cfg.times.back());
    F1.accumulate(sys);
    F2.accumulate(sys);
  }
  GradedHistogram G2 = estimate_correlations({F1, F2});
  double metric = chaos_metric(F1, F2);
  {
    auto out = open_out(cfg, "f1.txt", hash);
    F1.export_text(out);
  }
  {
    auto out = open_out(cfg, "f2.txt", hash);
    F2.export_text(out);
  }
  {
    auto out = open_out(cfg, "g2.txt", hash);
    G2.export_text(out);
  }
  {
    auto out = open_out(cfg, "chaos_metric.txt", hash);
    out << "chaos_metric " << format_g17(metric) << " floor 0.001\n";
  }
  if (!quiet) std::cout << "estimate: chaos metric " << metric << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hard-sphere kinetic-theory toolkit"};
  app.require_subcommand(1);
  CliArgs args;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", args.config_path, "path to JSON config");
    if (config_required) c->required();
    sub->add_option("--out", args.out_dir, "output directory override");
    sub->add_option("--seed", args.seed, "master seed override")
        ->each([&](const std::string&) { args.seed_given = true; });
    sub->add_flag("--quiet", args.quiet, "suppress the summary line");
  };

  const char* kinds[] = {"simulate", "dsmc", "scaling", "granular", "estimate"};
  for (const char* k : kinds) add_common(app.add_subcommand(k), true);
  add_common(app.add_subcommand("combinatorics-selftest"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    if (sub == "combinatorics-selftest") return run_combinatorics_selftest(args.quiet);
    std::string text = slurp(args.config_path);
    hsgas::RunConfig cfg = hsgas::parse_config(text);
    if (cfg.kind != sub)
      throw std::invalid_argument("config kind \"" + cfg.kind + "\" does not match subcommand");
    if (args.seed_given) cfg.seed = args.seed;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    std::uint64_t hash = hsgas::config_hash(text);

    auto t0 = std::chrono::steady_clock::now();
    if (sub == "simulate") run_simulate(cfg, hash, args.quiet);
    else if (sub == "dsmc") run_dsmc(cfg, hash, args.quiet);
    else if (sub == "scaling") run_scaling(cfg, hash, args.quiet);
    else if (sub == "granular") run_granular(cfg, hash, args.quiet);
    else if (sub == "estimate") run_estimate(cfg, hash, args.quiet);
    auto t1 = std::chrono::steady_clock::now();
    // Wall time lives in a sidecar so report files stay byte-reproducible.
    std::ofstream timing(cfg.out_dir + "/timings.txt");
    timing << sub << " "
           << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() << " ms\n";
    return 0;
  } catch (const hsgas::PathologicalStateError& ex) {
    std::cerr << "runtime failure: " << ex.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "validation error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "runtime failure: " << ex.what() << "\n";
    return 2;
  }
}
