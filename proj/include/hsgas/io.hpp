#pragma once

// Configuration parsing, snapshot persistence, and provenance headers.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsgas/sampling.hpp"
#include "hsgas/system.hpp"

namespace hsgas {

inline constexpr int kSnapshotFormatVersion = 1;
inline constexpr const char* kBuildId = "hsgas-1.0.0";

struct RunConfig {
  std::string kind;  // simulate | dsmc | scaling | granular | estimate | combinatorics-selftest
  int dim = 3;
  int n = 0;
  double sigma = 0.0;
  double box_len = 1.0;
  std::string boundary = "periodic";
  double beta = 1.0;
  std::optional<double> e;  // restitution, inelastic runs only
  int replicas = 1;
  std::vector<double> times;
  int p_bins = 16;
  double p_max = 0.0;  // 0 means the default window 5 / sqrt(beta)
  std::vector<ScalingPoint> scaling_points;
  std::string g2_path;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  double momentum_window() const { return p_max > 0.0 ? p_max : 5.0 / std::sqrt(beta); }

  BoxSpec box() const {
    return BoxSpec::cubic(dim, box_len,
                          boundary == "open" ? Boundary::open : Boundary::periodic);
  }
};

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& ex) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  static const std::vector<std::string> known = {
      "kind",  "dim",   "n",       "sigma",  "box_len",        "boundary", "beta",
      "e",     "replicas", "times", "p_bins", "p_max",          "scaling_points",
      "g2_path", "seed", "out_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw std::invalid_argument("config: unknown key \"" + it.key() + "\"");
  }

  RunConfig c;
  auto require = [&](const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("config: missing key \"") + key + "\"");
  };
  auto get_to = [&](const char* key, auto& out) {
    try {
      j.at(key).get_to(out);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("config: type mismatch for key \"") + key + "\"");
    }
  };

  require("kind");
  get_to("kind", c.kind);
  static const std::vector<std::string> kinds = {"simulate", "dsmc",     "scaling",
                                                "granular", "estimate", "combinatorics-selftest"};
  bool kind_ok = false;
  for (const auto& k : kinds)
    if (c.kind == k) kind_ok = true;
  if (!kind_ok) throw std::invalid_argument("config: unknown kind \"" + c.kind + "\"");

  if (j.contains("dim")) get_to("dim", c.dim);
  if (j.contains("n")) get_to("n", c.n);
  if (j.contains("sigma")) get_to("sigma", c.sigma);
  if (j.contains("box_len")) get_to("box_len", c.box_len);
  if (j.contains("boundary")) get_to("boundary", c.boundary);
  if (j.contains("beta")) get_to("beta", c.beta);
  if (j.contains("e")) {
    double e;
    get_to("e", e);
    c.e = e;
  }
  if (j.contains("replicas")) get_to("replicas", c.replicas);
  if (j.contains("times")) get_to("times", c.times);
  if (j.contains("p_bins")) get_to("p_bins", c.p_bins);
  if (j.contains("p_max")) get_to("p_max", c.p_max);
  if (j.contains("seed")) get_to("seed", c.seed);
  if (j.contains("out_dir")) get_to("out_dir", c.out_dir);
  if (j.contains("g2_path")) get_to("g2_path", c.g2_path);
  if (j.contains("scaling_points")) {
    const auto& arr = j.at("scaling_points");
    if (!arr.is_array()) throw std::invalid_argument("config: type mismatch for key \"scaling_points\"");
    for (const auto& e : arr) {
      ScalingPoint sp;
      sp.n_particles = e.at("n").get<int>();
      sp.sigma = e.at("sigma").get<double>();
      sp.epsilon = e.at("epsilon").get<double>();
      c.scaling_points.push_back(sp);
    }
  }

  if (c.dim < 1 || c.dim > 3) throw std::invalid_argument("config: key \"dim\" must be 1..3");
  if (c.sigma < 0.0) throw std::invalid_argument("config: key \"sigma\" must be nonnegative");
  if (!(c.box_len > 0.0)) throw std::invalid_argument("config: key \"box_len\" must be positive");
  if (c.boundary != "periodic" && c.boundary != "open")
    throw std::invalid_argument("config: key \"boundary\" must be periodic or open");
  if (!(c.beta > 0.0)) throw std::invalid_argument("config: key \"beta\" must be positive");
  if (c.e && !(*c.e > 0.0 && *c.e <= 1.0))
    throw std::invalid_argument("config: key \"e\" must lie in (0, 1]");
  if (c.replicas < 1) throw std::invalid_argument("config: key \"replicas\" must be positive");
  for (double t : c.times)
    if (!(t >= 0.0)) throw std::invalid_argument("config: key \"times\" must be nonnegative");
  if (c.p_bins < 1) throw std::invalid_argument("config: key \"p_bins\" must be positive");
  if (!c.g2_path.empty() && !std::ifstream(c.g2_path).good())
    throw std::invalid_argument("config: key \"g2_path\" does not name a readable file");
  return c;
}

// Radial pair-correlation table: lines "r g", comments with '#'.
inline PairCorrelation read_pair_correlation(const std::string& path, double sigma) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("pair correlation: cannot open " + path);
  PairCorrelation g2;
  g2.sigma = sigma;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double r, g;
    if (!(row >> r >> g)) throw std::invalid_argument("pair correlation: malformed line in " + path);
    g2.r.push_back(r);
    g2.g.push_back(g);
  }
  g2.validate();
  return g2;
}

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// FNV-1a over the config text; stable provenance fingerprint.
inline std::uint64_t config_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string provenance_header(std::uint64_t cfg_hash, std::uint64_t seed,
                                     const std::string& truncation = "s<=3, collision series order 0") {
  std::ostringstream os;
  os << "# build " << kBuildId << " config_hash " << cfg_hash << " seed " << seed
     << " truncation " << truncation << "\n";
  return os.str();
}

inline void write_snapshot(const HardSphereSystem& sys, const std::string& path,
                           const std::string& header = "") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  out << header;
  out << "format_version " << kSnapshotFormatVersion << "\n";
  out << "dim " << sys.box.dim << "\n";
  out << "n " << sys.particles.size() << "\n";
  out << "sigma " << format_g17(sys.sigma) << "\n";
  out << "box";
  for (int k = 0; k < sys.box.dim; ++k) out << " " << format_g17(sys.box.edge[k]);
  out << "\n";
  out << "boundary " << (sys.box.boundary == Boundary::periodic ? "periodic" : "open") << "\n";
  out << "time " << format_g17(sys.time) << "\n";
  for (std::size_t i = 0; i < sys.particles.size(); ++i) {
    out << i;
    for (int k = 0; k < sys.box.dim; ++k) out << " " << format_g17(sys.particles[i].q[k]);
    for (int k = 0; k < sys.box.dim; ++k) out << " " << format_g17(sys.particles[i].p[k]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_snapshot: write failed for " + path);
}

inline HardSphereSystem read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  auto fail = [&](int line_no, const std::string& what) {
    std::ostringstream os;
    os << "read_snapshot: " << path << ":" << line_no << ": " << what;
    throw std::runtime_error(os.str());
  };
  int line_no = 0;
  std::string line, key;
  auto next_line = [&]() {
    do {
      if (!std::getline(in, line)) fail(line_no + 1, "unexpected end of file");
      ++line_no;
    } while (!line.empty() && line[0] == '#');
  };

  next_line();
  int version = -1;
  {
    std::istringstream row(line);
    if (!(row >> key >> version) || key != "format_version") fail(line_no, "expected format_version");
    if (version != kSnapshotFormatVersion) fail(line_no, "unsupported format version");
  }
  int dim = 0;
  std::size_t n = 0;
  double sigma = 0.0, time = 0.0;
  Vec edge{1.0, 1.0, 1.0};
  std::string boundary = "periodic";
  next_line();
  {
    std::istringstream row(line);
    if (!(row >> key >> dim) || key != "dim") fail(line_no, "expected dim");
  }
  next_line();
  {
    std::istringstream row(line);
    if (!(row >> key >> n) || key != "n") fail(line_no, "expected n");
  }
  next_line();
  {
    std::istringstream row(line);
    if (!(row >> key >> sigma) || key != "sigma") fail(line_no, "expected sigma");
  }
  next_line();
  {
    std::istringstream row(line);
    if (!(row >> key) || key != "box") fail(line_no, "expected box");
    for (int k = 0; k < dim; ++k)
      if (!(row >> edge[k])) fail(line_no, "short box line");
  }
  next_line();
  {
    std::istringstream row(line);
    if (!(row >> key >> boundary) || key != "boundary") fail(line_no, "expected boundary");
  }
  next_line();
  {
    std::istringstream row(line);
    if (!(row >> key >> time) || key != "time") fail(line_no, "expected time");
  }
  std::vector<PhasePoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    next_line();
    std::istringstream row(line);
    std::size_t id = 0;
    if (!(row >> id) || id != i) fail(line_no, "bad particle id");
    for (int k = 0; k < dim; ++k)
      if (!(row >> pts[i].q[k])) fail(line_no, "truncated position");
    for (int k = 0; k < dim; ++k)
      if (!(row >> pts[i].p[k])) fail(line_no, "truncated momentum");
  }
  BoxSpec box(dim, edge, boundary == "open" ? Boundary::open : Boundary::periodic);
  return HardSphereSystem(sigma, std::move(pts), box, time);
}

}  // namespace hsgas
