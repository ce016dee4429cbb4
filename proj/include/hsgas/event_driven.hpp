#pragma once

// Event-driven evolution of hard-sphere systems: exact free streaming between
// contacts, collision maps applied at exact event times.  Candidate pairs are
// found through a uniform cell grid (cell edge >= sigma) and kept in a
// priority queue with version-stamp invalidation; cell-boundary crossings are
// events of their own and refresh a particle's candidate set.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsgas/collision.hpp"
#include "hsgas/system.hpp"

namespace hsgas {

// Measure-zero pathological state (simultaneous multi-particle contact).
struct PathologicalStateError : std::runtime_error {
  explicit PathologicalStateError(const std::string& what) : std::runtime_error(what) {}
};

enum class CollisionMode { elastic, inelastic };

struct EvolutionMode {
  CollisionMode kind = CollisionMode::elastic;
  double restitution = 1.0;

  static EvolutionMode elastic() { return {}; }
  static EvolutionMode inelastic(const Restitution& r) {
    return {CollisionMode::inelastic, r.e};
  }
};

// A resolved collision, as reported to observers.
struct CollisionEvent {
  double time = 0.0;
  int i = 0, j = 0;  // i < j
  Vec eta = vec0();  // (q_i - q_j)/sigma at contact
  PhasePoint before_i, before_j;
  PhasePoint after_i, after_j;
};

class EventDrivenSimulator {
 public:
  using Observer = std::function<void(const CollisionEvent&)>;

  EventDrivenSimulator(HardSphereSystem sys, EvolutionMode mode)
      : sys_(std::move(sys)), mode_(mode) {
    if (mode_.kind == CollisionMode::inelastic && sys_.box.dim != 1)
      throw std::invalid_argument("inelastic mode is one-dimensional only");
    const std::size_t n = sys_.size();
    tq_.assign(n, sys_.time);
    version_.assign(n, 0);
    vmax_ = 1e-300;
    for (const auto& pt : sys_.particles) vmax_ = std::max(vmax_, norm(pt.p));
    use_cells_ = sys_.box.boundary == Boundary::periodic && sys_.sigma > 0.0 && n > 1;
    if (use_cells_) build_cells();
    schedule_all();
  }

  // Evolve to absolute time t_end (>= current time).
  void run_to(double t_end) {
    if (t_end < sys_.time) throw std::invalid_argument("run_to: t_end must be >= current time");
    if (sys_.sigma <= 0.0 || sys_.size() < 2) {
      stream_all_to(t_end);
      return;
    }
    while (!queue_.empty() && queue_.top().time <= t_end) {
      Event ev = queue_.top();
      queue_.pop();
      if (!valid(ev)) continue;
      if (ev.pair()) {
        check_simultaneity(ev);
        process_collision(ev);
      } else {
        process_crossing(ev);
      }
    }
    stream_all_to(t_end);
  }

  const HardSphereSystem& system() const { return sys_; }
  HardSphereSystem& system() { return sys_; }
  std::uint64_t collisions() const { return n_collisions_; }
  void set_observer(Observer obs) { observer_ = std::move(obs); }

 private:
  struct Event {
    double time;
    int i;       // particle
    int j;       // partner for pair events, -1 for crossings
    std::uint32_t vi, vj;
    int axis;    // crossing axis
    int dir;     // crossing direction (+1/-1)
    bool pair() const { return j >= 0; }
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.i != b.i) return a.i > b.i;
      return a.j > b.j;
    }
  };

  bool valid(const Event& ev) const {
    if (version_[ev.i] != ev.vi) return false;
    if (ev.pair() && version_[ev.j] != ev.vj) return false;
    return true;
  }

  Vec pos_at(int i, double t) const {
    return sys_.particles[i].q + (t - tq_[i]) * sys_.particles[i].p;
  }

  void advance(int i, double t) {
    sys_.particles[i].q = pos_at(i, t);
    tq_[i] = t;
  }

  void stream_all_to(double t_end) {
    for (std::size_t i = 0; i < sys_.size(); ++i) {
      advance(static_cast<int>(i), t_end);
      sys_.particles[i].q = sys_.box.wrap(sys_.particles[i].q);
    }
    sys_.time = t_end;
  }

  // --- cells ---------------------------------------------------------------

  void build_cells() {
    const int d = sys_.box.dim;
    const std::size_t n = sys_.size();
    // Cell edge >= sigma; total cell count capped near 4N to bound memory.
    double cap = std::pow(4.0 * static_cast<double>(n), 1.0 / d);
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) {
      int c = static_cast<int>(std::floor(sys_.box.edge[k] / sys_.sigma));
      c = std::min(c, std::max(2, static_cast<int>(cap)));
      nc_[k] = std::max(2, c);
      total *= static_cast<std::size_t>(nc_[k]);
    }
    for (int k = d; k < 3; ++k) nc_[k] = 1;
    cell_of_.assign(n, 0);
    cells_.assign(total, {});
    for (std::size_t i = 0; i < n; ++i) {
      sys_.particles[i].q = sys_.box.wrap(sys_.particles[i].q);
      const int c = cell_index(sys_.particles[i].q);
      cell_of_[i] = c;
      cells_[c].push_back(static_cast<int>(i));
    }
  }

  int cell_coord(double q, int k) const {
    int c = static_cast<int>(std::floor(q / sys_.box.edge[k] * nc_[k]));
    if (c >= nc_[k]) c = nc_[k] - 1;
    if (c < 0) c = 0;
    return c;
  }
  int cell_index(const Vec& q) const {
    int idx = 0;
    for (int k = sys_.box.dim - 1; k >= 0; --k) idx = idx * nc_[k] + cell_coord(q[k], k);
    return idx;
  }
  int cell_index_from_coords(const int* cc) const {
    int idx = 0;
    for (int k = sys_.box.dim - 1; k >= 0; --k) idx = idx * nc_[k] + cc[k];
    return idx;
  }
  void cell_coords(int idx, int* cc) const {
    for (int k = 0; k < sys_.box.dim; ++k) {
      cc[k] = idx % nc_[k];
      idx /= nc_[k];
    }
  }

  template <class F>
  void for_each_neighbor_cell(int cell, F&& f) const {
    int cc[3] = {0, 0, 0};
    cell_coords(cell, cc);
    const int d = sys_.box.dim;
    int off[3] = {0, 0, 0};
    std::vector<int> seen;
    auto rec = [&](auto&& self, int k) -> void {
      if (k == d) {
        int nn[3];
        for (int a = 0; a < d; ++a) {
          nn[a] = cc[a] + off[a];
          if (nn[a] < 0) nn[a] += nc_[a];
          if (nn[a] >= nc_[a]) nn[a] -= nc_[a];
        }
        const int idx = cell_index_from_coords(nn);
        for (int s : seen)
          if (s == idx) return;
        seen.push_back(idx);
        f(idx);
        return;
      }
      for (off[k] = -1; off[k] <= 1; ++off[k]) self(self, k + 1);
    };
    rec(rec, 0);
  }

  // --- scheduling ----------------------------------------------------------

  // Earliest contact between i and j from time t0, scanning periodic images
  // on axes with three or fewer cells (where the minimum image alone can
  // miss the first contact).
  std::optional<double> predict_pair(int i, int j, double t0) const {
    const Vec qi = pos_at(i, t0);
    const Vec qj = pos_at(j, t0);
    const Vec dp = sys_.particles[i].p - sys_.particles[j].p;
    Vec dq0 = minimum_image_displacement(qj, qi, sys_.box);
    const int d = sys_.box.dim;
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    if (use_cells_ && sys_.box.boundary == Boundary::periodic) {
      for (int k = 0; k < d; ++k)
        if (nc_[k] <= 3) {
          lo[k] = -1;
          hi[k] = 1;
        }
    }
    std::optional<double> best;
    int s[3];
    for (s[0] = lo[0]; s[0] <= hi[0]; ++s[0])
      for (s[1] = lo[1]; s[1] <= hi[1]; ++s[1])
        for (s[2] = lo[2]; s[2] <= hi[2]; ++s[2]) {
          Vec dq = dq0;
          for (int k = 0; k < d; ++k) dq[k] += s[k] * sys_.box.edge[k];
          const double bb = dot(dq, dp);
          if (bb >= 0.0) continue;
          const double aa = norm2(dp);
          if (aa == 0.0) continue;
          const double cc = norm2(dq) - sys_.sigma * sys_.sigma;
          const double disc = bb * bb - aa * cc;
          if (disc < 0.0) continue;
          double t = (-bb - std::sqrt(disc)) / aa;
          if (t < 0.0) {
            if (cc > -1e-9 * sys_.sigma * sys_.sigma) t = 0.0;
            else continue;
          }
          if (!best || t < *best) best = t;
        }
    return best;
  }

  void schedule_pair(int i, int j, double now) {
    if (i == j) return;
    auto t = predict_pair(i, j, now);
    if (!t) return;
    queue_.push(Event{now + *t, std::min(i, j), std::max(i, j),
                      version_[std::min(i, j)], version_[std::max(i, j)], 0, 0});
  }

  void schedule_crossing(int i, double now) {
    if (!use_cells_) return;
    const int d = sys_.box.dim;
    int cc[3] = {0, 0, 0};
    cell_coords(cell_of_[i], cc);
    double best = std::numeric_limits<double>::infinity();
    int axis = -1, dir = 0;
    const Vec q = pos_at(i, now);
    for (int k = 0; k < d; ++k) {
      const double v = sys_.particles[i].p[k];
      const double w = sys_.box.edge[k] / nc_[k];
      if (v > 0.0) {
        const double bound = (cc[k] + 1) * w;
        const double dt = (bound - q[k]) / v;
        if (dt < best) { best = dt; axis = k; dir = +1; }
      } else if (v < 0.0) {
        const double bound = cc[k] * w;
        const double dt = (bound - q[k]) / v;
        if (dt < best) { best = dt; axis = k; dir = -1; }
      }
    }
    if (axis < 0) return;  // at rest
    if (best < 0.0) best = 0.0;
    queue_.push(Event{now + best, i, -1, version_[i], 0, axis, dir});
  }

  void schedule_particle(int i, double now) {
    if (use_cells_) {
      for_each_neighbor_cell(cell_of_[i], [&](int c) {
        for (int j : cells_[c])
          if (j != i) schedule_pair(i, j, now);
      });
      schedule_crossing(i, now);
    } else {
      for (std::size_t j = 0; j < sys_.size(); ++j)
        if (static_cast<int>(j) != i) schedule_pair(i, static_cast<int>(j), now);
    }
  }

  void schedule_all() {
    if (sys_.sigma <= 0.0 || sys_.size() < 2) return;
    const double now = sys_.time;
    if (use_cells_) {
      for (std::size_t i = 0; i < sys_.size(); ++i) {
        const int ii = static_cast<int>(i);
        for_each_neighbor_cell(cell_of_[ii], [&](int c) {
          for (int j : cells_[c])
            if (j > ii) schedule_pair(ii, j, now);
        });
        schedule_crossing(ii, now);
      }
    } else {
      for (std::size_t i = 0; i + 1 < sys_.size(); ++i)
        for (std::size_t j = i + 1; j < sys_.size(); ++j)
          schedule_pair(static_cast<int>(i), static_cast<int>(j), sys_.time);
    }
  }

  // --- event processing ----------------------------------------------------

  void check_simultaneity(const Event& ev) {
    const double window = 1e-12 * sys_.sigma / vmax_;
    std::vector<Event> stash;
    bool bad = false;
    while (!queue_.empty() && queue_.top().time <= ev.time + window) {
      Event other = queue_.top();
      queue_.pop();
      stash.push_back(other);
      if (other.pair() && valid(other) &&
          (other.i == ev.i || other.i == ev.j || other.j == ev.i || other.j == ev.j))
        bad = true;
    }
    for (const auto& e : stash) queue_.push(e);
    if (bad)
      throw PathologicalStateError(
          "simultaneous multi-particle contact within resolution window at t=" +
          std::to_string(ev.time));
  }

  void process_collision(const Event& ev) {
    const int i = ev.i, j = ev.j;
    advance(i, ev.time);
    advance(j, ev.time);
    sys_.time = ev.time;
    Vec dq = minimum_image_displacement(sys_.particles[j].q, sys_.particles[i].q, sys_.box);
    const double dist = norm(dq);
    // Contact invariant; prediction and state share the same arithmetic, so
    // any disagreement beyond tolerance means a stale event slipped through.
    if (std::abs(dist - sys_.sigma) > 1e-9 * sys_.sigma)
      throw std::runtime_error("event-driven core: contact invariant violated at t=" +
                               std::to_string(ev.time));
    const Vec eta = (1.0 / dist) * dq;
    CollisionEvent rec;
    rec.time = ev.time;
    rec.i = i;
    rec.j = j;
    rec.eta = eta;
    rec.before_i = sys_.particles[i];
    rec.before_j = sys_.particles[j];

    Vec& pi = sys_.particles[i].p;
    Vec& pj = sys_.particles[j].p;
    const double approach = dot(eta, pi - pj);
    if (approach < 0.0) {
      if (mode_.kind == CollisionMode::elastic) {
        if (sys_.box.dim == 1) {
          std::swap(pi[0], pj[0]);  // exact exchange for rods
        } else {
          auto res = apply_elastic_collision(pi, pj, eta);
          pi = res.p1;
          pj = res.p2;
        }
      } else {
        auto [a, b] = apply_inelastic_collision_1d(pi[0], pj[0], Restitution(mode_.restitution));
        pi[0] = a;
        pj[0] = b;
      }
      ++n_collisions_;
      vmax_ = std::max({vmax_, norm(pi), norm(pj)});
    }
    // approach == 0: grazing contact is a no-op by continuity of the map.

    rec.after_i = sys_.particles[i];
    rec.after_j = sys_.particles[j];
    if (observer_) observer_(rec);

    ++version_[i];
    ++version_[j];
    schedule_particle(i, ev.time);
    schedule_particle(j, ev.time);
  }

  void process_crossing(const Event& ev) {
    const int i = ev.i;
    advance(i, ev.time);
    sys_.time = std::max(sys_.time, ev.time);
    const int k = ev.axis;
    int cc[3] = {0, 0, 0};
    cell_coords(cell_of_[i], cc);
    const double w = sys_.box.edge[k] / nc_[k];
    cc[k] += ev.dir;
    bool wrapped = false;
    if (cc[k] >= nc_[k]) { cc[k] = 0; wrapped = true; }
    if (cc[k] < 0) { cc[k] = nc_[k] - 1; wrapped = true; }
    // Pin the coordinate to the boundary it just crossed; on a wrap move it
    // to the equivalent boundary of the image cell.
    if (ev.dir > 0) sys_.particles[i].q[k] = wrapped ? 0.0 : cc[k] * w;
    else sys_.particles[i].q[k] = wrapped ? sys_.box.edge[k] : (cc[k] + 1) * w;
    const int newcell = cell_index_from_coords(cc);
    auto& old = cells_[cell_of_[i]];
    old.erase(std::find(old.begin(), old.end(), i));
    cells_[newcell].push_back(i);
    cell_of_[i] = newcell;
    ++version_[i];
    schedule_particle(i, ev.time);
  }

  HardSphereSystem sys_;
  EvolutionMode mode_;
  std::vector<double> tq_;
  std::vector<std::uint32_t> version_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  bool use_cells_ = false;
  int nc_[3] = {1, 1, 1};
  std::vector<std::vector<int>> cells_;
  std::vector<int> cell_of_;
  double vmax_ = 0.0;
  std::uint64_t n_collisions_ = 0;
  Observer observer_;
};

// State at t_end obtained by alternating free streaming and collisions.
// Backward targets (t_end < sys.time) are realized in elastic mode as
// momentum reversal, forward evolution, reversal again.
inline HardSphereSystem evolve_to(const HardSphereSystem& sys, double t_end,
                                  EvolutionMode mode = EvolutionMode::elastic(),
                                  std::uint64_t* n_events = nullptr) {
  if (t_end >= sys.time) {
    EventDrivenSimulator sim(sys, mode);
    sim.run_to(t_end);
    if (n_events) *n_events = sim.collisions();
    return sim.system();
  }
  if (mode.kind != CollisionMode::elastic)
    throw std::invalid_argument("backward evolution exists only in elastic mode");
  HardSphereSystem rev = sys;
  for (auto& pt : rev.particles) pt.p = -pt.p;
  const double span = sys.time - t_end;
  rev.time = 0.0;
  EventDrivenSimulator sim(rev, mode);
  sim.run_to(span);
  if (n_events) *n_events = sim.collisions();
  HardSphereSystem out = sim.system();
  for (auto& pt : out.particles) pt.p = -pt.p;
  out.time = t_end;
  return out;
}

}  // namespace hsgas
