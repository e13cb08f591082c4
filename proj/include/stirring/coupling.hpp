#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stirring/bridges.hpp"
#include "stirring/dynamics.hpp"
#include "stirring/lattice.hpp"

namespace stirring {

// Union-find over the n^2 vertices, seeded with one component per cycle of
// sigma_t and coarsened by every subsequently swapped edge. Components only
// ever merge; the cycles of the permutation may keep splitting underneath,
// and every cycle stays inside a single component.
class GraphProcess {
 public:
  struct Fragmentation {
    double time;
    std::int32_t small_piece;
    std::int32_t large_piece;
  };

  GraphProcess(const CycleIndex& idx, double t)
      : n_(idx.n()),
        parent_(idx.vertex_count()),
        size_(idx.vertex_count(), 1),
        base_(t),
        elapsed_(0.0) {
    for (std::int32_t v = 0; v < idx.vertex_count(); ++v) parent_[v] = v;
    std::vector<std::int32_t> first_of(idx.cycle_id_bound(), -1);
    for (std::int32_t v = 0; v < idx.vertex_count(); ++v) {
      auto& anchor = first_of[idx.cycle_of(v)];
      if (anchor < 0)
        anchor = v;
      else
        merge(anchor, v);
    }
  }

  int n() const { return n_; }
  std::int32_t vertex_count() const { return static_cast<std::int32_t>(parent_.size()); }
  double base_time() const { return base_; }
  double elapsed() const { return elapsed_; }

  std::int32_t find(std::int32_t vid) {
    std::int32_t root = vid;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[vid] != root) {
      const std::int32_t up = parent_[vid];
      parent_[vid] = root;
      vid = up;
    }
    return root;
  }

  std::int32_t component_size(std::int32_t vid) { return size_[find(vid)]; }

  void merge(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::int32_t max_component_size() {
    std::int32_t best = 0;
    for (std::int32_t v = 0; v < vertex_count(); ++v)
      if (find(v) == v) best = std::max(best, size_[v]);
    return best;
  }

  const std::vector<Fragmentation>& fragmentation_log() const { return frag_log_; }

  friend SwapOutcome advance(GraphProcess& g, Permutation& sigma, CycleIndex& idx, Edge e,
                             double u, std::int32_t ell_threshold);

 private:
  int n_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> size_;
  double base_;
  double elapsed_;
  std::vector<Fragmentation> frag_log_;
};

// One swap event at absolute time u: the edge joins the graph process, the
// permutation evolves by apply_swap, and splits that leave a piece smaller
// than ell_threshold are appended to the fragmentation log.
inline SwapOutcome advance(GraphProcess& g, Permutation& sigma, CycleIndex& idx, Edge e,
                           double u, std::int32_t ell_threshold) {
  if (u < g.base_ + g.elapsed_)
    throw std::invalid_argument("advance: event time moved backwards");
  g.elapsed_ = u - g.base_;
  const SwapOutcome outcome = apply_swap(sigma, idx, e);
  g.merge(vertex_id(e.a, g.n_), vertex_id(e.b, g.n_));
  if (outcome.kind == SwapKind::Split) {
    const auto [first, second] = outcome.split_sizes;
    const std::int32_t small = std::min(first, second);
    if (small < ell_threshold)
      g.frag_log_.push_back({u, small, std::max(first, second)});
  }
  return outcome;
}

// Vertices lying in components of size at least ell.
inline std::int64_t component_mass(GraphProcess& g, std::int32_t ell) {
  if (ell < 1) throw std::invalid_argument("component_mass: ell must be >= 1");
  std::int64_t mass = 0;
  for (std::int32_t v = 0; v < g.vertex_count(); ++v)
    if (g.component_size(v) >= ell) ++mass;
  return mass;
}

inline GraphProcess init_graph_process(const CycleIndex& idx, double t) {
  return GraphProcess(idx, t);
}

struct CoupledSample {
  double u = 0.0;              // absolute time of the sample
  std::int64_t mass_sigma = 0;      // |V_u(ell)|
  std::int64_t mass_graph = 0;      // |V^G(ell)|
  std::int64_t discrepancy = 0;     // |V^G(ell) \ V_u(ell)|
  std::int64_t frag_count = 0;      // fragmentations logged up to u
  std::int64_t sprinkle_mass = 0;   // |V^G(sprinkle_threshold)|, if tracked
};

// Record of one coupled run over [t, t+delta]: the two masses and their
// exact set difference at each sampled time, plus the fragmentation log.
struct CoupledSeries {
  int n = 0;
  double t = 0.0;
  double delta = 0.0;
  std::int32_t ell = 0;
  std::int32_t k = 0;
  std::int32_t sprinkle_threshold = 0;  // 0 when not tracked
  std::vector<CoupledSample> samples;
  std::vector<GraphProcess::Fragmentation> fragmentations;
  std::int64_t sup_discrepancy = 0;  // max over the sampled grid
  std::int32_t max_cycle_end = 0;
  std::int32_t max_component_end = 0;
};

struct SampleGrid {
  enum class Kind { Event, Fixed, Explicit };
  Kind kind = Kind::Event;
  int points = 512;
  std::vector<double> times;  // Explicit only, absolute, ascending

  static SampleGrid event() { return SampleGrid{}; }
  static SampleGrid fixed(int points) { return SampleGrid{Kind::Fixed, points, {}}; }
  static SampleGrid explicit_times(std::vector<double> ts) {
    return SampleGrid{Kind::Explicit, 0, std::move(ts)};
  }
  // Exact sup at small scale, bounded memory above. For Fixed grids the
  // recorded sup over the grid is a lower bound of the true sup over s.
  static SampleGrid auto_for(int n) { return n <= 64 ? event() : fixed(512); }
};

namespace detail {

inline void take_coupled_sample(CoupledSeries& series, GraphProcess& g, const CycleIndex& idx,
                                double u) {
  CoupledSample s;
  s.u = u;
  std::int64_t missing = 0;  // sigma-side vertices not covered by the graph side
  for (std::int32_t vid = 0; vid < g.vertex_count(); ++vid) {
    const bool in_sigma = idx.orbit_size(vid) >= series.ell;
    const bool in_graph = g.component_size(vid) >= series.ell;
    if (in_sigma) ++s.mass_sigma;
    if (in_graph) ++s.mass_graph;
    if (in_graph && !in_sigma) ++s.discrepancy;
    if (in_sigma && !in_graph) ++missing;
    if (series.sprinkle_threshold > 0 &&
        g.component_size(vid) >= series.sprinkle_threshold)
      ++s.sprinkle_mass;
  }
  if (missing > 0)
    throw std::logic_error("run_coupled: containment violated (cycle outside its component)");
  s.frag_count = static_cast<std::int64_t>(g.fragmentation_log().size());
  series.sup_discrepancy = std::max(series.sup_discrepancy, s.discrepancy);
  series.samples.push_back(s);
}

}  // namespace detail

// Replays the bridges of B over (t, t+delta] against the coupling started
// from the cycles of sigma_t, sampling both masses on the given grid. B must
// already cover horizon t+delta. Containment is checked at every sample and
// a violation is a defect.
inline CoupledSeries run_coupled(const BridgeSet& b, double t, double delta, std::int32_t ell,
                                 std::int32_t k, const SampleGrid& grid,
                                 std::int32_t sprinkle_threshold = 0) {
  if (t < 0.0 || delta < 0.0) throw std::invalid_argument("run_coupled: negative time");
  if (t + delta > b.horizon() + 1e-9)
    throw std::invalid_argument("run_coupled: bridge set horizon too short");
  if (ell < 1) throw std::invalid_argument("run_coupled: ell must be >= 1");

  const int n = b.n();
  Permutation sigma(n);
  std::size_t next_bridge = 0;
  const auto& bridges = b.bridges();
  while (next_bridge < bridges.size() && bridges[next_bridge].height <= t) {
    const Edge e = bridges[next_bridge].edge;
    sigma.compose_swap(vertex_id(e.a, n), vertex_id(e.b, n));
    ++next_bridge;
  }
  CycleIndex idx(sigma);
  GraphProcess g(idx, t);

  CoupledSeries series;
  series.n = n;
  series.t = t;
  series.delta = delta;
  series.ell = ell;
  series.k = k;
  series.sprinkle_threshold = sprinkle_threshold;

  std::vector<double> fixed_times;
  if (grid.kind == SampleGrid::Kind::Fixed) {
    const int points = delta > 0.0 ? std::max(grid.points, 2) : 1;
    for (int i = 0; i < points; ++i)
      fixed_times.push_back(points == 1 ? t
                                        : t + delta * static_cast<double>(i) / (points - 1));
  } else if (grid.kind == SampleGrid::Kind::Explicit) {
    fixed_times = grid.times;
    for (std::size_t i = 0; i < fixed_times.size(); ++i) {
      if (fixed_times[i] < t || fixed_times[i] > t + delta ||
          (i > 0 && fixed_times[i] < fixed_times[i - 1]))
        throw std::invalid_argument("run_coupled: grid times outside [t, t+delta]");
    }
  }

  auto process_events_until = [&](double u) {
    while (next_bridge < bridges.size() && bridges[next_bridge].height <= u) {
      const Bridge& br = bridges[next_bridge];
      advance(g, sigma, idx, br.edge, br.height, ell);
      ++next_bridge;
    }
  };

  if (grid.kind == SampleGrid::Kind::Event) {
    detail::take_coupled_sample(series, g, idx, t);
    while (next_bridge < bridges.size() && bridges[next_bridge].height <= t + delta) {
      const Bridge& br = bridges[next_bridge];
      advance(g, sigma, idx, br.edge, br.height, ell);
      ++next_bridge;
      detail::take_coupled_sample(series, g, idx, br.height);
    }
  } else {
    if (fixed_times.empty() || fixed_times.front() > t)
      detail::take_coupled_sample(series, g, idx, t);
    for (double u : fixed_times) {
      process_events_until(u);
      detail::take_coupled_sample(series, g, idx, u);
    }
    process_events_until(t + delta);
  }

  series.fragmentations = g.fragmentation_log();
  series.max_cycle_end = idx.max_cycle_size();
  series.max_component_end = g.max_component_size();

  // Exact containment sweep at the end of the window.
  for (std::int32_t vid = 0; vid < g.vertex_count(); ++vid) {
    if (g.find(vid) != g.find(sigma.image(vid)))
      throw std::logic_error("run_coupled: orbit spans two components");
  }
  return series;
}

// Exact probability that swapping a uniformly chosen edge splits a cycle of
// sigma into two pieces, one smaller than ell. Enumerates every edge via the
// position of each vertex along its cycle, so no swap is actually applied.
inline double split_small_probability(const Permutation& sigma, const CycleIndex& idx,
                                      std::int32_t ell) {
  const int n = sigma.n();
  const std::int32_t vertices = sigma.vertex_count();
  std::vector<std::int32_t> pos(vertices, -1);
  for (std::int32_t v = 0; v < vertices; ++v) {
    if (pos[v] >= 0) continue;
    std::int32_t cur = v, p = 0;
    do {
      pos[cur] = p++;
      cur = sigma.image(cur);
    } while (cur != v);
  }
  std::uint64_t hits = 0;
  auto splits_small = [&](std::int32_t a, std::int32_t b) {
    if (idx.cycle_of(a) != idx.cycle_of(b)) return false;
    const std::int32_t len = idx.orbit_size(a);
    std::int32_t d = pos[b] - pos[a];
    if (d < 0) d += len;
    return std::min(d, len - d) < ell;
  };
  for (std::int32_t y = 0; y < n; ++y)
    for (std::int32_t i = 0; i < n; ++i)
      for (std::int32_t j = i + 1; j < n; ++j)
        hits += splits_small(vertex_id({i, y}, n), vertex_id({j, y}, n)) ? 1 : 0;
  for (std::int32_t x = 0; x < n; ++x)
    for (std::int32_t i = 0; i < n; ++i)
      for (std::int32_t j = i + 1; j < n; ++j)
        hits += splits_small(vertex_id({x, i}, n), vertex_id({x, j}, n)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(edge_count(n));
}

// First sampled offset s at which the graph-side mass at threshold
// ceil(delta_fraction * n^2 / 8) reaches that same threshold, if any. The
// series must have been tracked at exactly that sprinkle threshold.
inline std::optional<double> sprinkling_time(const CoupledSeries& series,
                                             double delta_fraction) {
  const double raw = delta_fraction * static_cast<double>(series.n) * series.n / 8.0;
  const auto threshold = static_cast<std::int32_t>(std::ceil(raw));
  if (series.sprinkle_threshold != threshold)
    throw std::invalid_argument("sprinkling_time: series not tracked at this threshold");
  for (const auto& s : series.samples) {
    if (s.sprinkle_mass >= threshold) return s.u - series.t;
  }
  return std::nullopt;
}

}  // namespace stirring
