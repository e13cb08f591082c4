#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stirring/bridges.hpp"
#include "stirring/lattice.hpp"
#include "stirring/parallel.hpp"
#include "stirring/random.hpp"
#include "stirring/stats.hpp"

namespace stirring {

struct SpaceTimePoint {
  Vertex vertex;
  double height = 0.0;
};

// One cyclic random walk over a bridge configuration: upward unit-speed
// motion on bars with periodic wrap at the horizon, jumping across every
// bridge encountered strictly above the current height.
//
// discovery_order lists the distinct vertices X_1..X_m in the order the walk
// first reached them (X_1 is the start vertex). top_crossings are the bars
// whose top the walk passed; for a closed run from (v,0) these are exactly
// the cycle of v under sigma_t.
struct CrwRun {
  int n = 0;
  SpaceTimePoint start;
  std::vector<Vertex> discovery_order;
  bool closed = false;
  std::vector<Vertex> top_crossings;
  std::vector<std::uint32_t> bridge_log;  // crossed bridges, in crossing order
  std::uint64_t steps = 0;

  std::int32_t trace_size() const { return static_cast<std::int32_t>(discovery_order.size()); }
};

// Simulates the walk from `start` until it returns exactly to the start
// point (closed) or the trace reaches `budget` distinct vertices. The
// deterministic walk revisits no directed bridge crossing and tops no bar
// twice before closing, so 2*(#bridges + n^2) steps bound a full period;
// exceeding that bound is a defect, not a long run.
inline CrwRun run_crw(const BridgeSet& b, SpaceTimePoint start, std::int32_t budget) {
  if (budget < 1) throw std::invalid_argument("run_crw: budget must be >= 1");
  if (!in_lattice(start.vertex, b.n()))
    throw std::invalid_argument("run_crw: start vertex outside lattice");
  if (start.height < 0.0 || start.height > b.horizon())
    throw std::invalid_argument("run_crw: start height outside [0, horizon]");

  const int n = b.n();
  const std::int32_t vertices = static_cast<std::int32_t>(n) * n;
  const std::int32_t v0 = vertex_id(start.vertex, n);
  const double z0 = start.height;

  CrwRun run;
  run.n = n;
  run.start = start;
  run.discovery_order.push_back(start.vertex);

  std::vector<std::uint8_t> discovered(vertices, 0);
  std::vector<std::uint8_t> topped(vertices, 0);
  discovered[v0] = 1;

  // A trace can never exceed n^2 vertices, so a budget of at least n^2 means
  // nothing but closure can stop the walk; every such run terminates closed.
  const bool capped = budget < vertices;
  if (capped && budget == 1) return run;  // trace is already at budget

  const std::uint64_t step_guard =
      2 * (static_cast<std::uint64_t>(b.size()) + static_cast<std::uint64_t>(vertices)) + 16;

  std::int32_t cur = v0;
  double height = z0;
  for (;;) {
    if (++run.steps > step_guard)
      throw std::logic_error("run_crw: step guard exceeded; walk failed to close");
    const auto hop = successor(b, cur, height);
    if (hop) {
      // Upward segment [height, hop->height] on the current bar; the walk
      // passes the start point if that point lies strictly inside.
      if (cur == v0 && height < z0 && z0 <= hop->height) {
        run.closed = true;
        break;
      }
      cur = hop->neighbor;
      height = hop->height;
      run.bridge_log.push_back(hop->bridge);
      if (cur == v0 && height == z0) {  // jump landed exactly on the start
        run.closed = true;
        break;
      }
      if (!discovered[cur]) {
        discovered[cur] = 1;
        run.discovery_order.push_back(vertex_from_id(cur, n));
        if (capped && run.trace_size() == budget) break;
      }
    } else {
      // No bridge left above: ride to the top and wrap to height 0.
      if (cur == v0 && height < z0) {
        run.closed = true;
        break;
      }
      if (!topped[cur]) {
        topped[cur] = 1;
        run.top_crossings.push_back(vertex_from_id(cur, n));
      }
      height = 0.0;
      if (cur == v0 && z0 == 0.0) {
        run.closed = true;
        break;
      }
    }
  }
  return run;
}

// Whether the walk discovered at least k distinct vertices before closing,
// i.e. whether T_k was finite for this realization.
inline bool t_k_realized(const CrwRun& run, std::int32_t k) {
  if (k < 1) throw std::invalid_argument("t_k_realized: k must be >= 1");
  return k <= run.trace_size();
}

// Intersection counts of the first k discovered vertices with every row and
// column; rows[i] is |Z_k ∩ L_i| and cols[i] is |Z_k ∩ D_i|.
struct LineProfile {
  std::vector<std::int32_t> rows;
  std::vector<std::int32_t> cols;
};

inline LineProfile line_profile(const CrwRun& run, std::int32_t k) {
  if (k < 0 || k > run.trace_size())
    throw std::invalid_argument("line_profile: k exceeds realized trace");
  LineProfile profile{std::vector<std::int32_t>(run.n, 0), std::vector<std::int32_t>(run.n, 0)};
  for (std::int32_t i = 0; i < k; ++i) {
    const Vertex v = run.discovery_order[i];
    ++profile.rows[v.y];
    ++profile.cols[v.x];
  }
  return profile;
}

namespace detail {

inline std::size_t bridge_count_between(const BridgeSet& b, std::int32_t vid,
                                        std::int32_t other) {
  std::size_t count = 0;
  for (const auto& hop : b.timeline(vid))
    if (hop.neighbor == other) ++count;
  return count;
}

}  // namespace detail

// Corner events along the discovery sequence: 1-based indices l such that
// X_l and X_{l+1} share a row, X_{l+1} and X_{l+2} share a column, and both
// X_l and X_{l+1} carry exactly two incident bridges of which exactly one
// goes to the next discovery. Bridge counts are read over the whole horizon.
inline std::vector<std::int32_t> detect_L_jumps(const CrwRun& run, const BridgeSet& b) {
  if (run.n != b.n()) throw std::invalid_argument("detect_L_jumps: mismatched lattice sizes");
  std::vector<std::int32_t> hits;
  const auto& order = run.discovery_order;
  for (std::size_t i = 0; i + 2 < order.size(); ++i) {
    const Vertex x0 = order[i], x1 = order[i + 1], x2 = order[i + 2];
    if (!same_row(x0, x1) || !same_column(x1, x2)) continue;
    const std::int32_t id0 = vertex_id(x0, run.n);
    const std::int32_t id1 = vertex_id(x1, run.n);
    const std::int32_t id2 = vertex_id(x2, run.n);
    if (b.timeline(id0).size() != 2 || detail::bridge_count_between(b, id0, id1) != 1) continue;
    if (b.timeline(id1).size() != 2 || detail::bridge_count_between(b, id1, id2) != 1) continue;
    hits.push_back(static_cast<std::int32_t>(i + 1));
  }
  return hits;
}

struct TkEstimate {
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int successes = 0;
  int replicas = 0;
};

// Monte Carlo estimate of P(T_k < infinity) for walks started at (v, 0) with
// v uniform, each replica on a fresh bridge configuration. Replica r draws
// from rng.substream(r), so the estimate is reproducible at any thread count.
inline TkEstimate estimate_t_k(int n, double t, std::int32_t k, int replicas,
                               const RandomStream& rng, int threads = 1) {
  if (replicas < 1) throw std::invalid_argument("estimate_t_k: replicas must be >= 1");
  if (k < 1) throw std::invalid_argument("estimate_t_k: k must be >= 1");
  std::vector<std::uint8_t> success(replicas, 0);
  parallel_replicas(replicas, threads, [&](int r) {
    RandomStream stream = rng.substream(static_cast<std::uint64_t>(r));
    const auto vid =
        static_cast<std::int32_t>(stream.next_below(static_cast<std::uint64_t>(n) * n));
    const BridgeSet bridges = sample_bridges(n, t, stream);
    const CrwRun run = run_crw(bridges, SpaceTimePoint{vertex_from_id(vid, n), 0.0}, k);
    success[r] = t_k_realized(run, k) ? 1 : 0;
  });
  int hits = 0;
  for (auto s : success) hits += s;
  const BinomialCi ci = binomial_ci95(hits, replicas);
  return TkEstimate{ci.p_hat, ci.lo, ci.hi, hits, replicas};
}

}  // namespace stirring
