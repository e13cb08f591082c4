#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stirring/lattice.hpp"
#include "stirring/random.hpp"

namespace stirring {

// A bridge is a Poisson mark (edge, height) on E x [0,t]; the bar of vertex v
// is the segment {v} x [0,t]. Heights are pairwise distinct within a set.
struct Bridge {
  Edge edge;
  double height = 0.0;
};

// Immutable collection of bridges up to a time horizon, indexed two ways:
// globally in ascending height, and per vertex as an ascending timeline of
// (height, neighbor) hops for successor queries.
class BridgeSet {
 public:
  struct Hop {
    double height;
    std::int32_t neighbor;  // vertex id of the far endpoint
    std::uint32_t bridge;   // index into bridges()
  };

  BridgeSet(int n, double horizon, std::vector<Bridge> bridges)
      : n_(n), horizon_(horizon), bridges_(std::move(bridges)) {
    if (n < 2) throw std::invalid_argument("BridgeSet: n must be >= 2");
    if (horizon < 0.0) throw std::invalid_argument("BridgeSet: negative horizon");
    std::sort(bridges_.begin(), bridges_.end(),
              [](const Bridge& a, const Bridge& b) { return a.height < b.height; });
    for (std::size_t i = 0; i < bridges_.size(); ++i) {
      const Bridge& b = bridges_[i];
      if (!is_lattice_edge(b.edge, n_)) throw std::invalid_argument("BridgeSet: invalid edge");
      if (b.height < 0.0 || b.height > horizon_)
        throw std::invalid_argument("BridgeSet: height outside [0, horizon]");
      if (i > 0 && bridges_[i - 1].height == b.height)
        throw std::invalid_argument("BridgeSet: duplicate bridge height");
    }
    build_timelines();
  }

  int n() const { return n_; }
  double horizon() const { return horizon_; }
  std::size_t size() const { return bridges_.size(); }

  // All bridges in ascending height order.
  const std::vector<Bridge>& bridges() const { return bridges_; }

  std::span<const Hop> timeline(std::int32_t vid) const {
    return {hops_.data() + offsets_[vid], hops_.data() + offsets_[vid + 1]};
  }
  std::span<const Hop> timeline(Vertex v) const { return timeline(vertex_id(v, n_)); }

 private:
  void build_timelines() {
    const std::size_t vertices = static_cast<std::size_t>(n_) * n_;
    offsets_.assign(vertices + 1, 0);
    for (const Bridge& b : bridges_) {
      ++offsets_[vertex_id(b.edge.a, n_) + 1];
      ++offsets_[vertex_id(b.edge.b, n_) + 1];
    }
    for (std::size_t i = 1; i <= vertices; ++i) offsets_[i] += offsets_[i - 1];
    hops_.resize(2 * bridges_.size());
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t i = 0; i < bridges_.size(); ++i) {
      const Bridge& b = bridges_[i];
      const std::int32_t va = vertex_id(b.edge.a, n_);
      const std::int32_t vb = vertex_id(b.edge.b, n_);
      hops_[cursor[va]++] = Hop{b.height, vb, i};
      hops_[cursor[vb]++] = Hop{b.height, va, i};
    }
  }

  int n_;
  double horizon_;
  std::vector<Bridge> bridges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Hop> hops_;
};

namespace detail {

// Heights are a.s. distinct in the continuum; on a floating-point collision
// the offending draw is redone until the whole collection is strictly sorted.
// Redraws land in (lo, hi], so bridges at or below lo are never touched.
inline void make_heights_distinct(std::vector<Bridge>& bridges, double lo, double hi,
                                  RandomStream& rng) {
  for (;;) {
    std::sort(bridges.begin(), bridges.end(),
              [](const Bridge& a, const Bridge& b) { return a.height < b.height; });
    bool clean = true;
    for (std::size_t i = 1; i < bridges.size(); ++i) {
      if (bridges[i].height == bridges[i - 1].height) {
        bridges[i].height = hi - (hi - lo) * rng.next_unit();
        clean = false;
      }
    }
    if (clean) return;
  }
}

}  // namespace detail

// Poisson point process on E x [0,t] with intensity (1/|E|) * counting x Leb:
// the total count is Poisson(t), and conditionally each mark is an
// independent (uniform edge, uniform height) pair. Heights are drawn from
// (0, t] so that every sampled bridge sits strictly above the bar bottoms.
inline BridgeSet sample_bridges(int n, double t, RandomStream& rng) {
  if (t < 0.0) throw std::invalid_argument("sample_bridges: t must be >= 0");
  const std::uint64_t count = rng.next_poisson(t);
  std::vector<Bridge> bridges;
  bridges.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    bridges.push_back(Bridge{sample_uniform_edge(n, rng), t - t * rng.next_unit()});
  }
  detail::make_heights_distinct(bridges, 0.0, t, rng);
  return BridgeSet(n, t, std::move(bridges));
}

// Bridges with height <= s, with horizon s. Idempotent and nesting:
// restrict(restrict(B, s), s') == restrict(B, s') for s' <= s.
inline BridgeSet restrict(const BridgeSet& b, double s) {
  if (s < 0.0 || s > b.horizon())
    throw std::invalid_argument("restrict: s outside [0, horizon]");
  const auto& all = b.bridges();
  auto end = std::upper_bound(all.begin(), all.end(), s,
                              [](double v, const Bridge& br) { return v < br.height; });
  return BridgeSet(b.n(), s, std::vector<Bridge>(all.begin(), end));
}

// Extends the horizon with fresh independent Poisson marks on (horizon,
// t_new]; the result is distributed as sample_bridges(n, t_new).
inline BridgeSet extend(const BridgeSet& b, double t_new, RandomStream& rng) {
  if (t_new < b.horizon()) throw std::invalid_argument("extend: t_new below current horizon");
  std::vector<Bridge> bridges = b.bridges();
  const double gap = t_new - b.horizon();
  const std::uint64_t count = rng.next_poisson(gap);
  for (std::uint64_t i = 0; i < count; ++i) {
    // height in (horizon, t_new]: next_unit() is in [0,1) so subtract from the top
    bridges.push_back(
        Bridge{sample_uniform_edge(b.n(), rng), t_new - gap * rng.next_unit()});
  }
  detail::make_heights_distinct(bridges, b.horizon(), t_new, rng);
  return BridgeSet(b.n(), t_new, std::move(bridges));
}

// Lowest bridge on v's bar strictly above height z, if any.
inline std::optional<BridgeSet::Hop> successor(const BridgeSet& b, std::int32_t vid, double z) {
  const auto line = b.timeline(vid);
  auto it = std::upper_bound(line.begin(), line.end(), z,
                             [](double v, const BridgeSet::Hop& h) { return v < h.height; });
  if (it == line.end()) return std::nullopt;
  return *it;
}

inline std::optional<BridgeSet::Hop> successor(const BridgeSet& b, Vertex v, double z) {
  if (z < 0.0 || z > b.horizon())
    throw std::invalid_argument("successor: z outside [0, horizon]");
  return successor(b, vertex_id(v, b.n()), z);
}

}  // namespace stirring
