#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stirring/bridges.hpp"
#include "stirring/lattice.hpp"

namespace stirring {

// Array-backed bijection on the n^2 vertices, with the inverse table kept in
// lockstep. The convention throughout is that a new swap acts after the
// current permutation: applying edge (v,w) replaces sigma by (v w) ∘ sigma.
class Permutation {
 public:
  explicit Permutation(int n)
      : n_(n), fwd_(static_cast<std::size_t>(n) * n), inv_(fwd_.size()) {
    if (n < 1) throw std::invalid_argument("Permutation: n must be >= 1");
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(fwd_.size()); ++i) {
      fwd_[i] = i;
      inv_[i] = i;
    }
  }

  static Permutation from_images(int n, std::vector<std::int32_t> images) {
    Permutation p(n);
    if (images.size() != p.fwd_.size())
      throw std::invalid_argument("Permutation: wrong image table size");
    std::vector<std::uint8_t> seen(images.size(), 0);
    for (std::int32_t v = 0; v < static_cast<std::int32_t>(images.size()); ++v) {
      const std::int32_t w = images[v];
      if (w < 0 || w >= static_cast<std::int32_t>(images.size()) || seen[w])
        throw std::invalid_argument("Permutation: image table is not a bijection");
      seen[w] = 1;
      p.inv_[w] = v;
    }
    p.fwd_ = std::move(images);
    return p;
  }

  int n() const { return n_; }
  std::int32_t vertex_count() const { return static_cast<std::int32_t>(fwd_.size()); }

  std::int32_t image(std::int32_t vid) const { return fwd_[vid]; }
  std::int32_t preimage(std::int32_t vid) const { return inv_[vid]; }
  Vertex image(Vertex v) const { return vertex_from_id(fwd_[vertex_id(v, n_)], n_); }
  Vertex preimage(Vertex v) const { return vertex_from_id(inv_[vertex_id(v, n_)], n_); }

  // sigma := (v w) ∘ sigma
  void compose_swap(std::int32_t v, std::int32_t w) {
    const std::int32_t a = inv_[v];
    const std::int32_t b = inv_[w];
    std::swap(fwd_[a], fwd_[b]);
    std::swap(inv_[v], inv_[w]);
  }

  bool is_identity() const {
    for (std::int32_t i = 0; i < vertex_count(); ++i)
      if (fwd_[i] != i) return false;
    return true;
  }

 private:
  int n_;
  std::vector<std::int32_t> fwd_;
  std::vector<std::int32_t> inv_;
};

// sigma_t read off the bridge configuration: from (v,0) follow the bar
// upwards, crossing every encountered bridge, until height t; the arrival
// vertex is sigma_t(v). Equals the composition of the transpositions in
// ascending height order.
inline Permutation permutation_from_bridges(const BridgeSet& b) {
  const int n = b.n();
  const std::int32_t vertices = static_cast<std::int32_t>(n) * n;
  std::vector<std::int32_t> images(vertices);
  for (std::int32_t v = 0; v < vertices; ++v) {
    std::int32_t cur = v;
    double z = 0.0;
    while (auto hop = successor(b, cur, z)) {
      cur = hop->neighbor;
      z = hop->height;
    }
    images[v] = cur;
  }
  return Permutation::from_images(n, std::move(images));
}

enum class SwapKind { Merge, Split };

struct SwapOutcome {
  SwapKind kind;
  // Merge: size of the unified cycle. Split: sizes of the two pieces, first
  // the one containing the edge's first endpoint.
  std::int32_t merged_size = 0;
  std::pair<std::int32_t, std::int32_t> split_sizes{0, 0};
};

// Cycle membership and sizes of a permutation, maintained incrementally
// across swaps. Ids of dissolved cycles keep size 0 and are never reused.
class CycleIndex {
 public:
  explicit CycleIndex(const Permutation& sigma) : n_(sigma.n()), id_(sigma.vertex_count(), -1) {
    for (std::int32_t v = 0; v < sigma.vertex_count(); ++v) {
      if (id_[v] >= 0) continue;
      const auto cid = static_cast<std::int32_t>(size_.size());
      std::int32_t len = 0;
      std::int32_t cur = v;
      do {
        id_[cur] = cid;
        ++len;
        cur = sigma.image(cur);
      } while (cur != v);
      size_.push_back(len);
    }
  }

  int n() const { return n_; }
  std::int32_t vertex_count() const { return static_cast<std::int32_t>(id_.size()); }

  // Upper bound on cycle ids; dissolved ids in [0, cycle_id_bound) have size 0.
  std::int32_t cycle_id_bound() const { return static_cast<std::int32_t>(size_.size()); }

  std::int32_t cycle_of(std::int32_t vid) const { return id_[vid]; }
  std::int32_t cycle_size(std::int32_t cid) const { return size_[cid]; }
  std::int32_t orbit_size(std::int32_t vid) const { return size_[id_[vid]]; }

  std::int32_t max_cycle_size() const {
    return *std::max_element(size_.begin(), size_.end());
  }

  // Number of vertices lying in cycles of length >= k.
  std::int64_t mass_at_least(std::int32_t k) const {
    std::int64_t mass = 0;
    for (std::int32_t s : size_)
      if (s >= k) mass += s;
    return mass;
  }

  std::vector<std::int32_t> sizes_descending() const {
    std::vector<std::int32_t> out;
    for (std::int32_t s : size_)
      if (s > 0) out.push_back(s);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }

  friend SwapOutcome apply_swap(Permutation& sigma, CycleIndex& idx, Edge e);

 private:
  int n_;
  std::vector<std::int32_t> id_;
  std::vector<std::int32_t> size_;
};

// Applies (v w) ∘ sigma and updates the cycle index. Distinct cycles merge;
// a shared cycle splits, with the two candidate pieces walked in lockstep so
// the cost is bounded by the smaller side.
inline SwapOutcome apply_swap(Permutation& sigma, CycleIndex& idx, Edge e) {
  if (!is_lattice_edge(e, sigma.n())) throw std::invalid_argument("apply_swap: invalid edge");
  const std::int32_t v = vertex_id(e.a, sigma.n());
  const std::int32_t w = vertex_id(e.b, sigma.n());
  const std::int32_t cv = idx.id_[v];
  const std::int32_t cw = idx.id_[w];

  if (cv != cw) {
    const bool v_small = idx.size_[cv] <= idx.size_[cw];
    const std::int32_t small_id = v_small ? cv : cw;
    const std::int32_t big_id = v_small ? cw : cv;
    const std::int32_t seed = v_small ? v : w;
    std::int32_t cur = seed;
    do {
      idx.id_[cur] = big_id;
      cur = sigma.image(cur);
    } while (cur != seed);
    idx.size_[big_id] += idx.size_[small_id];
    idx.size_[small_id] = 0;
    sigma.compose_swap(v, w);
    SwapOutcome out;
    out.kind = SwapKind::Merge;
    out.merged_size = idx.size_[big_id];
    return out;
  }

  const std::int32_t total = idx.size_[cv];
  sigma.compose_swap(v, w);
  // The old cycle is now two; chase both until one closes on its seed.
  std::vector<std::int32_t> path_v{v}, path_w{w};
  std::int32_t walker_v = v, walker_w = w;
  const std::vector<std::int32_t>* closed = nullptr;
  for (;;) {
    walker_v = sigma.image(walker_v);
    if (walker_v == v) {
      closed = &path_v;
      break;
    }
    path_v.push_back(walker_v);
    walker_w = sigma.image(walker_w);
    if (walker_w == w) {
      closed = &path_w;
      break;
    }
    path_w.push_back(walker_w);
  }
  const auto closed_size = static_cast<std::int32_t>(closed->size());
  const auto fresh = static_cast<std::int32_t>(idx.size_.size());
  idx.size_.push_back(closed_size);
  idx.size_[cv] = total - closed_size;
  for (std::int32_t member : *closed) idx.id_[member] = fresh;

  SwapOutcome out;
  out.kind = SwapKind::Split;
  const std::int32_t v_side = (closed == &path_v) ? closed_size : total - closed_size;
  out.split_sizes = {v_side, total - v_side};
  return out;
}

enum class OrbitDirection { Forward, Backward };

// First k steps of the cycle through v: {sigma^l(v) : l = 0..k} (or the
// inverse images for Backward). Size is min(k+1, cycle length).
inline void orbit_prefix_into(const Permutation& sigma, Vertex v, std::int32_t k,
                              OrbitDirection dir, VertexSet& out) {
  if (k < 0) throw std::invalid_argument("orbit_prefix: k must be >= 0");
  out.clear();
  const std::int32_t start = vertex_id(v, sigma.n());
  out.insert(v);
  std::int32_t cur = start;
  for (std::int32_t step = 0; step < k; ++step) {
    cur = (dir == OrbitDirection::Forward) ? sigma.image(cur) : sigma.preimage(cur);
    if (cur == start) break;
    out.insert(vertex_from_id(cur, sigma.n()));
  }
}

inline VertexSet orbit_prefix(const Permutation& sigma, Vertex v, std::int32_t k,
                              OrbitDirection dir = OrbitDirection::Forward) {
  VertexSet out(sigma.n());
  orbit_prefix_into(sigma, v, k, dir, out);
  return out;
}

// All vertices whose cycle has length >= k.
inline VertexSet long_cycle_vertices(const CycleIndex& idx, std::int32_t k) {
  if (k < 1) throw std::invalid_argument("long_cycle_vertices: k must be >= 1");
  VertexSet out(idx.n());
  for (std::int32_t vid = 0; vid < idx.vertex_count(); ++vid) {
    if (idx.orbit_size(vid) >= k) out.insert(vertex_from_id(vid, idx.n()));
  }
  return out;
}

}  // namespace stirring
