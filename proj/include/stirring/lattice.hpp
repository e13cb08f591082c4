#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stirring/random.hpp"

namespace stirring {

// Geometry of the 2-dimensional Hamming graph H(2,n): vertices are the n x n
// grid {0..n-1}^2, row i is {y == i}, column i is {x == i}, and two distinct
// vertices form an edge iff they share a row or a column. |E| = n^2 (n-1).

struct Vertex {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend bool operator==(Vertex a, Vertex b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(Vertex a, Vertex b) { return !(a == b); }
};

// Linearized vertex id, stable across runs: x + n*y.
inline std::int32_t vertex_id(Vertex v, int n) { return v.x + n * v.y; }
inline Vertex vertex_from_id(std::int32_t id, int n) { return Vertex{id % n, id / n}; }

inline bool same_row(Vertex a, Vertex b) { return a.y == b.y; }
inline bool same_column(Vertex a, Vertex b) { return a.x == b.x; }

// Unordered pair of distinct vertices on a common row or column.
struct Edge {
  Vertex a, b;

  friend bool operator==(Edge lhs, Edge rhs) {
    return (lhs.a == rhs.a && lhs.b == rhs.b) || (lhs.a == rhs.b && lhs.b == rhs.a);
  }
};

inline bool in_lattice(Vertex v, int n) { return v.x >= 0 && v.x < n && v.y >= 0 && v.y < n; }

inline bool is_lattice_edge(Edge e, int n) {
  return in_lattice(e.a, n) && in_lattice(e.b, n) && e.a != e.b &&
         (same_row(e.a, e.b) || same_column(e.a, e.b));
}

inline std::uint64_t edge_count(int n) {
  if (n < 2) throw std::invalid_argument("edge_count: n must be >= 2");
  const auto un = static_cast<std::uint64_t>(n);
  return un * un * (un - 1);
}

namespace detail {

// Rank of the pair i < j within the n(n-1)/2 unordered pairs of {0..n-1}.
inline std::uint64_t pair_rank(std::int64_t i, std::int64_t j, std::int64_t n) {
  return static_cast<std::uint64_t>(i * n - i * (i + 1) / 2 + (j - i - 1));
}

inline std::pair<std::int32_t, std::int32_t> pair_from_rank(std::uint64_t rank, std::int64_t n) {
  std::int64_t i = 0;
  std::uint64_t row = static_cast<std::uint64_t>(n - 1);
  while (rank >= row) {
    rank -= row;
    --row;
    ++i;
  }
  const std::int64_t j = i + 1 + static_cast<std::int64_t>(rank);
  return {static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)};
}

}  // namespace detail

// Canonical edge numbering. The 2n lines each carry n(n-1)/2 within-line
// pairs; rows come first (line id = y), then columns (line id = n + x).
inline std::uint64_t edge_index(Edge e, int n) {
  if (!is_lattice_edge(e, n)) throw std::invalid_argument("edge_index: not a lattice edge");
  const std::uint64_t pairs_per_line = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (same_row(e.a, e.b)) {
    const auto [lo, hi] = std::minmax(e.a.x, e.b.x);
    return static_cast<std::uint64_t>(e.a.y) * pairs_per_line + detail::pair_rank(lo, hi, n);
  }
  const auto [lo, hi] = std::minmax(e.a.y, e.b.y);
  return (static_cast<std::uint64_t>(n) + e.a.x) * pairs_per_line + detail::pair_rank(lo, hi, n);
}

inline Edge edge_from_index(std::uint64_t index, int n) {
  if (index >= edge_count(n)) throw std::invalid_argument("edge_from_index: index out of range");
  const std::uint64_t pairs_per_line = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const auto line = static_cast<std::int32_t>(index / pairs_per_line);
  const auto [lo, hi] = detail::pair_from_rank(index % pairs_per_line, n);
  if (line < n) return Edge{Vertex{lo, line}, Vertex{hi, line}};
  const std::int32_t x = line - n;
  return Edge{Vertex{x, lo}, Vertex{x, hi}};
}

// Each of the n^2 (n-1) edges is returned with equal probability: a uniform
// line among the 2n rows/columns, then a uniform unordered pair inside it.
inline Edge sample_uniform_edge(int n, RandomStream& rng) {
  if (n < 2) throw std::invalid_argument("sample_uniform_edge: n must be >= 2");
  const auto line = static_cast<std::int32_t>(rng.next_below(2ull * n));
  auto first = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(n)));
  auto second = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
  if (second >= first) ++second;
  const auto [lo, hi] = std::minmax(first, second);
  if (line < n) return Edge{Vertex{lo, line}, Vertex{hi, line}};
  return Edge{Vertex{line - n, lo}, Vertex{line - n, hi}};
}

// Dense vertex set over {0..n-1}^2 with O(1) membership and per-line
// intersection counts maintained on insert (no erase; clear is O(|A|)).
class VertexSet {
 public:
  explicit VertexSet(int n)
      : n_(n),
        member_(static_cast<std::size_t>(n) * n, 0),
        row_count_(n, 0),
        col_count_(n, 0) {
    if (n < 1) throw std::invalid_argument("VertexSet: n must be >= 1");
  }

  int n() const { return n_; }
  std::int32_t size() const { return static_cast<std::int32_t>(members_.size()); }
  bool empty() const { return members_.empty(); }

  bool contains(Vertex v) const { return member_[vertex_id(v, n_)] != 0; }

  void insert(Vertex v) {
    auto& slot = member_[vertex_id(v, n_)];
    if (slot) return;
    slot = 1;
    members_.push_back(v);
    max_line_ = std::max({max_line_, ++row_count_[v.y], ++col_count_[v.x]});
  }

  void clear() {
    for (Vertex v : members_) {
      member_[vertex_id(v, n_)] = 0;
      row_count_[v.y] = 0;
      col_count_[v.x] = 0;
    }
    members_.clear();
    max_line_ = 0;
  }

  const std::vector<Vertex>& members() const { return members_; }

  std::int32_t row_count(int i) const { return row_count_[i]; }
  std::int32_t col_count(int i) const { return col_count_[i]; }
  std::int32_t max_line_count() const { return max_line_; }

 private:
  int n_;
  std::vector<std::uint8_t> member_;
  std::vector<std::int32_t> row_count_;
  std::vector<std::int32_t> col_count_;
  std::vector<Vertex> members_;
  std::int32_t max_line_ = 0;
};

// Isoperimetry functional: the largest intersection of A with any single row
// or column; iota of the empty set is 0.
inline std::int32_t iota(const VertexSet& a) { return a.max_line_count(); }

// Number of edges with one endpoint in A and the other in B; an edge lying
// inside A ∩ B is counted once. Symmetric in its arguments.
inline std::uint64_t edges_between(const VertexSet& a, const VertexSet& b) {
  if (a.n() != b.n()) throw std::invalid_argument("edges_between: mismatched lattice sizes");
  const int n = a.n();
  std::vector<std::int32_t> both_row(n, 0), both_col(n, 0);
  const VertexSet& smaller = a.size() <= b.size() ? a : b;
  const VertexSet& larger = a.size() <= b.size() ? b : a;
  for (Vertex v : smaller.members()) {
    if (larger.contains(v)) {
      ++both_row[v.y];
      ++both_col[v.x];
    }
  }
  auto line_pairs = [](std::int64_t only_a, std::int64_t only_b, std::int64_t both) {
    return static_cast<std::uint64_t>(only_a * only_b + (only_a + only_b) * both +
                                      both * (both - 1) / 2);
  };
  std::uint64_t total = 0;
  for (int i = 0; i < n; ++i) {
    total += line_pairs(a.row_count(i) - both_row[i], b.row_count(i) - both_row[i], both_row[i]);
    total += line_pairs(a.col_count(i) - both_col[i], b.col_count(i) - both_col[i], both_col[i]);
  }
  return total;
}

// Component-wise translation modulo n, a bijection of the vertex set.
inline VertexSet translate(Vertex v, const VertexSet& a) {
  const int n = a.n();
  VertexSet out(n);
  for (Vertex w : a.members()) {
    out.insert(Vertex{(w.x + v.x) % n, (w.y + v.y) % n});
  }
  return out;
}

}  // namespace stirring
