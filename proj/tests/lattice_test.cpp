#include <catch2/catch.hpp>

#include <set>
#include <vector>

#include "stirring/lattice.hpp"

using namespace stirring;

namespace {

// All lattice edges by brute force: every unordered pair sharing a row or column.
std::vector<Edge> enumerate_edges(int n) {
  std::vector<Edge> out;
  for (std::int32_t a = 0; a < n * n; ++a) {
    for (std::int32_t b = a + 1; b < n * n; ++b) {
      const Edge e{vertex_from_id(a, n), vertex_from_id(b, n)};
      if (same_row(e.a, e.b) || same_column(e.a, e.b)) out.push_back(e);
    }
  }
  return out;
}

VertexSet random_set(int n, double density, RandomStream& rng) {
  VertexSet s(n);
  for (std::int32_t vid = 0; vid < n * n; ++vid)
    if (rng.next_unit() < density) s.insert(vertex_from_id(vid, n));
  return s;
}

// Independent iota: recount per line from the member list.
std::int32_t iota_oracle(const VertexSet& a) {
  std::vector<std::int32_t> rows(a.n(), 0), cols(a.n(), 0);
  std::int32_t best = 0;
  for (Vertex v : a.members()) {
    best = std::max({best, ++rows[v.y], ++cols[v.x]});
  }
  return best;
}

}  // namespace

TEST_CASE("edge_count matches n^2(n-1) and brute enumeration", "[lattice]") {
  CHECK(edge_count(2) == 4);
  CHECK(edge_count(3) == 18);
  CHECK(edge_count(4) == 48);
  for (int n = 2; n <= 6; ++n) CHECK(edge_count(n) == enumerate_edges(n).size());
  CHECK_THROWS_AS(edge_count(1), std::invalid_argument);
}

TEST_CASE("edge numbering is a bijection", "[lattice]") {
  for (int n : {3, 5}) {
    std::set<std::uint64_t> seen;
    for (const Edge& e : enumerate_edges(n)) {
      const std::uint64_t idx = edge_index(e, n);
      REQUIRE(idx < edge_count(n));
      REQUIRE(seen.insert(idx).second);
      CHECK(edge_from_index(idx, n) == e);
    }
    REQUIRE(seen.size() == edge_count(n));
  }
}

TEST_CASE("sampled edges are valid and uniform", "[lattice]") {
  SECTION("validity") {
    RandomStream rng(11);
    for (int n : {2, 3, 7}) {
      for (int i = 0; i < 200; ++i) CHECK(is_lattice_edge(sample_uniform_edge(n, rng), n));
    }
  }
  SECTION("n=2 frequencies within 3 sigma over 1e5 draws") {
    RandomStream rng(12);
    const int draws = 100000;
    std::vector<int> hits(4, 0);
    for (int i = 0; i < draws; ++i) ++hits[edge_index(sample_uniform_edge(2, rng), 2)];
    const double tol = 3.0 * std::sqrt(0.25 * 0.75 / draws);
    for (int h : hits) CHECK(std::abs(h / double(draws) - 0.25) < tol);
  }
  SECTION("n=3 chi-square over 18 edges, alpha=0.001, 1e6 draws") {
    RandomStream rng(13);
    const int draws = 1000000;
    std::vector<int> hits(18, 0);
    for (int i = 0; i < draws; ++i) ++hits[edge_index(sample_uniform_edge(3, rng), 3)];
    const double expected = draws / 18.0;
    double chi2 = 0.0;
    for (int h : hits) chi2 += (h - expected) * (h - expected) / expected;
    CHECK(chi2 < 40.790);  // chi-square critical value, 17 df, alpha=0.001
  }
}

TEST_CASE("iota basics and oracle", "[lattice]") {
  VertexSet empty(5);
  CHECK(iota(empty) == 0);

  VertexSet row(5);
  for (int x = 0; x < 5; ++x) row.insert({x, 0});
  CHECK(iota(row) == 5);

  VertexSet corner(4);
  corner.insert({0, 0});
  corner.insert({1, 0});
  corner.insert({0, 1});
  CHECK(iota(corner) == 2);

  RandomStream rng(21);
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 3 + int(rng.next_below(8));
    const VertexSet a = random_set(n, rng.next_unit(), rng);
    CHECK(iota(a) == iota_oracle(a));
  }
}

TEST_CASE("a cleared set behaves like a fresh one", "[lattice]") {
  RandomStream rng(26);
  const int n = 7;
  VertexSet reused(n);
  for (int round = 0; round < 50; ++round) {
    reused.clear();
    VertexSet fresh(n);
    const int size = 1 + int(rng.next_below(30));
    for (int i = 0; i < size; ++i) {
      const Vertex v = vertex_from_id(int(rng.next_below(n * n)), n);
      reused.insert(v);
      fresh.insert(v);
    }
    REQUIRE(reused.size() == fresh.size());
    REQUIRE(iota(reused) == iota(fresh));
    for (int i = 0; i < n; ++i) {
      REQUIRE(reused.row_count(i) == fresh.row_count(i));
      REQUIRE(reused.col_count(i) == fresh.col_count(i));
    }
    REQUIRE(edges_between(reused, fresh) == edges_between(fresh, fresh));
  }
}

TEST_CASE("iota is subadditive on unions", "[lattice]") {
  RandomStream rng(22);
  for (int iter = 0; iter < 200; ++iter) {
    const int n = 3 + int(rng.next_below(6));
    const VertexSet a = random_set(n, 0.4 * rng.next_unit(), rng);
    const VertexSet b = random_set(n, 0.4 * rng.next_unit(), rng);
    VertexSet u(n);
    for (Vertex v : a.members()) u.insert(v);
    for (Vertex v : b.members()) u.insert(v);
    CHECK(iota(u) <= iota(a) + iota(b));
  }
}

TEST_CASE("edges_between counts, symmetry and the iota bound", "[lattice]") {
  SECTION("trivial and complete-row cases") {
    VertexSet empty(4), row(4);
    for (int x = 0; x < 4; ++x) row.insert({x, 0});
    CHECK(edges_between(empty, row) == 0);
    CHECK(edges_between(row, row) == 6);  // complete graph on a row: n(n-1)/2
  }
  SECTION("brute-force oracle and symmetry") {
    RandomStream rng(23);
    for (int iter = 0; iter < 60; ++iter) {
      const int n = 3 + int(rng.next_below(4));
      const VertexSet a = random_set(n, 0.6 * rng.next_unit(), rng);
      const VertexSet b = random_set(n, 0.6 * rng.next_unit(), rng);
      std::uint64_t brute = 0;
      for (const Edge& e : enumerate_edges(n)) {
        const bool forward = a.contains(e.a) && b.contains(e.b);
        const bool backward = a.contains(e.b) && b.contains(e.a);
        if (forward || backward) ++brute;
      }
      CHECK(edges_between(a, b) == brute);
      CHECK(edges_between(a, b) == edges_between(b, a));
    }
  }
  SECTION("within-set edges bounded by |A| iota(A)") {
    RandomStream rng(24);
    for (int iter = 0; iter < 100; ++iter) {
      VertexSet a(8);
      const int size = 1 + int(rng.next_below(20));
      while (a.size() < size) a.insert(vertex_from_id(int(rng.next_below(64)), 8));
      CHECK(edges_between(a, a) <= std::uint64_t(a.size()) * std::uint64_t(iota(a)));
    }
  }
}

TEST_CASE("translation identities", "[lattice]") {
  SECTION("zero shift and wraparound") {
    VertexSet a(3);
    a.insert({2, 2});
    const VertexSet same = translate({0, 0}, a);
    REQUIRE(same.size() == 1);
    CHECK(same.contains({2, 2}));
    const VertexSet wrapped = translate({2, 2}, a);
    REQUIRE(wrapped.size() == 1);
    CHECK(wrapped.contains({1, 1}));
  }
  SECTION("sum identities over all shifts") {
    RandomStream rng(25);
    for (int iter = 0; iter < 100; ++iter) {
      const int n = 3 + int(rng.next_below(4));
      const VertexSet a = random_set(n, 0.5 * rng.next_unit(), rng);
      const VertexSet b = random_set(n, 0.5 * rng.next_unit(), rng);
      std::int64_t total = 0, row_total = 0;
      for (std::int32_t vid = 0; vid < n * n; ++vid) {
        const Vertex v = vertex_from_id(vid, n);
        const VertexSet shifted = translate(v, a);
        std::int64_t inter = 0;
        for (Vertex w : shifted.members()) inter += b.contains(w) ? 1 : 0;
        total += inter;
        if (v.y == 0) row_total += inter;
      }
      CHECK(total == std::int64_t(a.size()) * b.size());
      std::int64_t per_row = 0;
      for (int i = 0; i < n; ++i) per_row += std::int64_t(a.row_count(i)) * b.row_count(i);
      CHECK(row_total == per_row);
    }
  }
}
