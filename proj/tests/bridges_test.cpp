#include <catch2/catch.hpp>

#include <cmath>
#include <set>

#include "stirring/bridges.hpp"
#include "stirring/io.hpp"

using namespace stirring;

namespace {

bool same_bridges(const BridgeSet& a, const BridgeSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.bridges()[i].edge == b.bridges()[i].edge)) return false;
    if (a.bridges()[i].height != b.bridges()[i].height) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("sampling basics", "[bridges]") {
  RandomStream rng(31);
  CHECK(sample_bridges(4, 0.0, rng).size() == 0);
  CHECK_THROWS_AS(sample_bridges(4, -1.0, rng), std::invalid_argument);

  const BridgeSet b = sample_bridges(5, 30.0, rng);
  SECTION("heights strictly increasing, all within the horizon") {
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(b.bridges()[i].height >= 0.0);
      CHECK(b.bridges()[i].height <= b.horizon());
      if (i > 0) CHECK(b.bridges()[i].height > b.bridges()[i - 1].height);
    }
  }
  SECTION("timeline lengths sum to twice the bridge count") {
    std::size_t total = 0;
    for (std::int32_t v = 0; v < 25; ++v) total += b.timeline(v).size();
    CHECK(total == 2 * b.size());
  }
  SECTION("every bridge appears once in each endpoint timeline") {
    for (std::uint32_t i = 0; i < b.size(); ++i) {
      const Bridge& br = b.bridges()[i];
      for (Vertex v : {br.edge.a, br.edge.b}) {
        int hits = 0;
        for (const auto& hop : b.timeline(v))
          if (hop.bridge == i) ++hits;
        CHECK(hits == 1);
      }
    }
  }
}

TEST_CASE("total intensity is Poisson(t)", "[bridges]") {
  // sample mean of the total count over 1e4 replicas within 3*sqrt(t/R) of t
  RandomStream rng(32);
  const double t = 100.0;
  const int replicas = 10000;
  double sum = 0.0;
  for (int r = 0; r < replicas; ++r) {
    RandomStream sub = rng.substream(r);
    sum += double(sample_bridges(4, t, sub).size());
  }
  CHECK(std::abs(sum / replicas - t) < 3.0 * std::sqrt(t / replicas));
}

TEST_CASE("per-edge counts have mean t/|E|", "[bridges]") {
  RandomStream rng(33);
  const int n = 3;
  const double t = 50.0;
  const int replicas = 10000;
  std::vector<double> counts(edge_count(n), 0.0);
  for (int r = 0; r < replicas; ++r) {
    RandomStream sub = rng.substream(r);
    const BridgeSet b = sample_bridges(n, t, sub);
    for (const Bridge& br : b.bridges()) counts[edge_index(br.edge, n)] += 1.0;
  }
  const double lambda = t / double(edge_count(n));
  const double tol = 3.0 * std::sqrt(lambda / replicas);
  for (double c : counts) CHECK(std::abs(c / replicas - lambda) < tol);
}

TEST_CASE("restrict keeps the prefix", "[bridges]") {
  RandomStream rng(34);
  const BridgeSet b = sample_bridges(4, 20.0, rng);
  CHECK(same_bridges(restrict(b, b.horizon()), b));
  CHECK(restrict(b, 0.0).size() == 0);
  const BridgeSet mid = restrict(b, 12.0);
  for (const Bridge& br : mid.bridges()) CHECK(br.height <= 12.0);
  CHECK(same_bridges(restrict(mid, 5.0), restrict(b, 5.0)));
  CHECK_THROWS_AS(restrict(b, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(restrict(b, b.horizon() + 1.0), std::invalid_argument);
}

TEST_CASE("extend preserves the past", "[bridges]") {
  RandomStream rng(35);
  const BridgeSet b = sample_bridges(4, 10.0, rng);
  CHECK(same_bridges(extend(b, b.horizon(), rng), b));
  const BridgeSet longer = extend(b, 25.0, rng);
  CHECK(longer.horizon() == 25.0);
  CHECK(same_bridges(restrict(longer, 10.0), b));
  for (std::size_t i = b.size(); i < longer.size(); ++i)
    CHECK(longer.bridges()[i].height > 10.0);
  CHECK_THROWS_AS(extend(b, 9.0, rng), std::invalid_argument);
}

TEST_CASE("extended sets match direct sampling in distribution", "[bridges]") {
  // two-sample mean comparison of total counts, both Poisson(20)
  RandomStream rng(36);
  const int replicas = 10000;
  double extended_sum = 0.0, direct_sum = 0.0;
  for (int r = 0; r < replicas; ++r) {
    RandomStream s1 = rng.substream(2 * r);
    RandomStream s2 = rng.substream(2 * r + 1);
    extended_sum += double(extend(sample_bridges(3, 10.0, s1), 20.0, s1).size());
    direct_sum += double(sample_bridges(3, 20.0, s2).size());
  }
  const double diff = std::abs(extended_sum - direct_sum) / replicas;
  CHECK(diff < 3.0 * std::sqrt(2.0 * 20.0 / replicas));
}

TEST_CASE("successor is the lowest bridge strictly above", "[bridges]") {
  const Vertex u{0, 0}, v{1, 0}, w{2, 0};
  const BridgeSet b(3, 5.0, {{Edge{u, v}, 1.0}, {Edge{u, w}, 2.5}});
  CHECK_FALSE(successor(b, Vertex{2, 2}, 0.0).has_value());

  const auto at_tie = successor(b, u, 1.0);
  REQUIRE(at_tie.has_value());
  CHECK(at_tie->height == 2.5);  // strict: the bridge at exactly 1.0 is skipped
  CHECK(at_tie->neighbor == vertex_id(w, 3));

  CHECK_FALSE(successor(b, u, 2.5).has_value());
  CHECK_THROWS_AS(successor(b, u, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(successor(b, u, 6.0), std::invalid_argument);
}

TEST_CASE("bridge set rejects malformed input", "[bridges]") {
  const Vertex u{0, 0}, v{1, 1};
  CHECK_THROWS_AS(BridgeSet(3, 5.0, {{Edge{u, v}, 1.0}}), std::invalid_argument);  // diagonal
  const Vertex w{1, 0};
  CHECK_THROWS_AS(BridgeSet(3, 5.0, {{Edge{u, w}, 6.0}}), std::invalid_argument);  // too high
  CHECK_THROWS_AS(BridgeSet(3, 5.0, {{Edge{u, w}, 1.0}, {Edge{u, w}, 1.0}}),
                  std::invalid_argument);  // duplicate height
}

TEST_CASE("json dump round-trips and stays sorted", "[bridges]") {
  RandomStream rng(37);
  const BridgeSet b = sample_bridges(4, 15.0, rng);
  const auto doc = bridge_set_to_json(b);
  double prev = -1.0;
  for (const auto& rec : doc["bridges"]) {
    const double h = rec["height"].get<double>();
    CHECK(h > prev);
    prev = h;
  }
  CHECK(same_bridges(bridge_set_from_json(doc), b));
}
