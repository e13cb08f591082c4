#pragma once

#include <iomanip>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "stirring/bridges.hpp"
#include "stirring/coupling.hpp"
#include "stirring/crw.hpp"
#include "stirring/dynamics.hpp"

namespace stirring {

// Bridge dump for run reproducibility: one record per bridge, heights in
// ascending order.
inline nlohmann::json bridge_set_to_json(const BridgeSet& b) {
  nlohmann::json records = nlohmann::json::array();
  for (const Bridge& br : b.bridges()) {
    records.push_back({{"x1", br.edge.a.x},
                       {"y1", br.edge.a.y},
                       {"x2", br.edge.b.x},
                       {"y2", br.edge.b.y},
                       {"height", br.height}});
  }
  return nlohmann::json{{"n", b.n()}, {"horizon", b.horizon()}, {"bridges", records}};
}

inline BridgeSet bridge_set_from_json(const nlohmann::json& doc) {
  const int n = doc.at("n").get<int>();
  const double horizon = doc.at("horizon").get<double>();
  std::vector<Bridge> bridges;
  for (const auto& rec : doc.at("bridges")) {
    bridges.push_back(Bridge{Edge{Vertex{rec.at("x1").get<std::int32_t>(),
                                         rec.at("y1").get<std::int32_t>()},
                                  Vertex{rec.at("x2").get<std::int32_t>(),
                                         rec.at("y2").get<std::int32_t>()}},
                             rec.at("height").get<double>()});
  }
  return BridgeSet(n, horizon, std::move(bridges));
}

// Snapshot of a cycle decomposition: {n, t, cycle_sizes} with sizes
// descending.
inline nlohmann::json cycle_structure_json(const CycleIndex& idx, double t) {
  return nlohmann::json{{"n", idx.n()}, {"t", t}, {"cycle_sizes", idx.sizes_descending()}};
}

inline nlohmann::json vertex_json(Vertex v) { return nlohmann::json{{"x", v.x}, {"y", v.y}}; }

// One walk as a JSON record, suitable for JSON-lines trace files.
inline nlohmann::json crw_run_to_json(const CrwRun& run) {
  nlohmann::json order = nlohmann::json::array();
  for (Vertex v : run.discovery_order) order.push_back(vertex_json(v));
  nlohmann::json tops = nlohmann::json::array();
  for (Vertex v : run.top_crossings) tops.push_back(vertex_json(v));
  return nlohmann::json{
      {"start",
       {{"x", run.start.vertex.x}, {"y", run.start.vertex.y}, {"height", run.start.height}}},
      {"discovery_order", order},
      {"closed", run.closed},
      {"top_crossings", tops}};
}

// CSV export of a coupled run, one row per sampled time.
inline void write_coupled_series_csv(std::ostream& os, const CoupledSeries& series) {
  os << "u,mass_sigma,mass_graph,discrepancy,frag_count\n";
  os << std::setprecision(17);
  for (const auto& s : series.samples) {
    os << s.u << ',' << s.mass_sigma << ',' << s.mass_graph << ',' << s.discrepancy << ','
       << s.frag_count << '\n';
  }
}

}  // namespace stirring
