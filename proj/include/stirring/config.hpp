#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stirring/lattice.hpp"
#include "stirring/version.hpp"

namespace stirring {

// Seed used when neither config nor flags provide one; the STIRRING_LAB_SEED
// environment variable overrides this built-in default.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("STIRRING_LAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("STIRRING_LAB_SEED is not a valid unsigned integer");
    }
  }
  return 42;
}

// Runtime parameters of one experiment. Optional knobs left unset are
// resolved to experiment-specific defaults and echoed back resolved.
struct ExperimentConfig {
  std::string experiment;
  int n = 64;
  std::vector<double> betas{0.5};  // t = beta * n^2
  int replicas = 100;
  std::uint64_t seed = default_seed();
  int threads = 0;  // 0 = hardware concurrency
  std::string out;  // output path prefix; empty = stdout only

  std::optional<int> k;            // trace target / orbit prefix length
  std::optional<int> ell;          // cycle/component size threshold
  std::optional<int> m_max;        // survival range for line-tail
  std::optional<int> budget;       // crw trace budget
  std::optional<double> window;    // coupling window Delta
  double delta_fraction = 0.0;     // sprinkling delta; 0 = not tracked
  std::string grid = "auto";       // auto | event | fixed
  Vertex start{0, 0};              // crw-trace start vertex
  double start_height = 0.0;
  std::string dump_cycles;         // optional cycle-structure JSONL path
  std::string dump_bridges;        // optional bridge-dump path (crw-trace)
  std::string series_csv;          // optional coupled-series CSV path

  double t_for(double beta) const { return beta * static_cast<double>(n) * n; }

  void validate() const {
    if (n < 2) throw std::invalid_argument("config: n must be >= 2");
    if (betas.empty()) throw std::invalid_argument("config: at least one beta required");
    for (double b : betas)
      if (b < 0.0) throw std::invalid_argument("config: beta must be >= 0");
    if (replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
    if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
    if (grid != "auto" && grid != "event" && grid != "fixed")
      throw std::invalid_argument("config: grid must be auto, event or fixed");
    if (delta_fraction < 0.0 || delta_fraction > 1.0)
      throw std::invalid_argument("config: delta_fraction must lie in [0,1]");
    if (k && *k < 0) throw std::invalid_argument("config: k must be >= 0");
    if (ell && *ell < 1) throw std::invalid_argument("config: ell must be >= 1");
    if (m_max && *m_max < 1) throw std::invalid_argument("config: m_max must be >= 1");
    if (budget && *budget < 1) throw std::invalid_argument("config: budget must be >= 1");
    if (window && *window < 0.0) throw std::invalid_argument("config: window must be >= 0");
    if (!in_lattice(start, n)) throw std::invalid_argument("config: start vertex outside lattice");
    if (start_height < 0.0) throw std::invalid_argument("config: start_height must be >= 0");
  }
};

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"schema", kSchemaId},
                   {"experiment", c.experiment},
                   {"n", c.n},
                   {"betas", c.betas},
                   {"replicas", c.replicas},
                   {"seed", c.seed},
                   {"threads", c.threads},
                   {"out", c.out},
                   {"grid", c.grid},
                   {"delta_fraction", c.delta_fraction}};
  if (c.k) j["k"] = *c.k;
  if (c.ell) j["ell"] = *c.ell;
  if (c.m_max) j["m_max"] = *c.m_max;
  if (c.budget) j["budget"] = *c.budget;
  if (c.window) j["window"] = *c.window;
  if (!c.dump_cycles.empty()) j["dump_cycles"] = c.dump_cycles;
  if (!c.dump_bridges.empty()) j["dump_bridges"] = c.dump_bridges;
  if (!c.series_csv.empty()) j["series_csv"] = c.series_csv;
  if (c.experiment == "crw-trace") {
    j["start"] = {c.start.x, c.start.y};
    j["start_height"] = c.start_height;
  }
  return j;
}

// Strict parse: unknown keys are rejected so config typos fail loudly.
inline ExperimentConfig config_from_json(const nlohmann::json& doc) {
  static const char* known[] = {"schema",      "experiment", "n",           "beta",
                                "betas",       "replicas",   "seed",        "threads",
                                "out",         "grid",       "k",           "ell",
                                "m_max",       "budget",     "window",      "delta_fraction",
                                "start",       "start_height", "dump_cycles", "dump_bridges",
                                "series_csv"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool ok = false;
    for (const char* key : known) ok = ok || it.key() == key;
    if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }
  ExperimentConfig c;
  if (doc.contains("experiment")) c.experiment = doc["experiment"].get<std::string>();
  if (doc.contains("n")) c.n = doc["n"].get<int>();
  if (doc.contains("beta")) c.betas = {doc["beta"].get<double>()};
  if (doc.contains("betas")) c.betas = doc["betas"].get<std::vector<double>>();
  if (doc.contains("replicas")) c.replicas = doc["replicas"].get<int>();
  if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("threads")) c.threads = doc["threads"].get<int>();
  if (doc.contains("out")) c.out = doc["out"].get<std::string>();
  if (doc.contains("grid")) c.grid = doc["grid"].get<std::string>();
  if (doc.contains("k")) c.k = doc["k"].get<int>();
  if (doc.contains("ell")) c.ell = doc["ell"].get<int>();
  if (doc.contains("m_max")) c.m_max = doc["m_max"].get<int>();
  if (doc.contains("budget")) c.budget = doc["budget"].get<int>();
  if (doc.contains("window")) c.window = doc["window"].get<double>();
  if (doc.contains("delta_fraction")) c.delta_fraction = doc["delta_fraction"].get<double>();
  if (doc.contains("start")) {
    const auto& s = doc["start"];
    c.start = Vertex{s.at(0).get<std::int32_t>(), s.at(1).get<std::int32_t>()};
  }
  if (doc.contains("start_height")) c.start_height = doc["start_height"].get<double>();
  if (doc.contains("dump_cycles")) c.dump_cycles = doc["dump_cycles"].get<std::string>();
  if (doc.contains("dump_bridges")) c.dump_bridges = doc["dump_bridges"].get<std::string>();
  if (doc.contains("series_csv")) c.series_csv = doc["series_csv"].get<std::string>();
  return c;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: parse error in '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

// One experiment's persisted result. Aggregates are recomputable from the
// per-replica rows; wall clock is excluded when comparing runs for identity.
struct RunRecord {
  std::string experiment;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  nlohmann::json per_replica = nlohmann::json::array();
  nlohmann::json aggregate = nlohmann::json::object();
  nlohmann::json notes = nlohmann::json::array();
  double wall_clock_ms = 0.0;

  nlohmann::json to_json(bool with_wall_clock = true) const {
    nlohmann::json j{{"schema", kSchemaId},
                     {"library_version", kLibraryVersion},
                     {"experiment", experiment},
                     {"seed", seed},
                     {"config", config},
                     {"per_replica", per_replica},
                     {"aggregate", aggregate},
                     {"notes", notes}};
    if (with_wall_clock) j["wall_clock_ms"] = wall_clock_ms;
    return j;
  }
};

}  // namespace stirring
