#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STIRRING_CLI_PATH) + " " + args + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

nlohmann::json read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line).good());
  return nlohmann::json::parse(line);
}

struct TmpDir {
  fs::path path;
  TmpDir() : path(fs::temp_directory_path() / "stirring_cli_test") {
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("selftest exits zero", "[cli]") { CHECK(run_cli("selftest") == 0); }

TEST_CASE("usage errors exit with status 2", "[cli]") {
  CHECK(run_cli("") == 2);                        // missing subcommand
  CHECK(run_cli("phase-sweep --no-such-flag") == 2);
  CHECK(run_cli("phase-sweep --n 1 --replicas 2") == 2);  // invalid n
  CHECK(run_cli("line-tail --config /nonexistent.json") == 2);
}

TEST_CASE("repeated invocations are byte-identical up to wall clock", "[cli]") {
  TmpDir tmp;
  const std::string cmd = "phase-sweep --n 12 --beta 0.3,0.8 --replicas 10 --seed 7 --out " +
                          (tmp.path / "a").string();
  auto slurp = [&](const fs::path& p) {
    std::ifstream f(p);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  };
  REQUIRE(run_cli(cmd) == 0);
  auto first = read_jsonl(tmp.path / "a.jsonl");
  const std::string first_csv = slurp(tmp.path / "a.csv");
  REQUIRE(run_cli(cmd) == 0);
  auto second = read_jsonl(tmp.path / "a.jsonl");
  const std::string second_csv = slurp(tmp.path / "a.csv");

  first.erase("wall_clock_ms");
  second.erase("wall_clock_ms");
  CHECK(first.dump() == second.dump());
  CHECK(first_csv == second_csv);
  CHECK_FALSE(first_csv.empty());
}

TEST_CASE("thread count does not change the record", "[cli]") {
  TmpDir tmp;
  const std::string base = "iota-orbit --n 8 --beta 0.6 --replicas 12 --seed 9 ";
  REQUIRE(run_cli(base + "--threads 1 --out " + (tmp.path / "t1").string()) == 0);
  REQUIRE(run_cli(base + "--threads 4 --out " + (tmp.path / "t4").string()) == 0);
  auto a = read_jsonl(tmp.path / "t1.jsonl");
  auto b = read_jsonl(tmp.path / "t4.jsonl");
  a.erase("wall_clock_ms");
  b.erase("wall_clock_ms");
  for (auto* doc : {&a, &b}) {  // only these fields may differ between the runs
    doc->at("config").erase("threads");
    doc->at("config").erase("out");
  }
  CHECK(a.dump() == b.dump());
}

TEST_CASE("crw-trace emits a run record with the expected keys", "[cli]") {
  TmpDir tmp;
  const std::string out = (tmp.path / "trace").string();
  const std::string bridges = (tmp.path / "bridges.json").string();
  REQUIRE(run_cli("crw-trace --n 6 --beta 0.5 --seed 4 --start 2,3 --out " + out +
                  " --dump-bridges " + bridges) == 0);
  const auto doc = read_jsonl(tmp.path / "trace.jsonl");
  CHECK(doc.contains("start"));
  CHECK(doc.contains("discovery_order"));
  CHECK(doc.contains("closed"));
  CHECK(doc.contains("top_crossings"));
  CHECK(doc["start"]["x"].get<int>() == 2);
  CHECK(doc["start"]["y"].get<int>() == 3);
  CHECK(doc["closed"].get<bool>());  // default budget runs to closure

  std::ifstream bf(bridges);
  nlohmann::json bridge_doc;
  bf >> bridge_doc;
  CHECK(bridge_doc["n"].get<int>() == 6);
  CHECK(bridge_doc.contains("bridges"));
}

TEST_CASE("coupling subcommand writes the series CSV and runs from identity", "[cli]") {
  TmpDir tmp;
  const std::string csv = (tmp.path / "series.csv").string();
  const std::string out = (tmp.path / "cw").string();
  REQUIRE(run_cli("coupling --n 8 --beta 0.8 --replicas 3 --seed 5 --series-csv " + csv +
                  " --out " + out) == 0);
  std::ifstream f(csv);
  std::string header;
  REQUIRE(std::getline(f, header).good());
  CHECK(header == "u,mass_sigma,mass_graph,discrepancy,frag_count");

  const std::string out2 = (tmp.path / "sc").string();
  REQUIRE(run_cli("coupling --from-identity --n 8 --beta 0.3 --replicas 3 --seed 5 --out " +
                  out2) == 0);
  const auto doc = read_jsonl(tmp.path / "sc.jsonl");
  CHECK(doc["experiment"].get<std::string>() == "subcritical-containment");
  CHECK(doc["aggregate"]["containment_violations"].get<int>() == 0);
}

TEST_CASE("config file drives the run and flags override it", "[cli]") {
  TmpDir tmp;
  const fs::path cfg_path = tmp.path / "cfg.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"n": 8, "beta": 0.4, "replicas": 6, "seed": 11})";
  }
  const std::string out1 = (tmp.path / "c1").string();
  const std::string out2 = (tmp.path / "c2").string();
  REQUIRE(run_cli("phase-sweep --config " + cfg_path.string() + " --out " + out1) == 0);
  const auto doc1 = read_jsonl(tmp.path / "c1.jsonl");
  CHECK(doc1["config"]["n"].get<int>() == 8);
  CHECK(doc1["per_replica"].size() == 6);

  REQUIRE(run_cli("phase-sweep --config " + cfg_path.string() + " --replicas 3 --out " +
                  out2) == 0);
  const auto doc2 = read_jsonl(tmp.path / "c2.jsonl");
  CHECK(doc2["per_replica"].size() == 3);
}
