// Command-line harness for the interchange-process simulation library.
//
// Exit codes: 0 success, 2 bad configuration or usage, 3 runtime defect
// (an internal invariant failed), 1 other runtime errors (I/O and similar).

#include <deque>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stirring/harness.hpp"
#include "stirring/io.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  int n = 0;
  std::vector<double> betas;
  int replicas = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  int k = 0;
  int ell = 0;
  int m_max = 0;
  int budget = 0;
  double window = 0.0;
  double delta_fraction = 0.0;
  std::string grid;
  std::vector<std::int32_t> start;
  double start_height = 0.0;
  std::string dump_cycles;
  std::string dump_bridges;
  std::string series_csv;
  bool from_identity = false;
};

void add_common_options(CLI::App* sub, CliOverrides& o) {
  sub->add_option("--config", o.config_path, "JSON config file; flags override its fields");
  sub->add_option("--n", o.n, "lattice side length");
  sub->add_option("--beta", o.betas, "beta grid, t = beta*n^2 (comma separated)")
      ->delimiter(',');
  sub->add_option("--replicas", o.replicas, "independent replicas");
  sub->add_option("--seed", o.seed, "run seed (replica r uses a stream derived from (seed, r))");
  sub->add_option("--threads", o.threads, "worker threads, 0 = hardware");
  sub->add_option("--out", o.out, "output path prefix (<out>.jsonl, <out>.csv)");
}

// Whether the user passed an option that this subcommand actually defines.
bool passed(const CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

// Defaults, then config file, then explicit flags.
stirring::ExperimentConfig resolve_config(const CLI::App* sub, const CliOverrides& o,
                                          const std::string& experiment) {
  stirring::ExperimentConfig cfg;
  if (passed(sub, "--config")) cfg = stirring::load_config_file(o.config_path);
  cfg.experiment = experiment;
  if (passed(sub, "--n")) cfg.n = o.n;
  if (passed(sub, "--beta")) cfg.betas = o.betas;
  if (passed(sub, "--replicas")) cfg.replicas = o.replicas;
  if (passed(sub, "--seed")) cfg.seed = o.seed;
  if (passed(sub, "--threads")) cfg.threads = o.threads;
  if (passed(sub, "--out")) cfg.out = o.out;
  if (passed(sub, "--k")) cfg.k = o.k;
  if (passed(sub, "--ell")) cfg.ell = o.ell;
  if (passed(sub, "--m-max")) cfg.m_max = o.m_max;
  if (passed(sub, "--budget")) cfg.budget = o.budget;
  if (passed(sub, "--window")) cfg.window = o.window;
  if (passed(sub, "--delta-fraction")) cfg.delta_fraction = o.delta_fraction;
  if (passed(sub, "--grid")) cfg.grid = o.grid;
  if (passed(sub, "--start")) {
    if (o.start.size() != 2) throw std::invalid_argument("--start expects x,y");
    cfg.start = stirring::Vertex{o.start[0], o.start[1]};
  }
  if (passed(sub, "--height")) cfg.start_height = o.start_height;
  if (passed(sub, "--dump-cycles")) cfg.dump_cycles = o.dump_cycles;
  if (passed(sub, "--dump-bridges")) cfg.dump_bridges = o.dump_bridges;
  if (passed(sub, "--series-csv")) cfg.series_csv = o.series_csv;
  cfg.validate();
  return cfg;
}

int run_crw_trace(const stirring::ExperimentConfig& cfg) {
  using namespace stirring;
  RandomStream rng = RandomStream(cfg.seed).substream(0);
  const double t = cfg.t_for(cfg.betas.front());
  const BridgeSet bridges = sample_bridges(cfg.n, t, rng);
  if (cfg.start_height > bridges.horizon())
    throw std::invalid_argument("crw-trace: start height above the horizon");
  const std::int32_t budget = cfg.budget.value_or(cfg.n * cfg.n);
  const CrwRun run =
      run_crw(bridges, SpaceTimePoint{cfg.start, cfg.start_height}, budget);
  const nlohmann::json line = crw_run_to_json(run);
  if (cfg.out.empty()) {
    std::cout << line.dump() << '\n';
  } else {
    std::ofstream f(cfg.out + ".jsonl");
    if (!f) throw std::runtime_error("crw-trace: cannot open output");
    f << line.dump() << '\n';
  }
  if (!cfg.dump_bridges.empty()) {
    std::ofstream f(cfg.dump_bridges);
    if (!f) throw std::runtime_error("crw-trace: cannot open bridge dump");
    f << bridge_set_to_json(bridges).dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stirring-lab: interchange-process experiments on the 2-d Hamming graph"};
  app.require_subcommand(1);

  struct SubcommandSpec {
    const char* name;
    const char* description;
  };
  const SubcommandSpec experiments[] = {
      {"phase-sweep", "long-cycle fraction and max cycle across a beta grid"},
      {"line-tail", "survival function of the walk trace's row-0 intersection"},
      {"iota-orbit", "max line-concentration of orbit prefixes"},
      {"split-rate", "uniform-edge split-to-small probability against its bound"},
      {"coupling", "graph-process coupling over a window [t, t+Delta]"},
  };

  // deque: CLI11 binds option targets by address, so slots must never move
  std::deque<std::pair<CLI::App*, CliOverrides>> subs;
  for (const auto& entry : experiments) {
    CLI::App* sub = app.add_subcommand(entry.name, entry.description);
    subs.emplace_back(sub, CliOverrides{});
    CliOverrides& o = subs.back().second;
    add_common_options(sub, o);
    sub->add_option("--k", o.k, "prefix length / trace target");
    sub->add_option("--ell", o.ell, "cycle/component size threshold");
    if (std::string(entry.name) == "line-tail")
      sub->add_option("--m-max", o.m_max, "largest survival level reported");
    if (std::string(entry.name) == "coupling") {
      sub->add_option("--window", o.window, "window Delta (default (n^2/ell) log n)");
      sub->add_option("--delta-fraction", o.delta_fraction,
                      "track sprinkling at threshold ceil(delta*n^2/8)");
      sub->add_option("--grid", o.grid, "sampling grid: auto|event|fixed");
      sub->add_option("--series-csv", o.series_csv, "CSV of replica 0's coupled series");
      sub->add_flag("--from-identity", o.from_identity,
                    "start the coupling at t=0 from the identity");
    }
    if (std::string(entry.name) == "phase-sweep")
      sub->add_option("--dump-cycles", o.dump_cycles, "cycle-structure JSONL per replica");
  }

  CLI::App* crw_sub = app.add_subcommand("crw-trace", "trace one cyclic random walk");
  subs.emplace_back(crw_sub, CliOverrides{});
  {
    CliOverrides& o = subs.back().second;
    add_common_options(crw_sub, o);
    crw_sub->add_option("--start", o.start, "start vertex x,y")->delimiter(',');
    crw_sub->add_option("--height", o.start_height, "start height");
    crw_sub->add_option("--budget", o.budget, "trace budget (default n^2: run to closure)");
    crw_sub->add_option("--dump-bridges", o.dump_bridges, "write the bridge configuration");
  }

  CLI::App* selftest = app.add_subcommand("selftest", "run the exact-identity suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (selftest->parsed()) return stirring::run_selftest(std::cout);
    for (auto& [sub, overrides] : subs) {
      if (!sub->parsed()) continue;
      const std::string name = sub->get_name();
      stirring::ExperimentConfig cfg = resolve_config(sub, overrides, name);
      if (name == "crw-trace") return run_crw_trace(cfg);
      if (name == "coupling" && overrides.from_identity)
        cfg.experiment = "subcritical-containment";
      const stirring::RunRecord rec = stirring::run_experiment(cfg);
      for (const auto& note : rec.notes)
        std::cerr << "note: " << note.get<std::string>() << '\n';
      stirring::write_run_record(rec, cfg.out);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "defect: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
