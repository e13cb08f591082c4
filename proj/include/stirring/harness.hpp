#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "stirring/config.hpp"
#include "stirring/coupling.hpp"
#include "stirring/crw.hpp"
#include "stirring/dynamics.hpp"
#include "stirring/io.hpp"
#include "stirring/parallel.hpp"
#include "stirring/stats.hpp"

namespace stirring {

// Smallest integer >= n^(3/2), computed in integer arithmetic so perfect
// squares do not fall to floating-point noise.
inline std::int64_t long_cycle_threshold(int n) {
  const std::int64_t cube = static_cast<std::int64_t>(n) * n * n;
  auto m = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(cube))));
  while (m * m < cube) ++m;
  while (m > 1 && (m - 1) * (m - 1) >= cube) --m;
  return m;
}

inline double log_squared(int n) {
  const double l = std::log(static_cast<double>(n));
  return l * l;
}

// ceil(n / log n), the orbit-prefix length used by the isoperimetry and
// split-rate experiments.
inline int default_prefix_length(int n) {
  return static_cast<int>(std::ceil(static_cast<double>(n) / std::log(static_cast<double>(n))));
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline SampleGrid resolve_grid(const ExperimentConfig& cfg) {
  if (cfg.grid == "event") return SampleGrid::event();
  if (cfg.grid == "fixed") return SampleGrid::fixed(512);
  return SampleGrid::auto_for(cfg.n);
}

inline nlohmann::json mean_ci_json(const MeanCi& m) {
  return nlohmann::json{{"mean", m.mean}, {"ci95", {m.lo, m.hi}}, {"stddev", m.stddev}};
}

inline nlohmann::json binomial_json(const BinomialCi& b) {
  return nlohmann::json{
      {"p_hat", b.p_hat}, {"ci95", {b.lo, b.hi}}, {"successes", b.successes}};
}

}  // namespace detail

// --- phase-sweep -----------------------------------------------------------
//
// For each beta on the grid: the mean fraction of vertices lying in cycles
// of length >= ceil(n^{3/2}) and the mean/median largest cycle, across
// independent replicas of sigma_{beta n^2}.
inline RunRecord phase_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  const int n = cfg.n;
  const auto threshold = static_cast<std::int32_t>(long_cycle_threshold(n));
  const double denom = static_cast<double>(n) * n;
  RandomStream base(cfg.seed);

  RunRecord rec;
  rec.experiment = "phase-sweep";
  rec.seed = cfg.seed;
  rec.config = config_to_json(cfg);
  rec.config["long_cycle_threshold"] = threshold;

  std::ofstream cycles_out;
  if (!cfg.dump_cycles.empty()) {
    cycles_out.open(cfg.dump_cycles);
    if (!cycles_out) throw std::runtime_error("phase-sweep: cannot open dump_cycles path");
  }

  nlohmann::json per_beta = nlohmann::json::array();
  for (std::size_t bi = 0; bi < cfg.betas.size(); ++bi) {
    const double beta = cfg.betas[bi];
    const double t = cfg.t_for(beta);
    std::vector<double> fracs(cfg.replicas), max_cycles(cfg.replicas);
    std::vector<std::string> cycle_lines(cycles_out.is_open() ? cfg.replicas : 0);
    parallel_replicas(cfg.replicas, cfg.threads, [&](int r) {
      RandomStream rng = base.substream(bi * static_cast<std::uint64_t>(cfg.replicas) + r);
      const BridgeSet bridges = sample_bridges(n, t, rng);
      const Permutation sigma = permutation_from_bridges(bridges);
      const CycleIndex idx(sigma);
      fracs[r] = static_cast<double>(idx.mass_at_least(threshold)) / denom;
      max_cycles[r] = idx.max_cycle_size();
      if (!cycle_lines.empty()) cycle_lines[r] = cycle_structure_json(idx, t).dump();
    });
    // written in replica order so the dump is as reproducible as the record
    for (const std::string& line : cycle_lines) cycles_out << line << '\n';
    for (int r = 0; r < cfg.replicas; ++r) {
      rec.per_replica.push_back({{"beta", beta},
                                 {"replica", r},
                                 {"long_frac", fracs[r]},
                                 {"max_cycle", max_cycles[r]}});
    }
    per_beta.push_back({{"beta", beta},
                        {"t", t},
                        {"long_frac", detail::mean_ci_json(mean_ci95(fracs))},
                        {"max_cycle", detail::mean_ci_json(mean_ci95(max_cycles))},
                        {"max_cycle_median", median(max_cycles)}});
  }
  rec.aggregate = {{"long_cycle_threshold", threshold}, {"per_beta", per_beta}};
  rec.wall_clock_ms = clock.ms();
  return rec;
}

// --- line-tail ---------------------------------------------------------------
//
// Empirical survival function of |Z_k ∩ L_0| over walks started at (v,0)
// with v uniform, each on a fresh bridge configuration. When the walk closes
// before discovering k vertices the full trace is profiled instead.
inline RunRecord line_tail(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  const int n = cfg.n;
  const int k = cfg.k.value_or(n / 2);
  const int m_max = cfg.m_max.value_or(12);
  const double beta = cfg.betas.front();
  const double t = cfg.t_for(beta);
  RandomStream base(cfg.seed);

  RunRecord rec;
  rec.experiment = "line-tail";
  rec.seed = cfg.seed;
  rec.config = config_to_json(cfg);
  rec.config["k"] = k;
  rec.config["m_max"] = m_max;
  if (k > n / 2)
    rec.notes.push_back("k exceeds n/2, outside the geometric-decay hypothesis; running anyway");

  std::vector<std::int32_t> counts(cfg.replicas);
  std::vector<std::uint8_t> realized(cfg.replicas);
  parallel_replicas(cfg.replicas, cfg.threads, [&](int r) {
    RandomStream rng = base.substream(static_cast<std::uint64_t>(r));
    const auto vid = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(n) * n));
    const BridgeSet bridges = sample_bridges(n, t, rng);
    const CrwRun run = run_crw(bridges, SpaceTimePoint{vertex_from_id(vid, n), 0.0}, k);
    const std::int32_t realized_k = std::min<std::int32_t>(k, run.trace_size());
    counts[r] = line_profile(run, realized_k).rows[0];
    realized[r] = t_k_realized(run, k) ? 1 : 0;
  });

  for (int r = 0; r < cfg.replicas; ++r) {
    rec.per_replica.push_back(
        {{"replica", r}, {"row0_count", counts[r]}, {"t_k_realized", realized[r] != 0}});
  }

  nlohmann::json survival = nlohmann::json::array();
  std::vector<int> survivors(m_max + 1, 0);
  for (std::int32_t c : counts)
    for (int m = 1; m <= m_max; ++m)
      if (c >= m) ++survivors[m];
  for (int m = 1; m <= m_max; ++m) {
    const BinomialCi ci = binomial_ci95(survivors[m], cfg.replicas);
    survival.push_back({{"m", m}, {"count", survivors[m]}, {"survival", detail::binomial_json(ci)}});
  }
  // Fitted two-step decay ratio over the well-supported range (>= 100 hits),
  // plus the least-squares slope of log survival against M on that range.
  double ratio_max = 0.0;
  bool any_ratio = false;
  for (int m = 1; m + 2 <= m_max; ++m) {
    if (survivors[m] >= 100) {
      ratio_max = std::max(ratio_max,
                           static_cast<double>(survivors[m + 2]) / survivors[m]);
      any_ratio = true;
    }
  }
  double slope_num = 0.0, slope_den = 0.0, mean_m = 0.0, mean_log = 0.0;
  int supported = 0;
  for (int m = 1; m <= m_max; ++m)
    if (survivors[m] >= 100) ++supported;
  if (supported >= 2) {
    for (int m = 1; m <= m_max; ++m) {
      if (survivors[m] < 100) continue;
      mean_m += m;
      mean_log += std::log(static_cast<double>(survivors[m]) / cfg.replicas);
    }
    mean_m /= supported;
    mean_log /= supported;
    for (int m = 1; m <= m_max; ++m) {
      if (survivors[m] < 100) continue;
      const double log_s = std::log(static_cast<double>(survivors[m]) / cfg.replicas);
      slope_num += (m - mean_m) * (log_s - mean_log);
      slope_den += (m - mean_m) * (m - mean_m);
    }
  }
  rec.aggregate = {{"k", k},
                   {"t", t},
                   {"survival", survival},
                   {"decay_ratio_max", any_ratio ? nlohmann::json(ratio_max) : nlohmann::json()},
                   {"log_survival_slope", supported >= 2 && slope_den > 0.0
                                              ? nlohmann::json(slope_num / slope_den)
                                              : nlohmann::json()},
                   {"support_min_count", 100}};
  rec.wall_clock_ms = clock.ms();
  return rec;
}

// --- iota-orbit --------------------------------------------------------------
//
// Per replica, the maximum over all vertices of iota(orb^k(v)) for
// sigma_{beta n^2}; reports the empirical probability that this maximum
// reaches log^2 n.
inline RunRecord iota_orbit(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  const int n = cfg.n;
  const int k = cfg.k.value_or(default_prefix_length(n));
  const double beta = cfg.betas.front();
  const double t = cfg.t_for(beta);
  const double threshold = log_squared(n);
  RandomStream base(cfg.seed);

  RunRecord rec;
  rec.experiment = "iota-orbit";
  rec.seed = cfg.seed;
  rec.config = config_to_json(cfg);
  rec.config["k"] = k;

  std::vector<std::int32_t> maxima(cfg.replicas);
  parallel_replicas(cfg.replicas, cfg.threads, [&](int r) {
    RandomStream rng = base.substream(static_cast<std::uint64_t>(r));
    const BridgeSet bridges = sample_bridges(n, t, rng);
    const Permutation sigma = permutation_from_bridges(bridges);
    VertexSet prefix(n);
    std::int32_t max_iota = 0;
    for (std::int32_t vid = 0; vid < sigma.vertex_count(); ++vid) {
      orbit_prefix_into(sigma, vertex_from_id(vid, n), k, OrbitDirection::Forward, prefix);
      max_iota = std::max(max_iota, iota(prefix));
    }
    maxima[r] = max_iota;
  });

  int exceed = 0;
  for (int r = 0; r < cfg.replicas; ++r) {
    const bool over = static_cast<double>(maxima[r]) >= threshold;
    exceed += over ? 1 : 0;
    rec.per_replica.push_back({{"replica", r}, {"max_iota", maxima[r]}, {"exceeds", over}});
  }
  rec.aggregate = {{"k", k},
                   {"t", t},
                   {"log2n_threshold", threshold},
                   {"p_exceed", detail::binomial_json(binomial_ci95(exceed, cfg.replicas))}};
  rec.wall_clock_ms = clock.ms();
  return rec;
}

// --- split-rate --------------------------------------------------------------
//
// Exact per-replica probability that a uniform edge-swap splits a cycle of
// sigma_{beta n^2} leaving a piece smaller than ell, conditioned on replicas
// with max iota(orb^k) <= log^2 n, against the bound 4 ell log^2 n / (k n).
inline RunRecord split_rate(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  const int n = cfg.n;
  const int k = cfg.k.value_or(default_prefix_length(n));
  const int ell = cfg.ell.value_or(k);
  const double beta = cfg.betas.front();
  const double t = cfg.t_for(beta);
  const double iota_threshold = log_squared(n);
  const double bound = 4.0 * ell * log_squared(n) / (static_cast<double>(k) * n);
  RandomStream base(cfg.seed);

  RunRecord rec;
  rec.experiment = "split-rate";
  rec.seed = cfg.seed;
  rec.config = config_to_json(cfg);
  rec.config["k"] = k;
  rec.config["ell"] = ell;
  if (ell < k)
    rec.notes.push_back("ell below k, outside the split-bound hypothesis; running anyway");

  std::vector<double> probs(cfg.replicas);
  std::vector<std::int32_t> maxima(cfg.replicas);
  parallel_replicas(cfg.replicas, cfg.threads, [&](int r) {
    RandomStream rng = base.substream(static_cast<std::uint64_t>(r));
    const BridgeSet bridges = sample_bridges(n, t, rng);
    const Permutation sigma = permutation_from_bridges(bridges);
    const CycleIndex idx(sigma);
    probs[r] = split_small_probability(sigma, idx, ell);
    VertexSet prefix(n);
    std::int32_t max_iota = 0;
    for (std::int32_t vid = 0; vid < sigma.vertex_count(); ++vid) {
      orbit_prefix_into(sigma, vertex_from_id(vid, n), k, OrbitDirection::Forward, prefix);
      max_iota = std::max(max_iota, iota(prefix));
    }
    maxima[r] = max_iota;
  });

  int conditioned = 0, within = 0;
  for (int r = 0; r < cfg.replicas; ++r) {
    const bool cond = static_cast<double>(maxima[r]) <= iota_threshold;
    if (cond) {
      ++conditioned;
      if (probs[r] <= bound) ++within;
    }
    rec.per_replica.push_back({{"replica", r},
                               {"split_small_prob", probs[r]},
                               {"max_iota", maxima[r]},
                               {"conditioned", cond}});
  }
  rec.aggregate = {
      {"k", k},
      {"ell", ell},
      {"t", t},
      {"bound", bound},
      {"conditioned_replicas", conditioned},
      {"frac_within_bound",
       conditioned > 0 ? nlohmann::json(static_cast<double>(within) / conditioned)
                       : nlohmann::json()}};
  rec.wall_clock_ms = clock.ms();
  return rec;
}

// --- coupling ---------------------------------------------------------------
//
// Coupled window [t, t+Delta]: sup over the sampled grid of the discrepancy
// |V^G(ell) \ V(ell)|, the fragmentation count, and (when delta_fraction is
// set) the sprinkling time at threshold ceil(delta n^2 / 8).
inline RunRecord coupling_window(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  const int n = cfg.n;
  const int ell = cfg.ell.value_or(n);
  const int k = cfg.k.value_or(std::min(ell, default_prefix_length(n)));
  const double beta = cfg.betas.front();
  const double t = cfg.t_for(beta);
  const double delta =
      cfg.window.value_or(static_cast<double>(n) * n / ell * std::log(static_cast<double>(n)));
  const double k_bound = std::min(static_cast<double>(ell),
                                  static_cast<double>(n) / std::log(static_cast<double>(n)));
  const double bound = 4.0 * ell * static_cast<double>(ell) * delta * log_squared(n) /
                       (k_bound * static_cast<double>(n));
  const std::int32_t sprinkle_threshold =
      cfg.delta_fraction > 0.0
          ? static_cast<std::int32_t>(std::ceil(cfg.delta_fraction * n * n / 8.0))
          : 0;
  const SampleGrid grid = detail::resolve_grid(cfg);
  RandomStream base(cfg.seed);

  RunRecord rec;
  rec.experiment = "coupling";
  rec.seed = cfg.seed;
  rec.config = config_to_json(cfg);
  rec.config["ell"] = ell;
  rec.config["k"] = k;
  rec.config["window"] = delta;

  std::vector<std::int64_t> sups(cfg.replicas), frags(cfg.replicas);
  std::vector<double> sprinkle(cfg.replicas, -1.0);  // -1 = never reached
  CoupledSeries first_series;
  parallel_replicas(cfg.replicas, cfg.threads, [&](int r) {
    RandomStream rng = base.substream(static_cast<std::uint64_t>(r));
    BridgeSet bridges = sample_bridges(n, t, rng);
    bridges = extend(bridges, t + delta, rng);
    const CoupledSeries series = run_coupled(bridges, t, delta, ell, k, grid, sprinkle_threshold);
    sups[r] = series.sup_discrepancy;
    frags[r] = static_cast<std::int64_t>(series.fragmentations.size());
    if (sprinkle_threshold > 0) {
      if (auto s = sprinkling_time(series, cfg.delta_fraction)) sprinkle[r] = *s;
    }
    if (r == 0 && !cfg.series_csv.empty()) first_series = series;
  });
  if (!cfg.series_csv.empty()) {
    std::ofstream csv(cfg.series_csv);
    if (!csv) throw std::runtime_error("coupling: cannot open series_csv path");
    write_coupled_series_csv(csv, first_series);
  }

  std::vector<double> sup_values;
  int within = 0, sprinkled_in_window = 0, sprinkled = 0;
  for (int r = 0; r < cfg.replicas; ++r) {
    sup_values.push_back(static_cast<double>(sups[r]));
    if (static_cast<double>(sups[r]) <= bound) ++within;
    if (sprinkle[r] >= 0.0) {
      ++sprinkled;
      if (sprinkle[r] <= delta) ++sprinkled_in_window;
    }
    nlohmann::json row{{"replica", r},
                       {"sup_discrepancy", sups[r]},
                       {"frag_count", frags[r]}};
    if (sprinkle_threshold > 0)
      row["sprinkling_time"] = sprinkle[r] >= 0.0 ? nlohmann::json(sprinkle[r]) : nlohmann::json();
    rec.per_replica.push_back(row);
  }
  rec.aggregate = {{"ell", ell},
                   {"k", k},
                   {"t", t},
                   {"window", delta},
                   {"sup_discrepancy", detail::mean_ci_json(mean_ci95(sup_values))},
                   {"bound", bound},
                   {"frac_within_bound", static_cast<double>(within) / cfg.replicas}};
  if (sprinkle_threshold > 0) {
    rec.aggregate["sprinkle_threshold"] = sprinkle_threshold;
    rec.aggregate["sprinkle_frac_within_window"] =
        static_cast<double>(sprinkled_in_window) / cfg.replicas;
    rec.aggregate["sprinkle_reached"] = sprinkled;
  }
  rec.wall_clock_ms = clock.ms();
  return rec;
}

// --- subcritical containment --------------------------------------------------
//
// Coupling from identity at t=0 run out to beta n^2: exact containment of
// every cycle in its component, with the largest cycle and component
// reported per replica.
inline RunRecord subcritical_containment(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  const int n = cfg.n;
  const double beta = cfg.betas.front();
  const double t = cfg.t_for(beta);
  const int ell =
      cfg.ell.value_or(static_cast<int>(std::ceil(2.0 * std::log(static_cast<double>(n)))));
  const SampleGrid grid = detail::resolve_grid(cfg);
  RandomStream base(cfg.seed);

  RunRecord rec;
  rec.experiment = "subcritical-containment";
  rec.seed = cfg.seed;
  rec.config = config_to_json(cfg);
  rec.config["ell"] = ell;
  if (beta >= 0.5)
    rec.notes.push_back("beta is not below 1/2; the subcritical hypothesis does not apply");

  std::vector<std::int32_t> max_cycle(cfg.replicas), max_comp(cfg.replicas);
  parallel_replicas(cfg.replicas, cfg.threads, [&](int r) {
    RandomStream rng = base.substream(static_cast<std::uint64_t>(r));
    BridgeSet bridges = sample_bridges(n, t, rng);
    // run_coupled from t=0 starts at the identity, whose cycles are the
    // singletons; containment is checked at every sample and at the end.
    const CoupledSeries series = run_coupled(bridges, 0.0, t, ell, ell, grid);
    max_cycle[r] = series.max_cycle_end;
    max_comp[r] = series.max_component_end;
  });

  std::vector<double> cycles_d, comps_d;
  bool ordered = true;
  for (int r = 0; r < cfg.replicas; ++r) {
    cycles_d.push_back(max_cycle[r]);
    comps_d.push_back(max_comp[r]);
    ordered = ordered && max_cycle[r] <= max_comp[r];
    rec.per_replica.push_back(
        {{"replica", r}, {"max_cycle", max_cycle[r]}, {"max_component", max_comp[r]}});
  }
  if (!ordered)
    throw std::logic_error("subcritical-containment: a cycle outgrew its component");
  rec.aggregate = {{"ell", ell},
                   {"t", t},
                   {"max_cycle_median", median(cycles_d)},
                   {"max_component_median", median(comps_d)},
                   {"max_cycle", detail::mean_ci_json(mean_ci95(cycles_d))},
                   {"max_component", detail::mean_ci_json(mean_ci95(comps_d))},
                   {"containment_violations", 0}};
  rec.wall_clock_ms = clock.ms();
  return rec;
}

// --- selftest ----------------------------------------------------------------
//
// Exact-identity suites: the combinatorial lattice identities, the
// transposition-composition oracle for sigma_t, the walk/orbit agreement,
// and the union-find versus graph-search partition. Returns 0 on success.
inline int run_selftest(std::ostream& log) {
  int failures = 0;
  auto check = [&](bool ok, const char* what) {
    log << (ok ? "  ok    " : "  FAIL  ") << what << '\n';
    if (!ok) ++failures;
  };

  {  // lattice identities on random sets
    RandomStream rng(1001);
    bool identities = true, row_identity = true, isoperimetry = true;
    for (int iter = 0; iter < 200 && identities && row_identity && isoperimetry; ++iter) {
      const int n = 3 + static_cast<int>(rng.next_below(6));
      VertexSet a(n), b(n);
      const double pa = rng.next_unit() * 0.6, pb = rng.next_unit() * 0.6;
      for (std::int32_t vid = 0; vid < n * n; ++vid) {
        if (rng.next_unit() < pa) a.insert(vertex_from_id(vid, n));
        if (rng.next_unit() < pb) b.insert(vertex_from_id(vid, n));
      }
      std::int64_t total = 0, row_total = 0;
      for (std::int32_t vid = 0; vid < n * n; ++vid) {
        const Vertex v = vertex_from_id(vid, n);
        const VertexSet shifted = translate(v, a);
        std::int64_t inter = 0;
        for (Vertex w : shifted.members()) inter += b.contains(w) ? 1 : 0;
        total += inter;
        if (v.y == 0) row_total += inter;
      }
      identities = identities &&
                   total == static_cast<std::int64_t>(a.size()) * b.size();
      std::int64_t rhs = 0;
      for (int i = 0; i < n; ++i)
        rhs += static_cast<std::int64_t>(a.row_count(i)) * b.row_count(i);
      row_identity = row_identity && row_total == rhs;
      isoperimetry = isoperimetry &&
                     edges_between(a, a) <=
                         static_cast<std::uint64_t>(a.size()) * static_cast<std::uint64_t>(iota(a));
    }
    check(identities, "translation sum identity");
    check(row_identity, "row-restricted sum identity");
    check(isoperimetry, "within-set edge bound");
  }

  {  // permutation and walk oracles
    RandomStream rng(1002);
    bool perm_ok = true, orbit_ok = true;
    for (int iter = 0; iter < 60 && perm_ok && orbit_ok; ++iter) {
      const int n = 4 + static_cast<int>(rng.next_below(3));
      RandomStream sub = rng.substream(iter);
      const double t = n * n * sub.next_unit();
      const BridgeSet bridges = sample_bridges(n, t, sub);
      std::vector<std::int32_t> arr(n * n), pos(n * n);
      for (std::int32_t i = 0; i < n * n; ++i) arr[i] = pos[i] = i;
      for (const Bridge& br : bridges.bridges()) {
        const std::int32_t u = vertex_id(br.edge.a, n), w = vertex_id(br.edge.b, n);
        std::swap(arr[pos[u]], arr[pos[w]]);
        std::swap(pos[u], pos[w]);
      }
      const Permutation sigma = permutation_from_bridges(bridges);
      for (std::int32_t v = 0; v < n * n && perm_ok; ++v) perm_ok = sigma.image(v) == arr[v];
      for (std::int32_t v = 0; v < n * n && orbit_ok; ++v) {
        const CrwRun run = run_crw(bridges, {vertex_from_id(v, n), 0.0}, n * n);
        std::set<std::int32_t> tops;
        for (Vertex tv : run.top_crossings) tops.insert(vertex_id(tv, n));
        std::set<std::int32_t> orb;
        std::int32_t cur = v;
        do {
          orb.insert(cur);
          cur = sigma.image(cur);
        } while (cur != v);
        orbit_ok = run.closed && tops == orb;
      }
    }
    check(perm_ok, "sigma_t equals transposition composition");
    check(orbit_ok, "walk top-crossings equal orbits");
  }

  {  // union-find against graph-search components
    RandomStream rng(1003);
    bool partition_ok = true;
    for (int iter = 0; iter < 20 && partition_ok; ++iter) {
      const int n = 4 + static_cast<int>(rng.next_below(3));
      RandomStream sub = rng.substream(iter);
      BridgeSet bridges = sample_bridges(n, 0.4 * n * n, sub);
      bridges = extend(bridges, 0.6 * n * n, sub);
      const double t = 0.4 * n * n;
      Permutation sigma(n);
      for (const Bridge& br : bridges.bridges())
        if (br.height <= t)
          sigma.compose_swap(vertex_id(br.edge.a, n), vertex_id(br.edge.b, n));
      const Permutation sigma_t = sigma;
      CycleIndex idx(sigma);
      GraphProcess g(idx, t);
      std::vector<Edge> added;
      for (const Bridge& br : bridges.bridges()) {
        if (br.height <= t) continue;
        advance(g, sigma, idx, br.edge, br.height, 2);
        added.push_back(br.edge);
        std::vector<std::vector<std::int32_t>> adj(n * n);
        for (std::int32_t v = 0; v < n * n; ++v) {
          adj[v].push_back(sigma_t.image(v));
          adj[sigma_t.image(v)].push_back(v);
        }
        for (const Edge& e : added) {
          adj[vertex_id(e.a, n)].push_back(vertex_id(e.b, n));
          adj[vertex_id(e.b, n)].push_back(vertex_id(e.a, n));
        }
        std::vector<std::int32_t> comp(n * n, -1);
        std::int32_t nc = 0;
        for (std::int32_t s = 0; s < n * n; ++s) {
          if (comp[s] >= 0) continue;
          std::vector<std::int32_t> stack{s};
          comp[s] = nc;
          while (!stack.empty()) {
            const std::int32_t x = stack.back();
            stack.pop_back();
            for (std::int32_t y : adj[x])
              if (comp[y] < 0) {
                comp[y] = nc;
                stack.push_back(y);
              }
          }
          ++nc;
        }
        for (std::int32_t v = 0; v < n * n && partition_ok; ++v)
          for (std::int32_t w = v + 1; w < n * n && partition_ok; ++w)
            partition_ok = (g.find(v) == g.find(w)) == (comp[v] == comp[w]);
        if (!partition_ok) break;
      }
    }
    check(partition_ok, "graph process equals from-scratch components");
  }

  log << (failures == 0 ? "selftest passed" : "selftest FAILED") << '\n';
  return failures == 0 ? 0 : 3;
}

// Dispatch by experiment name; unknown names are a config error.
inline RunRecord run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "phase-sweep") return phase_sweep(cfg);
  if (cfg.experiment == "line-tail") return line_tail(cfg);
  if (cfg.experiment == "iota-orbit") return iota_orbit(cfg);
  if (cfg.experiment == "split-rate") return split_rate(cfg);
  if (cfg.experiment == "coupling") return coupling_window(cfg);
  if (cfg.experiment == "subcritical-containment") return subcritical_containment(cfg);
  throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
}

// Writes the record as one JSON line plus a per-replica CSV companion next
// to it (<out>.jsonl and <out>.csv). An empty out path prints to stdout.
inline void write_run_record(const RunRecord& rec, const std::string& out) {
  if (out.empty()) {
    std::cout << rec.to_json().dump() << '\n';
    return;
  }
  std::ofstream jsonl(out + ".jsonl");
  if (!jsonl) throw std::runtime_error("cannot open output '" + out + ".jsonl'");
  jsonl << rec.to_json().dump() << '\n';

  std::ofstream csv(out + ".csv");
  if (!csv) throw std::runtime_error("cannot open output '" + out + ".csv'");
  if (!rec.per_replica.empty()) {
    std::vector<std::string> cols;
    for (auto it = rec.per_replica.front().begin(); it != rec.per_replica.front().end(); ++it)
      cols.push_back(it.key());
    for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
    csv << '\n';
    csv << std::setprecision(17);
    for (const auto& row : rec.per_replica) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) csv << ',';
        const auto& cell = row.at(cols[i]);
        if (cell.is_string())
          csv << cell.get<std::string>();
        else
          csv << cell.dump();
      }
      csv << '\n';
    }
  }
}

}  // namespace stirring
