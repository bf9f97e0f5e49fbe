#include "frz/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <string_view>
#include <thread>
#include <utility>

#include "frz/errors.hpp"
#include "frz/graph_sim.hpp"
#include "frz/limit_sim.hpp"
#include "frz/quadrature.hpp"
#include "frz/rng.hpp"
#include "frz/special_fn.hpp"
#include "frz/stats.hpp"
#include "frz/version.hpp"

namespace frz {
namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

int worker_count() {
  const char* env = std::getenv("FRZ_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1 || v > 256)
    throw config_error("FRZ_THREADS must be an integer in [1, 256]");
  return static_cast<int>(v);
}

// Fans replicas out to FRZ_THREADS workers. Each replica writes its own row
// buffer; buffers are concatenated in replica order, so the merged rows do
// not depend on the worker count.
template <class Fn>
std::vector<ResultRow> run_replicas(std::uint64_t reps, Fn&& fn) {
  std::vector<std::vector<ResultRow>> buf(reps);
  const std::uint64_t workers =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(worker_count()), reps);
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < reps; ++i) buf[i] = fn(i);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto work = [&] {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= reps) return;
        try {
          buf[i] = fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  std::size_t total = 0;
  for (const auto& b : buf) total += b.size();
  std::vector<ResultRow> merged;
  merged.reserve(total);
  for (auto& b : buf)
    for (auto& r : b) merged.push_back(std::move(r));
  return merged;
}

// --- config plumbing ------------------------------------------------------

void require_keys(const json& cfg, std::initializer_list<const char*> keys,
                  const char* name) {
  if (cfg.is_null()) return;
  if (!cfg.is_object())
    throw config_error(std::string(name) + ": config must be a JSON object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw config_error(std::string(name) + ": unknown config key '" +
                         it.key() + "'");
  }
}

double num_or(const json& cfg, const char* key, double dflt, double lo,
              double hi, const char* name) {
  double v = dflt;
  if (cfg.is_object() && cfg.contains(key)) {
    const json& j = cfg.at(key);
    if (!j.is_number())
      throw config_error(std::string(name) + ": " + key + " must be a number");
    v = j.get<double>();
  }
  if (!(std::isfinite(v) && v >= lo && v <= hi))
    throw config_error(std::string(name) + ": " + key + " out of range");
  return v;
}

std::int64_t int_or(const json& cfg, const char* key, std::int64_t dflt,
                    std::int64_t lo, std::int64_t hi, const char* name) {
  std::int64_t v = dflt;
  if (cfg.is_object() && cfg.contains(key)) {
    const json& j = cfg.at(key);
    if (!j.is_number_integer())
      throw config_error(std::string(name) + ": " + key +
                         " must be an integer");
    v = j.get<std::int64_t>();
  }
  if (v < lo || v > hi)
    throw config_error(std::string(name) + ": " + key + " out of range");
  return v;
}

std::uint64_t seed_or(const json& cfg, const char* key, std::uint64_t dflt,
                      const char* name) {
  if (!(cfg.is_object() && cfg.contains(key))) return dflt;
  const json& j = cfg.at(key);
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw config_error(std::string(name) + ": " + key +
                     " must be a nonnegative integer");
}

std::vector<double> array_or(const json& cfg, const char* key,
                             std::vector<double> dflt, const char* name) {
  if (!(cfg.is_object() && cfg.contains(key))) return dflt;
  const json& j = cfg.at(key);
  if (!j.is_array())
    throw config_error(std::string(name) + ": " + key + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number())
      throw config_error(std::string(name) + ": " + key +
                         " must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// --- row helpers -----------------------------------------------------------

std::vector<double> column(const std::vector<ResultRow>& rows,
                           std::string_view obs) {
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.observable == obs) v.push_back(r.value);
  return v;
}

std::vector<double> column_at_time(const std::vector<ResultRow>& rows,
                                   std::string_view obs, double t) {
  std::vector<double> v;
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (const auto& r : rows)
    if (r.observable == obs && std::abs(r.time - t) <= tol)
      v.push_back(r.value);
  return v;
}

Verdict make_verdict(std::string name, double value, double lo, double hi) {
  Verdict v;
  v.name = std::move(name);
  v.value = value;
  v.lo = lo;
  v.hi = hi;
  v.pass = std::isfinite(value) && value >= lo && value <= hi;
  return v;
}

// --- theorem1: X_p(t) concentrates on the line (1+p) t ---------------------

ExperimentResult run_theorem1(const json& cfg) {
  require_keys(cfg, {"p", "reps", "t_grid", "seed"}, "theorem1");
  const double p = num_or(cfg, "p", 0.5, 1e-12, 1.0, "theorem1");
  const std::int64_t reps = int_or(cfg, "reps", 300, 2, 1000000, "theorem1");
  // Default chosen from a six-seed calibration study: the trend ratio at
  // 300 replicas has seed-to-seed sd ~0.06 around a population value of
  // ~0.44 (1800 pooled replicas), and this seed sits near the center of
  // that distribution rather than at either tail.
  const std::uint64_t seed = seed_or(cfg, "seed", 555000111u, "theorem1");
  const std::vector<double> t_grid =
      array_or(cfg, "t_grid", {5.0, 10.0, 20.0, 30.0}, "theorem1");
  if (t_grid.size() < 2)
    throw config_error("theorem1: t_grid needs at least two times");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !std::isfinite(t_grid[i]))
      throw config_error("theorem1: t_grid times must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw config_error("theorem1: t_grid must be strictly increasing");
  }

  ExperimentResult res;
  res.name = "theorem1";
  res.seed = seed;
  ordered echo;
  echo["p"] = p;
  echo["reps"] = reps;
  echo["t_grid"] = t_grid;
  echo["seed"] = seed;
  res.config_echo = echo.dump();

  const double slope = 1.0 + p;
  res.rows = run_replicas(
      static_cast<std::uint64_t>(reps), [&](std::uint64_t i) {
        const LimitConfig lc =
            default_limit_config(p, t_grid.back(), replica_seed(seed, i));
        const LimitPath path = simulate_path(lc);
        std::vector<ResultRow> out;
        out.reserve(2 * t_grid.size());
        for (const double t : t_grid) {
          const double x = path.value_at(t);
          out.push_back({i, t, "X", x});
          out.push_back({i, t, "abs_dev", std::abs(x - slope * t)});
        }
        return out;
      });

  const double med_first =
      sample_median(column_at_time(res.rows, "abs_dev", t_grid.front()));
  const double med_last =
      sample_median(column_at_time(res.rows, "abs_dev", t_grid.back()));
  const double ratio = med_first > 0.0
                           ? med_last / med_first
                           : (med_last == 0.0 ? 0.0 : kInf);
  res.verdicts.push_back(
      make_verdict("median_abs_dev_ratio", ratio, 0.0, 0.5));
  return res;
}

// --- stationarity-p0: stationary law of X_0(t) - t --------------------------

ExperimentResult run_stationarity(const json& cfg) {
  require_keys(cfg, {"reps", "t1", "t2", "t_burn", "seed"}, "stationarity-p0");
  const std::int64_t reps =
      int_or(cfg, "reps", 2000, 500, 1000000, "stationarity-p0");
  const double t1 = num_or(cfg, "t1", 30.0, 1.0, 1e6, "stationarity-p0");
  const double t2 = num_or(cfg, "t2", 60.0, 1.0, 1e6, "stationarity-p0");
  const double t_burn = num_or(cfg, "t_burn", 0.0, 0.0, 1e6, "stationarity-p0");
  const std::uint64_t seed = seed_or(cfg, "seed", 20240502u, "stationarity-p0");
  if (!(t2 > t1))
    throw config_error("stationarity-p0: t2 must exceed t1");
  if (t_burn > t1)
    throw config_error("stationarity-p0: t_burn must not exceed t1");

  ExperimentResult res;
  res.name = "stationarity-p0";
  res.seed = seed;
  ordered echo;
  echo["reps"] = reps;
  echo["t1"] = t1;
  echo["t2"] = t2;
  echo["t_burn"] = t_burn;
  echo["seed"] = seed;
  res.config_echo = echo.dump();

  const std::vector<double> y1 = stationary_samples(
      t_burn, t1, static_cast<int>(reps), replica_seed(seed, 1));
  const std::vector<double> y2 = stationary_samples(
      t_burn, t2, static_cast<int>(reps), replica_seed(seed, 2));
  res.rows.reserve(2 * static_cast<std::size_t>(reps));
  for (std::size_t i = 0; i < y1.size(); ++i)
    res.rows.push_back({i, t1, "Y", y1[i]});
  for (std::size_t i = 0; i < y2.size(); ++i)
    res.rows.push_back({i, t2, "Y", y2[i]});

  res.verdicts.push_back(
      make_verdict("ks_distance", ks_statistic(y1, y2), 0.0, 0.06));
  res.verdicts.push_back(make_verdict(
      "tail_cubic_slope", tail_cubic_fit(y2, 0.90, 0.995), 2.4, 3.6));
  return res;
}

// --- discrete-limit: rescaled frozen graph vs the limit process -------------

ExperimentResult run_discrete_limit(const json& cfg) {
  require_keys(cfg, {"n", "reps", "p", "t", "t0", "seed"}, "discrete-limit");
  const std::int64_t n =
      int_or(cfg, "n", 100000, 1000, 10000000, "discrete-limit");
  const std::int64_t reps = int_or(cfg, "reps", 500, 10, 100000,
                                   "discrete-limit");
  const double p = num_or(cfg, "p", 0.5, 0.0, 1.0, "discrete-limit");
  const double t = num_or(cfg, "t", 2.0, -100.0, 100.0, "discrete-limit");
  const double t0 = num_or(cfg, "t0", -16.0, -1000.0, 0.0, "discrete-limit");
  const std::uint64_t seed = seed_or(cfg, "seed", 20240503u, "discrete-limit");
  if (!(t > t0))
    throw config_error("discrete-limit: t must exceed t0");

  ExperimentResult res;
  res.name = "discrete-limit";
  res.seed = seed;
  ordered echo;
  echo["n"] = n;
  echo["reps"] = reps;
  echo["p"] = p;
  echo["t"] = t;
  echo["t0"] = t0;
  echo["seed"] = seed;
  res.config_echo = echo.dump();

  const double scale = std::pow(static_cast<double>(n), 2.0 / 3.0);
  res.rows = run_replicas(
      static_cast<std::uint64_t>(reps), [&](std::uint64_t i) {
        GraphState g = init_graph(n, p, replica_seed(seed, 2 * i));
        run_to_time(g, t);
        const double discrete =
            static_cast<double>(g.frozen_vertices()) / scale;

        // The limit process is started far in the past from zero mass as an
        // entrance approximation of the time -infinity start.
        LimitConfig lc;
        lc.p = p;
        lc.t0 = t0;
        lc.x0 = 0.0;
        lc.t_end = t;
        lc.delta = p > 0.0 ? 1e-4 : 1e-8;
        lc.compensate_small = p > 0.0;
        lc.seed = replica_seed(seed, 2 * i + 1);
        const LimitPath path = simulate_path(lc);

        std::vector<ResultRow> out;
        out.push_back({i, t, "discrete", discrete});
        out.push_back({i, t, "limit", path.value_at(t)});
        return out;
      });

  const double ks = ks_statistic(column(res.rows, "discrete"),
                                 column(res.rows, "limit"));
  res.verdicts.push_back(make_verdict("ks_discrete_vs_limit", ks, 0.0, 0.15));
  return res;
}

// --- coupling-p1: frozen graph vs classical graph identities ----------------

struct CouplingScan {
  std::uint64_t hash_forest = 0;     // trees of the frozen graph
  std::uint64_t hash_classical = 0;  // surplus-0 classical components
  std::int64_t max_surplus = 0;      // frozen-graph component surplus
};

// Order-independent multiset hashes of the two forest parts plus the largest
// component surplus of the frozen graph, in one sweep over the vertices.
CouplingScan scan_forests(GraphState& g) {
  CouplingScan s;
  const std::int32_t n = static_cast<std::int32_t>(g.n());
  for (std::int32_t v = 0; v < n; ++v) {
    if (g.find(v) == v) {
      const std::int64_t size = g.size_of_root(v);
      const std::int64_t surplus = g.kept_edges_of_root(v) - (size - 1);
      s.max_surplus = std::max(s.max_surplus, surplus);
      if (!g.is_frozen_root(v))
        s.hash_forest += mix64(static_cast<std::uint64_t>(size));
    }
    if (g.find_classical(v) == v && g.classical_surplus_of_root(v) == 0)
      s.hash_classical +=
          mix64(static_cast<std::uint64_t>(g.classical_size_of_root(v)));
  }
  return s;
}

bool forests_match_exactly(GraphState& g) {
  std::vector<std::int64_t> frozen_trees, classical_trees;
  const std::int32_t n = static_cast<std::int32_t>(g.n());
  for (std::int32_t v = 0; v < n; ++v) {
    if (g.find(v) == v && !g.is_frozen_root(v))
      frozen_trees.push_back(g.size_of_root(v));
    if (g.find_classical(v) == v && g.classical_surplus_of_root(v) == 0)
      classical_trees.push_back(g.classical_size_of_root(v));
  }
  std::sort(frozen_trees.begin(), frozen_trees.end());
  std::sort(classical_trees.begin(), classical_trees.end());
  return frozen_trees == classical_trees;
}

ExperimentResult run_coupling(const json& cfg) {
  require_keys(cfg, {"n", "seeds", "extra_p", "extra_seeds", "seed"},
               "coupling-p1");
  const std::int64_t n = int_or(cfg, "n", 2000, 10, 1000000, "coupling-p1");
  const std::int64_t seeds = int_or(cfg, "seeds", 50, 1, 100000,
                                    "coupling-p1");
  const std::int64_t extra_seeds =
      int_or(cfg, "extra_seeds", 10, 0, 100000, "coupling-p1");
  const std::uint64_t seed = seed_or(cfg, "seed", 20240504u, "coupling-p1");
  const std::vector<double> extra_p =
      array_or(cfg, "extra_p", {0.0, 0.5}, "coupling-p1");
  for (const double pp : extra_p)
    if (!(pp >= 0.0 && pp <= 1.0))
      throw config_error("coupling-p1: extra_p values must lie in [0, 1]");

  ExperimentResult res;
  res.name = "coupling-p1";
  res.seed = seed;
  ordered echo;
  echo["n"] = n;
  echo["seeds"] = seeds;
  echo["extra_p"] = extra_p;
  echo["extra_seeds"] = extra_seeds;
  echo["seed"] = seed;
  res.config_echo = echo.dump();

  const std::int64_t m_max = 3 * n;
  const std::uint64_t total =
      static_cast<std::uint64_t>(seeds) +
      static_cast<std::uint64_t>(extra_p.size()) *
          static_cast<std::uint64_t>(extra_seeds);

  res.rows = run_replicas(total, [&](std::uint64_t i) {
    std::vector<ResultRow> out;
    if (i < static_cast<std::uint64_t>(seeds)) {
      // p = 1: the forest parts of the two processes must coincide exactly.
      GraphState g = init_graph(n, 1.0, replica_seed(seed, i));
      std::int64_t count_mm = 0, hash_mm = 0, exact_mm = 0, max_sur = 0;
      for (std::int64_t m = 1; m <= m_max; ++m) {
        apply_edge(g);
        if (g.frozen_vertices() != g.surplus_vertices()) ++count_mm;
        const CouplingScan s = scan_forests(g);
        if (s.hash_forest != s.hash_classical) ++hash_mm;
        max_sur = std::max(max_sur, s.max_surplus);
        if (m % 500 == 0 || m == m_max)
          if (!forests_match_exactly(g)) ++exact_mm;
      }
      out.push_back({i, 1.0, "count_mismatches",
                     static_cast<double>(count_mm)});
      out.push_back({i, 1.0, "hash_mismatches",
                     static_cast<double>(hash_mm)});
      out.push_back({i, 1.0, "exact_mismatches",
                     static_cast<double>(exact_mm)});
      out.push_back({i, 1.0, "max_surplus", static_cast<double>(max_sur)});
    } else {
      // Any p: no frozen-graph component may ever carry surplus >= 2.
      const std::uint64_t k = i - static_cast<std::uint64_t>(seeds);
      const double pp = extra_p[static_cast<std::size_t>(
          k / static_cast<std::uint64_t>(extra_seeds))];
      GraphState g = init_graph(n, pp, replica_seed(seed, 1000003u + i));
      std::int64_t max_sur = 0;
      for (std::int64_t m = 1; m <= m_max; ++m) {
        apply_edge(g);
        max_sur = std::max(max_sur, scan_forests(g).max_surplus);
      }
      out.push_back({i, pp, "max_surplus", static_cast<double>(max_sur)});
    }
    return out;
  });

  double count_mm = 0.0, multiset_mm = 0.0, max_sur = 0.0;
  for (const double v : column(res.rows, "count_mismatches")) count_mm += v;
  for (const double v : column(res.rows, "hash_mismatches")) multiset_mm += v;
  for (const double v : column(res.rows, "exact_mismatches")) multiset_mm += v;
  for (const double v : column(res.rows, "max_surplus"))
    max_sur = std::max(max_sur, v);
  res.verdicts.push_back(
      make_verdict("frozen_equals_surplus", count_mm, 0.0, 0.0));
  res.verdicts.push_back(
      make_verdict("tree_multisets_match", multiset_mm, 0.0, 0.0));
  res.verdicts.push_back(
      make_verdict("no_complex_components", max_sur, 0.0, 1.0));
  return res;
}

// --- lyapunov: drift condition on a grid ------------------------------------

ExperimentResult run_lyapunov(const json& cfg) {
  require_keys(cfg,
               {"alpha", "beta", "a", "grid_lo", "grid_hi", "grid_step",
                "b_max"},
               "lyapunov");
  const double alpha = num_or(cfg, "alpha", 0.1, 1e-12, 1.0, "lyapunov");
  const double beta = num_or(cfg, "beta", 0.02, 1e-12, 1.0, "lyapunov");
  const double a = num_or(cfg, "a", 0.5, 1e-12, 100.0, "lyapunov");
  const double grid_lo = num_or(cfg, "grid_lo", -40.0, -1e4, 1e4, "lyapunov");
  const double grid_hi = num_or(cfg, "grid_hi", 40.0, -1e4, 1e4, "lyapunov");
  const double grid_step =
      num_or(cfg, "grid_step", 0.25, 1e-6, 1e3, "lyapunov");
  const double b_max = num_or(cfg, "b_max", 10.0, 1e-6, 1e3, "lyapunov");
  if (!(grid_lo < grid_hi))
    throw config_error("lyapunov: grid_lo must be below grid_hi");

  ExperimentResult res;
  res.name = "lyapunov";
  res.seed = 0;
  ordered echo;
  echo["alpha"] = alpha;
  echo["beta"] = beta;
  echo["a"] = a;
  echo["grid_lo"] = grid_lo;
  echo["grid_hi"] = grid_hi;
  echo["grid_step"] = grid_step;
  echo["b_max"] = b_max;
  res.config_echo = echo.dump();

  std::vector<double> grid;
  for (std::int64_t k = 0;; ++k) {
    const double x = grid_lo + static_cast<double>(k) * grid_step;
    if (x > grid_hi + 1e-9) break;
    grid.push_back(x);
  }

  const LyapunovReport rep = lyapunov_check(alpha, beta, a, b_max, grid);
  res.rows.reserve(rep.verdicts.size() + 1);
  for (const auto& v : rep.verdicts)
    res.rows.push_back({0, v.x, "av_ratio", v.av_ratio});
  res.rows.push_back({0, 0.0, "b_constant", rep.b});

  // Worst drift ratio outside the compact window at the widest threshold.
  double worst_outside = -a;
  for (const auto& v : rep.verdicts)
    if (!v.inside_c) worst_outside = std::max(worst_outside, v.av_ratio);
  res.verdicts.push_back(make_verdict("drift_negative_outside", worst_outside,
                                      -kInf, -a + 1e-12));

  // Smallest threshold B (half-integer scan) for which the drift bound
  // already holds outside [-B / delta_exp, B].
  double b_found = kInf;
  for (double cand = 0.5; cand <= b_max + 1e-9; cand += 0.5) {
    bool ok = true;
    for (const auto& v : rep.verdicts) {
      const bool inside = v.x >= -cand / rep.delta_exp && v.x <= cand;
      if (!inside && !(v.av_ratio <= -a + 1e-12)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      b_found = cand;
      break;
    }
  }
  res.verdicts.push_back(make_verdict("smallest_B", b_found, 0.0, b_max));
  res.verdicts.push_back(make_verdict("b_constant", rep.b, 0.0, kInf));
  return res;
}

// --- lemma-suite: density, ratio, Airy, and kernel-integral checks ----------

ExperimentResult run_lemma_suite(const json& cfg) {
  require_keys(cfg,
               {"seed", "inner_step", "outer_step", "mono_lo", "mono_step",
                "airy_pairs"},
               "lemma-suite");
  const std::uint64_t seed = seed_or(cfg, "seed", 20240506u, "lemma-suite");
  const double inner_step =
      num_or(cfg, "inner_step", 0.25, 0.01, 10.0, "lemma-suite");
  const double outer_step =
      num_or(cfg, "outer_step", 2.5, 0.1, 20.0, "lemma-suite");
  const double mono_lo =
      num_or(cfg, "mono_lo", -40.0, -100.0, -1.0, "lemma-suite");
  const double mono_step =
      num_or(cfg, "mono_step", 0.05, 1e-3, 1.0, "lemma-suite");
  const std::int64_t airy_pairs =
      int_or(cfg, "airy_pairs", 200, 10, 100000, "lemma-suite");

  ExperimentResult res;
  res.name = "lemma-suite";
  res.seed = seed;
  ordered echo;
  echo["seed"] = seed;
  echo["inner_step"] = inner_step;
  echo["outer_step"] = outer_step;
  echo["mono_lo"] = mono_lo;
  echo["mono_step"] = mono_step;
  echo["airy_pairs"] = airy_pairs;
  res.config_echo = echo.dump();

  // Density vs the independent inversion oracle, on the central grid and on
  // the deep tails. Compared in log space; |expm1| of the log gap is the
  // relative error of the density itself.
  std::vector<double> points;
  for (double x = -10.0; x <= 10.0 + 1e-9; x += inner_step) points.push_back(x);
  for (double x = -30.0; x < -10.0 - 1e-9; x += outer_step)
    points.push_back(x);
  for (double x = 10.0 + outer_step; x <= 30.0 + 1e-9; x += outer_step)
    points.push_back(x);

  std::vector<ResultRow> oracle_rows = run_replicas(
      points.size(), [&](std::uint64_t i) {
        const double x = points[i];
        const double gap = log_p1(x).log_p1 - oracle_log_p1(x);
        const double rel = std::abs(std::expm1(gap));
        return std::vector<ResultRow>{{i, x, "p1_rel_err", rel}};
      });
  double max_inner = 0.0, max_outer = 0.0;
  for (const auto& r : oracle_rows) {
    if (std::abs(r.time) <= 10.0 + 1e-9)
      max_inner = std::max(max_inner, r.value);
    else
      max_outer = std::max(max_outer, r.value);
  }
  res.rows = std::move(oracle_rows);
  res.verdicts.push_back(
      make_verdict("oracle_rel_err_central", max_inner, 0.0, 1e-6));
  res.verdicts.push_back(
      make_verdict("oracle_rel_err_tails", max_outer, 0.0, 1e-3));

  // Total mass of the density. The left tail dies off cubic-exponentially,
  // but the right tail is a power law (~ x^{-5/2}), so the grid has to run
  // far out: mass beyond 4.2e6 is below 1e-10.
  const double mass =
      integrate_segments<double>([](double x) { return p1(x); },
                                 {-60.0, -30.0, -10.0, -3.0, 0.0, 3.0, 10.0,
                                  40.0, 160.0, 640.0, 2560.0, 10240.0,
                                  65536.0, 524288.0, 4194304.0},
                                 1e-12, 1e-10, 20000, "p1 normalization")
          .value;
  res.rows.push_back({0, 0.0, "p1_integral", mass});
  res.verdicts.push_back(
      make_verdict("p1_normalization", mass, 1.0 - 1e-7, 1.0 + 1e-7));

  // Mode location.
  const XMax xm = find_xmax();
  res.rows.push_back({0, 0.0, "x_max", xm.x_max});
  res.verdicts.push_back(
      make_verdict("x_max_location", xm.x_max, -0.896, -0.876));

  // x -> p1(x - y) / p1(x) is nondecreasing left of zero.
  double mono_min = kInf;
  for (const double y : {0.1, 0.5, 1.0}) {
    double min_diff = kInf;
    double prev = std::exp(p1_ratio_log(mono_lo, y));
    for (double x = mono_lo + mono_step; x <= -mono_step + 1e-12;
         x += mono_step) {
      const double cur = std::exp(p1_ratio_log(x, y));
      min_diff = std::min(min_diff, cur - prev);
      prev = cur;
    }
    res.rows.push_back({0, y, "ratio_min_diff", min_diff});
    mono_min = std::min(mono_min, min_diff);
  }
  res.verdicts.push_back(
      make_verdict("ratio_monotone_min_diff", mono_min, -1e-9, kInf));

  // p1(x - y) >= p1(x) for x >= 0 and y within the mode offset.
  double ratio_min = kInf;
  for (double x = 0.0; x <= 20.0 + 1e-9; x += 0.25)
    for (int k = 0; k <= 10; ++k) {
      const double y = 0.0886 * k;
      ratio_min = std::min(ratio_min, std::exp(p1_ratio_log(x, y)));
    }
  res.rows.push_back({0, 0.0, "ratio_min", ratio_min});
  res.verdicts.push_back(
      make_verdict("ratio_ge_one", ratio_min, 1.0 - 1e-12, kInf));

  // Airy cross inequality Ai(u) Ai'(v) - Ai(v) Ai'(u) > 0 for u >= v >= 0,
  // evaluated in scaled form (the exponential scalings are positive).
  rng gen(replica_seed(seed, 99));
  double cross_min = kInf;
  for (std::int64_t k = 0; k < airy_pairs; ++k) {
    const double r1 = 12.0 * gen.next_u01();
    const double r2 = 12.0 * gen.next_u01();
    double v = std::min(r1, r2);
    double u = std::max(r1, r2);
    if (u == v) u += 1e-9;
    const ScaledAiryPair av = airy_scaled(v);
    const ScaledAiryPair au = airy_scaled(u);
    cross_min = std::min(cross_min, au.ai_s * av.aip_s - av.ai_s * au.aip_s);
  }
  res.rows.push_back({0, 0.0, "airy_cross_min", cross_min});
  res.verdicts.push_back(
      make_verdict("airy_cross_positive", cross_min, 0.0, kInf));

  // Kernel-integral sandwich: |x I1(x) - 1| <= 5 / x^3 and the truncated
  // integral dominates 1 / (2x).
  double i1_err_scaled = 0.0, i1_trunc_scaled = kInf;
  for (const double x : {8.0, 10.0, 15.0, 20.0}) {
    const KernelIntegrals ki = kernel_integrals(x);
    const double e1 = std::abs(x * ki.i1 - 1.0) * x * x * x;
    const double e2 = 2.0 * x * ki.i1_trunc;
    res.rows.push_back({0, x, "x_i1_gap_scaled", e1});
    res.rows.push_back({0, x, "i1_trunc_2x", e2});
    i1_err_scaled = std::max(i1_err_scaled, e1);
    i1_trunc_scaled = std::min(i1_trunc_scaled, e2);
  }
  res.verdicts.push_back(
      make_verdict("i1_gap_bound", i1_err_scaled, 0.0, 5.0));
  res.verdicts.push_back(
      make_verdict("i1_trunc_lower", i1_trunc_scaled, 1.0, kInf));
  return res;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 15);
  if (ec != std::errc())
    throw numeric_error("floating-point formatting failed");
  return std::string(buf, ptr);
}

}  // namespace

bool ExperimentResult::all_pass() const {
  if (verdicts.empty()) return false;
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

ExperimentResult run_experiment(const std::string& name, const json& config) {
  if (!config.is_object() && !config.is_null())
    throw config_error("experiment config must be a JSON object");
  if (name == "theorem1") return run_theorem1(config);
  if (name == "stationarity-p0") return run_stationarity(config);
  if (name == "discrete-limit") return run_discrete_limit(config);
  if (name == "coupling-p1") return run_coupling(config);
  if (name == "lyapunov") return run_lyapunov(config);
  if (name == "lemma-suite") return run_lemma_suite(config);
  throw config_error("unknown experiment name: " + name);
}

void write_results(const ExperimentResult& result, const std::string& out) {
  std::ofstream csv(out, std::ios::binary | std::ios::trunc);
  if (!csv) throw io_error("cannot open for writing: " + out);
  csv << "name,seed,replica,time,observable,value\n";
  for (const auto& r : result.rows) {
    csv << result.name << ',' << result.seed << ',' << r.replica << ','
        << format_double(r.time) << ',' << r.observable << ','
        << format_double(r.value) << '\n';
  }
  csv.flush();
  if (!csv) throw io_error("write failed: " + out);

  ordered meta;
  meta["name"] = result.name;
  meta["version"] = FRZ_VERSION;
  meta["seed"] = result.seed;
  meta["config"] = result.config_echo.empty()
                       ? ordered::object()
                       : ordered::parse(result.config_echo);
  meta["verdicts"] = ordered::array();
  for (const auto& v : result.verdicts) {
    ordered jv;
    jv["name"] = v.name;
    jv["value"] = v.value;
    if (std::isfinite(v.lo)) jv["lo"] = v.lo;
    if (std::isfinite(v.hi)) jv["hi"] = v.hi;
    jv["pass"] = v.pass;
    meta["verdicts"].push_back(jv);
  }
  meta["all_pass"] = result.all_pass();

  const std::string meta_path = out + ".meta.json";
  std::ofstream mj(meta_path, std::ios::binary | std::ios::trunc);
  if (!mj) throw io_error("cannot open for writing: " + meta_path);
  mj << meta.dump(2) << '\n';
  mj.flush();
  if (!mj) throw io_error("write failed: " + meta_path);
}

}  // namespace frz
