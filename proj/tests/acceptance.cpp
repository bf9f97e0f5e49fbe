// Release gate: nine numbered checks covering special-function accuracy,
// the analytic property suite, exact structural identities of the coupled
// graph processes, desk-scale statistical verification of the two limit
// theorems, the drift (ergodicity) condition, the discrete-to-limit match,
// martingale diagnostics of the simulated paths, and coalescent event
// rates. Prints one PASS/FAIL line per check; exit status 0 iff all pass.

#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "frz/coalescent_sim.hpp"
#include "frz/harness.hpp"
#include "frz/limit_sim.hpp"
#include "frz/rng.hpp"
#include "frz/stats.hpp"
#include "json.hpp"

namespace {

struct Check {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream ss;
  ss << std::setprecision(4) << v;
  return ss.str();
}

const frz::Verdict& verdict(const frz::ExperimentResult& r, const char* name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return v;
  throw std::runtime_error(std::string("missing verdict: ") + name);
}

bool report(int idx, const char* title, const Check& c) {
  std::cout << (c.pass ? "PASS" : "FAIL") << "  " << idx << ". " << title
            << ": " << c.detail << std::endl;
  return c.pass;
}

// Checks 1 and 2 share one run of the analytic suite at its default
// (full-size) grids.

Check check_density_accuracy(const frz::ExperimentResult& lemma) {
  const auto& central = verdict(lemma, "oracle_rel_err_central");  // <= 1e-6
  const auto& tails = verdict(lemma, "oracle_rel_err_tails");      // <= 1e-3
  const auto& mass = verdict(lemma, "p1_normalization");  // 1 +- 1e-7
  const auto& mode = verdict(lemma, "x_max_location");  // -0.886 +- 0.01
  Check c;
  c.pass = central.pass && tails.pass && mass.pass && mode.pass;
  c.detail = "central rel err " + num(central.value) + " (<= 1e-6), tail rel err " +
             num(tails.value) + " (<= 1e-3), mass " + num(mass.value) +
             " (1 +- 1e-7), mode " + num(mode.value) + " (-0.886 +- 0.01)";
  return c;
}

Check check_analytic_properties(const frz::ExperimentResult& lemma) {
  const auto& mono = verdict(lemma, "ratio_monotone_min_diff");  // >= -1e-9
  const auto& ge_one = verdict(lemma, "ratio_ge_one");           // >= 1-1e-12
  const auto& airy = verdict(lemma, "airy_cross_positive");      // > 0
  const auto& gap = verdict(lemma, "i1_gap_bound");    // |x I1 - 1| x^3 <= 5
  const auto& trunc = verdict(lemma, "i1_trunc_lower");  // 2x I1_trunc >= 1
  Check c;
  c.pass = mono.pass && ge_one.pass && airy.pass && gap.pass && trunc.pass;
  c.detail = "ratio min diff " + num(mono.value) + " (>= -1e-9), ratio min " +
             num(ge_one.value) + " (>= 1), Airy cross min " + num(airy.value) +
             " (> 0), kernel gap " + num(gap.value) + " (<= 5), trunc bound " +
             num(trunc.value) + " (>= 1)";
  return c;
}

Check check_coupling() {
  const frz::ExperimentResult r =
      frz::run_experiment("coupling-p1", nlohmann::json::object());
  const auto& counts = verdict(r, "frozen_equals_surplus");   // == 0
  const auto& trees = verdict(r, "tree_multisets_match");     // == 0
  const auto& surplus = verdict(r, "no_complex_components");  // <= 1
  Check c;
  c.pass = counts.pass && trees.pass && surplus.pass;
  c.detail = num(counts.value) + " count mismatches, " + num(trees.value) +
             " multiset mismatches over every step of 50 runs (n=2000, "
             "m<=3n), max surplus " +
             num(surplus.value) + " (<= 1)";
  return c;
}

Check check_line_drift() {
  const frz::ExperimentResult r =
      frz::run_experiment("theorem1", nlohmann::json::object());
  const auto& ratio = verdict(r, "median_abs_dev_ratio");  // <= 0.5
  Check c;
  c.pass = ratio.pass;
  c.detail = "median |X(30) - 1.5*30| / median |X(5) - 1.5*5| = " +
             num(ratio.value) + " (<= 0.5, 300 replicas)";
  return c;
}

Check check_stationarity() {
  const frz::ExperimentResult r =
      frz::run_experiment("stationarity-p0", nlohmann::json::object());
  const auto& ks = verdict(r, "ks_distance");           // <= 0.06
  const auto& slope = verdict(r, "tail_cubic_slope");   // in [2.4, 3.6]
  Check c;
  c.pass = ks.pass && slope.pass;
  c.detail = "KS(t=30 vs t=60, 2000 each) = " + num(ks.value) +
             " (<= 0.06), tail slope " + num(slope.value) + " (in [2.4, 3.6])";
  return c;
}

Check check_drift_condition() {
  const frz::ExperimentResult r =
      frz::run_experiment("lyapunov", nlohmann::json::object());
  const auto& outside = verdict(r, "drift_negative_outside");  // <= -0.5
  const auto& smallest = verdict(r, "smallest_B");             // <= 10
  const auto& bounded = verdict(r, "b_constant");              // finite
  Check c;
  c.pass = outside.pass && smallest.pass && bounded.pass;
  c.detail = "worst outside ratio " + num(outside.value) +
             " (<= -0.5), smallest workable B " + num(smallest.value) +
             " (<= 10), inside bound b " + num(bounded.value) + " (finite)";
  return c;
}

Check check_discrete_limit() {
  const frz::ExperimentResult r =
      frz::run_experiment("discrete-limit", nlohmann::json::object());
  const auto& ks = verdict(r, "ks_discrete_vs_limit");  // <= 0.15
  Check c;
  c.pass = ks.pass;
  c.detail = "KS(rescaled frozen count at n=1e5 vs limit at t=2, 500 each) "
             "= " + num(ks.value) + " (<= 0.15)";
  return c;
}

Check check_martingale() {
  const int reps = 500;
  const std::vector<double> times = {2.0, 5.0, 10.0};
  double worst_mean_ratio = 0.0, worst_var_ratio = 0.0;
  std::string worst_mean_at, worst_var_at;

  for (const double p : {0.0, 0.5}) {
    const std::uint64_t base = p == 0.0 ? 31415926u : 27182818u;
    std::vector<std::vector<double>> mart(times.size()), qv(times.size());
    for (int i = 0; i < reps; ++i) {
      const frz::LimitConfig cfg = frz::default_limit_config(
          p, times.back(), frz::replica_seed(base, static_cast<std::uint64_t>(i)));
      const frz::LimitPath path = frz::simulate_path(cfg);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const frz::PathDiagnostics d = frz::compensator_and_qv(path, times[k]);
        mart[k].push_back(d.martingale);
        qv[k].push_back(d.qv);
      }
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double mean_m = frz::sample_mean(mart[k]);
      const double se_m = frz::standard_error(mart[k]);
      const double mean_ratio = std::abs(mean_m) / se_m;  // require <= 3
      if (mean_ratio > worst_mean_ratio) {
        worst_mean_ratio = mean_ratio;
        worst_mean_at = "p=" + num(p) + ",t=" + num(times[k]);
      }

      // Sample variance of M vs mean predictable quadratic variation,
      // standardized by the spread of M_i^2 - <M>_i.
      const double var_m = frz::sample_variance(mart[k]);
      const double mean_qv = frz::sample_mean(qv[k]);
      std::vector<double> diff(mart[k].size());
      for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = mart[k][i] * mart[k][i] - qv[k][i];
      const double se_d = frz::standard_error(diff);
      const double var_ratio = std::abs(var_m - mean_qv) / se_d;  // <= 4
      if (var_ratio > worst_var_ratio) {
        worst_var_ratio = var_ratio;
        worst_var_at = "p=" + num(p) + ",t=" + num(times[k]);
      }
    }
  }

  Check c;
  c.pass = worst_mean_ratio <= 3.0 && worst_var_ratio <= 4.0;
  c.detail = "500 replicas, p in {0, 0.5}, t in {2, 5, 10}: worst "
             "|mean M|/SE = " + num(worst_mean_ratio) + " (<= 3, at " +
             worst_mean_at + "), worst |var M - mean QV|/SE = " +
             num(worst_var_ratio) + " (<= 4, at " + worst_var_at + ")";
  return c;
}

Check check_coalescent_rates() {
  // Three particles (standard 0.5 and 0.5, frozen 1, p = 1): first-event
  // rates are pair merge 0.25, freeze 0.25, frozen absorption 1.0, so the
  // categorical law is (1/6, 1/6, 2/3).
  const int reps = 100000;
  long counts[3] = {0, 0, 0};
  for (int i = 0; i < reps; ++i) {
    frz::ParticleSystem sys =
        frz::init_system({0.5, 0.5}, {1.0}, 1.0);
    frz::rng gen(frz::replica_seed(16180339u, static_cast<std::uint64_t>(i)));
    const frz::EventKind first = frz::gillespie_step(sys, gen);
    switch (first) {
      case frz::EventKind::StdStdMerge: ++counts[0]; break;
      case frz::EventKind::Freeze: ++counts[1]; break;
      case frz::EventKind::StdFrozenMerge: ++counts[2]; break;
      case frz::EventKind::Absorbed: throw std::runtime_error("absorbed");
    }
  }
  const double probs[3] = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
  double chi2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double expect = reps * probs[k];
    const double gap = static_cast<double>(counts[k]) - expect;
    chi2 += gap * gap / expect;
  }
  // 99% quantile of chi-square with 2 degrees of freedom is exactly
  // -2 log(0.01).
  const double chi2_crit = 2.0 * std::log(100.0);

  // A lone particle of mass 1 freezes at rate 1/2: mean freeze time 2.
  const int freeze_reps = 10000;
  std::vector<double> freeze_times;
  freeze_times.reserve(freeze_reps);
  for (int i = 0; i < freeze_reps; ++i) {
    frz::ParticleSystem sys = frz::init_system({1.0}, {}, 0.0);
    frz::rng gen(frz::replica_seed(14142135u, static_cast<std::uint64_t>(i)));
    const frz::EventKind first = frz::gillespie_step(sys, gen);
    if (first != frz::EventKind::Freeze)
      throw std::runtime_error("single particle produced a non-freeze event");
    freeze_times.push_back(sys.time);
  }
  const double mean_freeze = frz::sample_mean(freeze_times);

  Check c;
  const bool chi_ok = chi2 <= chi2_crit;
  const bool mean_ok = std::abs(mean_freeze - 2.0) <= 0.06;  // 2 +- 3%
  c.pass = chi_ok && mean_ok;
  c.detail = "first-event chi2 = " + num(chi2) + " (<= " + num(chi2_crit) +
             " at 1%, 1e5 replicas), mean freeze time " + num(mean_freeze) +
             " (2 +- 3%, 1e4 replicas)";
  return c;
}

}  // namespace

int main() {
  bool all = true;
  try {
    const frz::ExperimentResult lemma =
        frz::run_experiment("lemma-suite", nlohmann::json::object());
    all &= report(1, "density vs oracle", check_density_accuracy(lemma));
    all &= report(2, "analytic property suite", check_analytic_properties(lemma));
    all &= report(3, "graph coupling identities", check_coupling());
    all &= report(4, "line-drift trend", check_line_drift());
    all &= report(5, "stationarity and cubic tail", check_stationarity());
    all &= report(6, "drift condition", check_drift_condition());
    all &= report(7, "discrete-to-limit match", check_discrete_limit());
    all &= report(8, "martingale diagnostics", check_martingale());
    all &= report(9, "coalescent event rates", check_coalescent_rates());
  } catch (const std::exception& e) {
    std::cout << "FAIL  aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (all ? "acceptance: all checks passed"
                    : "acceptance: FAILURES above")
            << std::endl;
  return all ? 0 : 1;
}
