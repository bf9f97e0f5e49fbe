#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "frz/errors.hpp"
#include "frz/limit_sim.hpp"
#include "frz/limit_tables.hpp"
#include "frz/quadrature.hpp"
#include "frz/rng.hpp"
#include "frz/stats.hpp"

namespace {

double path_terminal(const frz::LimitPath& path) {
  return path.value_at(path.config.t_end);
}

}  // namespace

TEST_CASE("limit config defaults and validation") {
  const frz::LimitConfig c0 = frz::default_limit_config(0.0, 5.0, 1u);
  CHECK(c0.delta == 1e-8);
  CHECK_FALSE(c0.compensate_small);
  const frz::LimitConfig c1 = frz::default_limit_config(0.5, 5.0, 1u);
  CHECK(c1.delta == 1e-4);
  CHECK(c1.compensate_small);

  frz::LimitConfig bad = c1;
  bad.p = 1.5;
  CHECK_THROWS_AS((void)frz::simulate_path(bad), frz::config_error);
  bad = c1;
  bad.x0 = -0.5;
  CHECK_THROWS_AS((void)frz::simulate_path(bad), frz::config_error);
  bad = c1;
  bad.t_end = bad.t0;
  CHECK_THROWS_AS((void)frz::simulate_path(bad), frz::config_error);
  bad = c1;
  bad.delta = 0.0;
  CHECK_THROWS_AS((void)frz::simulate_path(bad), frz::config_error);

  CHECK_THROWS_AS(frz::jump_sampler(1.5, 1e-4), frz::config_error);
  CHECK_THROWS_AS(frz::jump_sampler(0.5, 0.0), frz::config_error);
  frz::rng gen(7u);
  frz::jump_sampler s(0.5, 1e-4);
  CHECK_THROWS_AS((void)s.sample(gen, 0.0, -1.0), frz::config_error);
}

TEST_CASE("sampled jump sizes reproduce the kernel law") {
  // State with recentred coordinate w = -5, no multiplicative part.
  frz::rng gen(20240801u);
  frz::jump_sampler sampler(0.0, 1e-8);
  const int n = 40000;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) draws[i] = sampler.sample(gen, -5.0, 0.0);
  CHECK(sampler.builds() == 1);  // fixed state: one envelope build

  std::sort(draws.begin(), draws.end());
  const double probe[5] = {0.005, 0.02, 0.1, 0.5, 1.0};
  const double truth[5] = {0.278207725463, 0.524548993115, 0.892318005865,
                           0.999814570831, 0.999999969534};
  for (int k = 0; k < 5; ++k) {
    const auto it = std::upper_bound(draws.begin(), draws.end(), probe[k]);
    const double ecdf =
        static_cast<double>(it - draws.begin()) / static_cast<double>(n);
    CHECK(std::abs(ecdf - truth[k]) < 0.009);
  }
  CHECK(std::abs(frz::sample_mean(draws) - 0.0385500637422) < 0.0015);
}

TEST_CASE("jump sampler mean matches the kernel moment ratio") {
  // At w = -10 the mean jump is (G2 - eps) / (J1/2) = 0.00995058921321.
  frz::rng gen(31337u);
  frz::jump_sampler sampler(0.0, 1e-8);
  const int n = 10000;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) draws[i] = sampler.sample(gen, -10.0, 0.0);
  CHECK(std::abs(frz::sample_mean(draws) - 0.00995058921321) < 7e-4);

  // One-shot draws agree in distribution with the reusable sampler.
  frz::rng g2(31337u);
  const double one = frz::sample_jump_size(g2, -10.0, 0.0, 0.0, 1e-8);
  CHECK(one >= 1e-8);
}

TEST_CASE("simulated paths are deterministic and structurally sound") {
  frz::LimitConfig cfg = frz::default_limit_config(0.5, 2.0, 424242u);
  const frz::LimitPath a = frz::simulate_path(cfg);
  const frz::LimitPath b = frz::simulate_path(cfg);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
    CHECK(a.events[i].size == b.events[i].size);
  }
  REQUIRE(a.drift.size() == b.drift.size());

  cfg.seed = 424243u;
  const frz::LimitPath c = frz::simulate_path(cfg);
  bool differs = c.events.size() != a.events.size();
  if (!differs && !a.events.empty())
    differs = c.events[0].time != a.events[0].time;
  CHECK(differs);

  // Structure: strictly increasing events inside the span, sizes above the
  // truncation, contiguous drift segments with positive rates.
  CHECK(!a.events.empty());
  double prev = cfg.t0;
  double jump_sum = 0.0;
  for (const auto& e : a.events) {
    CHECK(e.time > prev);
    CHECK(e.time <= a.config.t_end);
    CHECK(e.size >= a.config.delta);
    prev = e.time;
    jump_sum += e.size;
  }
  double drift_sum = 0.0, len_sum = 0.0;
  double dprev = a.config.t0;
  for (const auto& d : a.drift) {
    CHECK(d.lo == dprev);  // compensated windows tile the whole span
    CHECK(d.hi > d.lo);
    CHECK(d.rate > 0.0);
    drift_sum += d.rate * (d.hi - d.lo);
    len_sum += d.hi - d.lo;
    dprev = d.hi;
  }
  CHECK(std::abs(len_sum - (a.config.t_end - a.config.t0)) < 1e-9);
  CHECK(a.value_at(a.config.t0) == a.config.x0);
  CHECK(std::abs(path_terminal(a) - (cfg.x0 + jump_sum + drift_sum)) < 1e-12);
  CHECK_THROWS_AS((void)a.value_at(cfg.t_end + 1.0), frz::domain_error);
  CHECK_THROWS_AS((void)a.value_at(cfg.t0 - 1.0), frz::domain_error);

  // Uncompensated process keeps no drift segments.
  const frz::LimitPath p0 =
      frz::simulate_path(frz::default_limit_config(0.0, 10.0, 5u));
  CHECK(p0.drift.empty());
  // Entrance regime: started deep in the past, the path stays finite.
  frz::LimitConfig ent;
  ent.p = 0.0;
  ent.t0 = -16.0;
  ent.t_end = -14.0;
  ent.delta = 1e-8;
  ent.seed = 6u;
  const frz::LimitPath pe = frz::simulate_path(ent);
  CHECK(std::isfinite(path_terminal(pe)));
}

TEST_CASE("[slow] simulated law is invariant to thinning internals") {
  // Same process simulated with a looser dominating bound and shorter
  // windows must produce the same terminal distribution.
  const int n = 2000;
  std::vector<double> base(n), tuned(n);
  for (int i = 0; i < n; ++i) {
    frz::LimitConfig cfg = frz::default_limit_config(0.5, 5.0, 0u);
    cfg.delta = 1e-3;
    cfg.seed = frz::replica_seed(101u, static_cast<std::uint64_t>(i));
    base[i] = path_terminal(frz::simulate_path(cfg));
    cfg.seed = frz::replica_seed(909u, static_cast<std::uint64_t>(i));
    tuned[i] = path_terminal(frz::detail::simulate_path_tuned(cfg, 3.0, 0.05));
  }
  CHECK(frz::ks_statistic(base, tuned) < 0.05);
}

TEST_CASE("[slow] small-jump truncation bias is compensated") {
  const int n = 1200;
  std::vector<double> coarse(n), fine(n);
  for (int i = 0; i < n; ++i) {
    frz::LimitConfig cfg = frz::default_limit_config(0.5, 3.0, 0u);
    cfg.seed = frz::replica_seed(2024u, static_cast<std::uint64_t>(i));
    coarse[i] = path_terminal(frz::simulate_path(cfg));
    cfg.delta = 4e-5;
    cfg.seed = frz::replica_seed(4048u, static_cast<std::uint64_t>(i));
    fine[i] = path_terminal(frz::simulate_path(cfg));
  }
  const double gap =
      std::abs(frz::sample_mean(coarse) - frz::sample_mean(fine));
  const double se = std::hypot(frz::standard_error(coarse),
                               frz::standard_error(fine));
  CHECK(gap < 2.5 * se);
}

TEST_CASE("[slow] event counts match the integrated rate") {
  const double delta = 1e-6;
  const frz::detail::j_tables& jt = frz::detail::get_j_tables(delta);
  auto gk15 = [](auto&& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double acc = frz::quad_detail::wgk[7] * f(c);
    for (int j = 0; j < 7; ++j) {
      const double dx = h * frz::quad_detail::xgk[j];
      acc += frz::quad_detail::wgk[j] * (f(c - dx) + f(c + dx));
    }
    return acc * h;
  };

  const int n = 500;
  std::vector<double> gaps(n);
  for (int i = 0; i < n; ++i) {
    frz::LimitConfig cfg = frz::default_limit_config(0.0, 10.0, 0u);
    cfg.delta = delta;
    cfg.seed = frz::replica_seed(77u, static_cast<std::uint64_t>(i));
    const frz::LimitPath path = frz::simulate_path(cfg);

    double integral = 0.0;
    double t_prev = cfg.t0, x_prev = cfg.x0;
    auto add = [&](double lo, double hi, double x) {
      const int chunks =
          std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.5)));
      for (int k = 0; k < chunks; ++k) {
        const double a = lo + (hi - lo) * k / chunks;
        const double b = lo + (hi - lo) * (k + 1) / chunks;
        integral += gk15(
            [&](double s) { return frz::detail::table_rate(jt, s, x, 0.0); },
            a, b);
      }
    };
    for (const auto& e : path.events) {
      add(t_prev, e.time, x_prev);
      t_prev = e.time;
      x_prev += e.size;
    }
    add(t_prev, cfg.t_end, x_prev);
    gaps[i] = static_cast<double>(path.events.size()) - integral;
  }
  // N(T) - int Lambda dt is a mean-zero martingale.
  const double mean_gap = frz::sample_mean(gaps);
  CHECK(std::abs(mean_gap) < 3.5 * frz::standard_error(gaps));
}
