#include <cmath>
#include <vector>

#include "doctest.h"
#include "frz/coalescent_sim.hpp"
#include "frz/errors.hpp"
#include "frz/rng.hpp"

using frz::EventKind;

TEST_CASE("system construction and validation") {
  auto one = frz::init_system({1.0}, {}, 0.5);
  CHECK(one.standard.size() == 1);
  CHECK(one.time == 0.0);

  auto absorbing = frz::init_system({}, {2.0}, 0.5);
  frz::rng gen(1);
  CHECK(frz::gillespie_step(absorbing, gen) == EventKind::Absorbed);
  CHECK(absorbing.time == 0.0);
  CHECK(absorbing.frozen == std::vector<double>{2.0});

  CHECK_THROWS_AS(frz::init_system({0.0}, {}, 0.5), frz::config_error);
  CHECK_THROWS_AS(frz::init_system({-1.0}, {}, 0.5), frz::config_error);
  CHECK_THROWS_AS(frz::init_system({1.0}, {0.0}, 0.5), frz::config_error);
  CHECK_THROWS_AS(frz::init_system({1.0}, {}, 1.5), frz::config_error);
}

TEST_CASE("rate table arithmetic") {
  // standard=[1,1]: pair 1, freeze 1/2 + 1/2 -> total 2.
  auto two = frz::init_system({1.0, 1.0}, {}, 0.7);
  const auto r2 = frz::coalescent_rates(two);
  CHECK(r2.pair == doctest::Approx(1.0));
  CHECK(r2.freeze == doctest::Approx(1.0));
  CHECK(r2.total == doctest::Approx(2.0));

  // Three-particle reference system: [0.5, 0.5] standard, [1] frozen, p=1:
  // pair 0.25, freeze 0.25, std-frozen 1 -> total 1.5.
  auto three = frz::init_system({0.5, 0.5}, {1.0}, 1.0);
  const auto r3 = frz::coalescent_rates(three);
  CHECK(r3.pair == doctest::Approx(0.25));
  CHECK(r3.freeze == doctest::Approx(0.25));
  CHECK(r3.std_frozen == doctest::Approx(1.0));
  CHECK(r3.total == doctest::Approx(1.5));
}

TEST_CASE("single particle freezes at rate 1/2: mean absorption time 2") {
  frz::rng gen(2718);
  double sum = 0.0;
  const int reps = 10000;
  for (int i = 0; i < reps; ++i) {
    auto sys = frz::init_system({1.0}, {}, 0.0);
    frz::run_coalescent(sys, HUGE_VAL, gen);
    CHECK(sys.standard.empty());
    CHECK(sys.frozen == std::vector<double>{1.0});
    sum += sys.time;
  }
  // Exponential(1/2): mean 2, sd 2; 10^4 replicas pin the mean to ~2%.
  CHECK(sum / reps == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("mass conservation and monotonicity along a trajectory") {
  frz::rng gen(99);
  auto sys = frz::init_system({0.3, 0.7, 1.1, 0.4, 0.9, 0.6}, {0.5}, 0.5);
  const double m0 = frz::total_mass(sys);
  double frozen_mass = 0.5;
  std::size_t n_standard = 6;
  while (true) {
    const auto kind = frz::gillespie_step(sys, gen);
    if (kind == EventKind::Absorbed) break;
    CHECK(frz::total_mass(sys) == doctest::Approx(m0).epsilon(1e-13));
    CHECK(sys.standard.size() <= n_standard);
    n_standard = sys.standard.size();
    double fm = 0.0;
    for (double y : sys.frozen) fm += y;
    CHECK(fm >= frozen_mass - 1e-12);
    frozen_mass = fm;
  }
  CHECK(sys.standard.empty());
  CHECK(frozen_mass == doctest::Approx(m0).epsilon(1e-13));
}

TEST_CASE("p=0 never merges standard into frozen") {
  frz::rng gen(123);
  for (int rep = 0; rep < 50; ++rep) {
    auto sys = frz::init_system({1.0, 0.5, 0.25, 2.0}, {1.5}, 0.0);
    while (true) {
      const auto kind = frz::gillespie_step(sys, gen);
      if (kind == EventKind::Absorbed) break;
      CHECK(kind != EventKind::StdFrozenMerge);
    }
    // With p=0, the frozen particle of mass 1.5 stays untouched forever.
    bool found = false;
    for (double y : sys.frozen) found = found || y == 1.5;
    CHECK(found);
  }
}

TEST_CASE("first-event distribution matches the analytic rates") {
  // [0.5,0.5] standard + [1] frozen at p=1: first event is StdStdMerge,
  // Freeze, StdFrozenMerge with probabilities 1/6, 1/6, 2/3. Chi-squared
  // against those on 2e4 replicas, 1% critical value for 2 degrees of
  // freedom = 2 ln 100.
  frz::rng gen(31415);
  const int reps = 20000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < reps; ++i) {
    auto sys = frz::init_system({0.5, 0.5}, {1.0}, 1.0);
    const auto kind = frz::gillespie_step(sys, gen);
    if (kind == EventKind::StdStdMerge) ++counts[0];
    if (kind == EventKind::Freeze) ++counts[1];
    if (kind == EventKind::StdFrozenMerge) ++counts[2];
  }
  const double expected[3] = {reps / 6.0, reps / 6.0, reps * 2.0 / 3.0};
  double chi2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = counts[k] - expected[k];
    chi2 += d * d / expected[k];
  }
  CHECK(chi2 < 2.0 * std::log(100.0));
}

TEST_CASE("run_coalescent endpoint semantics") {
  frz::rng gen(7);
  auto sys = frz::init_system({1.0, 1.0, 1.0}, {}, 0.5);

  frz::run_coalescent(sys, 0.0, gen);  // t_end == time: nothing happens
  CHECK(sys.time == 0.0);
  CHECK(sys.standard.size() == 3);

  frz::run_coalescent(sys, 0.3, gen);
  CHECK(sys.time == 0.3);  // clock parks exactly at t_end
  CHECK_THROWS_AS(frz::run_coalescent(sys, 0.1, gen), frz::ordering_error);

  // All mass ends frozen at absorption: n=64 particles of mass 64^{-1/3}.
  auto fleet = frz::init_system(
      std::vector<double>(64, std::pow(64.0, -1.0 / 3.0)), {}, 1.0);
  const double m0 = frz::total_mass(fleet);
  frz::run_coalescent(fleet, HUGE_VAL, gen);
  CHECK(fleet.standard.empty());
  double frozen_sum = 0.0;
  for (double y : fleet.frozen) frozen_sum += y;
  CHECK(frozen_sum == doctest::Approx(m0).epsilon(1e-12));
}
