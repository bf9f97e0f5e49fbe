#include "frz/coalescent_sim.hpp"

#include <algorithm>
#include <cmath>

#include "frz/errors.hpp"

namespace frz {

namespace {

// Index drawn proportionally to weight(v[i]); total is the precomputed sum.
template <class WeightFn>
std::size_t weighted_pick(const std::vector<double>& v, double total,
                          rng& gen, WeightFn&& weight) {
  const double target = gen.next_u01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    acc += weight(v[i]);
    if (target < acc) return i;
  }
  return v.size() - 1;  // guards accumulated rounding at the top end
}

// Chooses and applies one event given the precomputed rates (the waiting
// time is handled by the callers, which differ in crossing semantics).
EventKind apply_event(ParticleSystem& sys, const CoalescentRates& r,
                      rng& gen) {
  double sx = 0.0, sx2 = 0.0, sy = 0.0;
  for (double x : sys.standard) {
    sx += x;
    sx2 += x * x;
  }
  for (double y : sys.frozen) sy += y;

  auto drop_standard = [&sys](std::size_t i) {
    sys.standard[i] = sys.standard.back();
    sys.standard.pop_back();
  };

  const double u = gen.next_u01() * r.total;
  if (u < r.pair) {
    // Unordered pair proportional to x_i x_j: two mass-proportional draws,
    // rejecting identical indices.
    std::size_t i, j;
    do {
      i = weighted_pick(sys.standard, sx, gen, [](double x) { return x; });
      j = weighted_pick(sys.standard, sx, gen, [](double x) { return x; });
    } while (i == j);
    sys.standard[i] += sys.standard[j];
    drop_standard(j);
    return EventKind::StdStdMerge;
  }
  if (u < r.pair + r.freeze) {
    const std::size_t i =
        weighted_pick(sys.standard, sx2, gen, [](double x) { return x * x; });
    sys.frozen.push_back(sys.standard[i]);
    drop_standard(i);
    return EventKind::Freeze;
  }
  const std::size_t i =
      weighted_pick(sys.standard, sx, gen, [](double x) { return x; });
  const std::size_t j =
      weighted_pick(sys.frozen, sy, gen, [](double y) { return y; });
  sys.frozen[j] += sys.standard[i];
  drop_standard(i);
  return EventKind::StdFrozenMerge;
}

}  // namespace

ParticleSystem init_system(std::vector<double> standard_masses,
                           std::vector<double> frozen_masses, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw config_error("init_system: p must lie in [0, 1]");
  for (double x : standard_masses)
    if (!(x > 0.0) || !std::isfinite(x))
      throw config_error("init_system: standard masses must be positive");
  for (double y : frozen_masses)
    if (!(y > 0.0) || !std::isfinite(y))
      throw config_error("init_system: frozen masses must be positive");
  ParticleSystem sys;
  sys.standard = std::move(standard_masses);
  sys.frozen = std::move(frozen_masses);
  sys.p = p;
  return sys;
}

CoalescentRates coalescent_rates(const ParticleSystem& sys) {
  double sx = 0.0, sx2 = 0.0, sy = 0.0;
  for (double x : sys.standard) {
    sx += x;
    sx2 += x * x;
  }
  for (double y : sys.frozen) sy += y;
  CoalescentRates r;
  r.pair = 0.5 * (sx * sx - sx2);
  r.freeze = 0.5 * sx2;
  r.std_frozen = sys.p * sx * sy;
  r.total = r.pair + r.freeze + r.std_frozen;
  return r;
}

double total_mass(const ParticleSystem& sys) {
  std::vector<double> all;
  all.reserve(sys.standard.size() + sys.frozen.size());
  all.insert(all.end(), sys.standard.begin(), sys.standard.end());
  all.insert(all.end(), sys.frozen.begin(), sys.frozen.end());
  std::sort(all.begin(), all.end());
  double s = 0.0;
  for (double x : all) s += x;
  return s;
}

EventKind gillespie_step(ParticleSystem& sys, rng& gen) {
  if (sys.standard.empty()) return EventKind::Absorbed;
  const CoalescentRates r = coalescent_rates(sys);
  sys.time += gen.next_exponential(r.total);
  return apply_event(sys, r, gen);
}

void run_coalescent(ParticleSystem& sys, double t_end, rng& gen) {
  if (!(t_end >= sys.time))
    throw ordering_error("run_coalescent: t_end lies before the current time");
  while (!sys.standard.empty()) {
    // Peek the waiting time first so an event crossing t_end is never
    // applied; the clock then parks exactly at t_end. On absorption the
    // clock keeps the last event time (run-to-absorption via t_end = inf).
    const CoalescentRates r = coalescent_rates(sys);
    const double dt = gen.next_exponential(r.total);
    if (sys.time + dt > t_end) {
      sys.time = t_end;
      return;
    }
    sys.time += dt;
    apply_event(sys, r, gen);
  }
}

}  // namespace frz
