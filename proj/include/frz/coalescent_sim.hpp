#pragma once

#include <vector>

#include "frz/rng.hpp"

namespace frz {

// Finite-particle frozen multiplicative coalescent: standard particles of
// mass x and y merge at rate xy, a standard particle of mass x freezes at
// rate x^2/2, and a standard particle of mass x merges into a frozen
// particle of mass y at rate p x y. Exact Gillespie simulation.

enum class EventKind { StdStdMerge, Freeze, StdFrozenMerge, Absorbed };

struct ParticleSystem {
  std::vector<double> standard;
  std::vector<double> frozen;
  double time = 0.0;
  double p = 0.0;
};

struct CoalescentRates {
  double pair = 0.0;        // sum_{i<j} x_i x_j = ((sum x)^2 - sum x^2)/2
  double freeze = 0.0;      // sum_i x_i^2 / 2
  double std_frozen = 0.0;  // p (sum x)(sum y)
  double total = 0.0;
};

ParticleSystem init_system(std::vector<double> standard_masses,
                           std::vector<double> frozen_masses, double p);

CoalescentRates coalescent_rates(const ParticleSystem& sys);

// Total mass under ascending-sorted summation (conservation checks).
double total_mass(const ParticleSystem& sys);

// Advances time by an exponential of the total rate and applies one event
// chosen proportionally. With no standard particles the system is
// absorbing: returns EventKind::Absorbed and leaves the system untouched.
EventKind gillespie_step(ParticleSystem& sys, rng& gen);

// Runs until the next event would cross t_end (that event is not applied,
// and time is set to t_end) or until absorption (time keeps the value of
// the last applied event, supporting run-to-absorption via t_end = inf).
void run_coalescent(ParticleSystem& sys, double t_end, rng& gen);

}  // namespace frz
