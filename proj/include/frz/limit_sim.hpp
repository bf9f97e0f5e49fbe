#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "frz/rng.hpp"

namespace frz {

// The jump kernel of the limit process at state (t, x) has density
//   n_p(t, x, dy) = (y + 2 p x) y^{-3/2} r_w(y) / (2 sqrt(2 pi)) dy,  y > 0,
// where w = t - x and r_w(y) = p1(w - y) / p1(w). All rates and drifts
// reduce to w-indexed moments of r_w; with the substitution y = v^2:
//   G1(w) = (2/sqrt(2 pi)) int_0^inf           r_w(v^2) dv
//   G2(w) = (1/sqrt(2 pi)) int_0^inf v^2       r_w(v^2) dv
//   G3(w) = (1/sqrt(2 pi)) int_0^inf v^4       r_w(v^2) dv
//   J0(w, d) = (2/sqrt(2 pi)) int_{sqrt(d)}^inf v^{-2} r_w(v^2) dv
//   J1(w, d) = (2/sqrt(2 pi)) int_{sqrt(d)}^inf        r_w(v^2) dv
// so that the rate of jumps larger than d is J1/2 + p x J0, the mean drift
// is G2 + p x G1 and the second moment rate is G3 + 2 p x G2.
struct KernelMoments {
  double w = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
};

// Direct adaptive quadrature (no tables).
KernelMoments kernel_moments(double w);
double moment_j0(double w, double delta);
double moment_j1(double w, double delta);

// Total rate of jumps of size > delta at state (t, x), by adaptive
// quadrature of the kernel in log space. delta = 0 is allowed when p = 0
// (the small jumps are summable there).
double jump_rate(double t, double x, double p, double delta);

// Mean mass of the jumps below delta per unit time at state (t, x):
//   int_0^delta y n_p(t, x, dy)
//     = (1/sqrt(2 pi)) int_0^{sqrt(delta)} (v^2 + 2 p x) r_w(v^2) dv.
// Used as the compensating drift when small jumps are truncated.
double small_jump_mean_rate(double t, double x, double p, double delta);

struct LimitConfig {
  double p = 0.0;
  double t0 = 0.0;
  double x0 = 0.0;
  double t_end = 0.0;
  double delta = 1e-8;           // truncation level for simulated jumps
  bool compensate_small = false; // add the mean drift of truncated jumps
  std::uint64_t seed = 0;
};

// delta and compensation defaults: 1e-4 with compensation for p > 0 (the
// kernel mass diverges as delta -> 0), 1e-8 without compensation for p = 0
// (total rate stays finite and the truncated mean is O(sqrt(delta))).
LimitConfig default_limit_config(double p, double t_end, std::uint64_t seed);

struct JumpEvent {
  double time = 0.0;
  double size = 0.0;
};

// Constant drift rate on [lo, hi); used for the small-jump compensation.
struct DriftSegment {
  double lo = 0.0;
  double hi = 0.0;
  double rate = 0.0;
};

struct LimitPath {
  LimitConfig config;
  std::vector<JumpEvent> events;      // strictly increasing times
  std::vector<DriftSegment> drift;    // disjoint, increasing, within run span

  // x0 plus all jumps at times <= t plus drift accumulated over [t0, t].
  // Throws domain_error outside [t0, t_end].
  double value_at(double t) const;
};

// Simulates the jump process by thinning against a piecewise-constant
// dominating rate. Deterministic given config.seed.
LimitPath simulate_path(const LimitConfig& config);

// Draws one jump size from n_p(t, x, dy) restricted to y > delta, by
// rejection from a piecewise envelope of r_w. Reusable across nearby states;
// the envelope is rebuilt automatically when w = t - x drifts too far.
class jump_sampler {
 public:
  jump_sampler(double p, double delta);
  double sample(rng& gen, double t, double x);
  int builds() const { return builds_; }

 private:
  struct piece {
    double a = 0.0, b = 0.0;  // y-interval
    double log_rbar = 0.0;    // sup of log r over the piece and the w window
    double flat = 0.0;        // e^{log_rbar} * 2 (sqrt(b) - sqrt(a))
    double sing = 0.0;        // e^{log_rbar} * 2 (a^{-1/2} - b^{-1/2})
  };

  void build(double w);

  double p_ = 0.0;
  double delta_ = 0.0;
  double w_built_ = std::numeric_limits<double>::quiet_NaN();
  double w_halfwidth_ = 0.0;  // envelope stays valid while |w - w_built| <= this
  int nodes_per_decade_ = 64;
  int builds_ = 0;
  int violations_ = 0;
  std::vector<piece> pieces_;
  std::vector<double> cum_flat_;  // inclusive prefix sums of piece.flat
  std::vector<double> cum_sing_;  // inclusive prefix sums of piece.sing
};

// Convenience one-shot draw (builds a fresh envelope every call).
double sample_jump_size(rng& gen, double t, double x, double p, double delta);

struct PathDiagnostics {
  double t = 0.0;
  double xpre = 0.0;        // compensator: x0 + int (G2 + p X G1) ds
  double martingale = 0.0;  // X(t) - xpre
  double qv = 0.0;          // predictable variation: int (G3 + 2 p X G2) ds
};

// Integrates the drift and variance rates along the realized path up to t.
// Uses direct quadrature for paths with at most 200 events and interpolation
// tables beyond that.
PathDiagnostics compensator_and_qv(const LimitPath& path, double t);

// Generator of the recentred p = 0 process at x:
//   A f(x) = -f'(x) + (1/sqrt(2 pi)) int_0^inf (f(x + v^2) - f(x))
//              p1(-x - v^2)/p1(-x) dv.
// Throws domain_error when f grows too fast for the integral to converge.
double generator_apply_p0(const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime,
                          double x);

// A V(x) / V(x) for the drift-condition test function
//   V(x) = exp(alpha x^3) for x >= 0,  exp(beta |x|^3) for x < 0.
double lyapunov_drift_ratio(double alpha, double beta, double x);

struct LyapunovVerdict {
  double x = 0.0;
  double av_ratio = 0.0;     // A V(x) / V(x)
  double bound_ratio = 0.0;  // -a outside C, av_ratio + a inside
  bool inside_c = false;
  bool ok = false;
};

struct LyapunovReport {
  double alpha = 0.0;
  double beta = 0.0;
  double delta_exp = 0.0;  // (beta/alpha)^{1/3}
  double big_b = 0.0;
  double a = 0.0;
  double b = 0.0;  // smallest constant with A V <= -a V + b inside C
  std::vector<LyapunovVerdict> verdicts;
  bool all_ok = false;
};

// Checks the drift condition A V <= -a V + b 1_C on the grid, with
// C = [-big_b / delta_exp, big_b]. Requires 0 < alpha < 1/6 and
// 0 < beta < min(p1(0)/9, alpha).
LyapunovReport lyapunov_check(double alpha, double beta, double a,
                              double big_b, const std::vector<double>& grid);

// Independent draws of Y = X(t_sample) - t_sample for the p = 0 process
// started from zero; t_burn only documents the intended burn-in and must not
// exceed t_sample. Replica i uses replica_seed(seed, i).
std::vector<double> stationary_samples(double t_burn, double t_sample,
                                       int reps, std::uint64_t seed);

namespace detail {

// simulate_path with the thinning knobs exposed: the safety factor applied
// to the windowed rate bound and the maximal window length. Used to verify
// that the simulated law does not depend on them.
LimitPath simulate_path_tuned(const LimitConfig& config, double safety,
                              double max_window);

}  // namespace detail

}  // namespace frz
