#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "frz/errors.hpp"
#include "frz/limit_sim.hpp"
#include "frz/limit_tables.hpp"
#include "frz/quadrature.hpp"
#include "frz/rng.hpp"
#include "frz/special_fn.hpp"

namespace frz {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2*pi)
constexpr double kXMaxP1 = -0.8864569954920029;     // argmax of p1

// Fixed 15-point Kronrod pass; used for the table-backed integrals where
// chunking already controls the error.
template <class F>
double fixed_gk15(F&& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double acc = quad_detail::wgk[7] * f(c);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * quad_detail::xgk[j];
    acc += quad_detail::wgk[j] * (f(c - dx) + f(c + dx));
  }
  return acc * h;
}

// Integrates g over [lo, hi] in chunks no longer than max_len.
template <class F>
double chunked_gk15(F&& f, double lo, double hi, double max_len) {
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_len)));
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = lo + (hi - lo) * (static_cast<double>(i) / n);
    const double b = lo + (hi - lo) * (static_cast<double>(i + 1) / n);
    acc += fixed_gk15(f, a, b);
  }
  return acc;
}

// log(e^s - 1), stable across the whole range.
double log_expm1(double s) {
  return s > 36.0 ? s : std::log(std::expm1(s));
}

// (e^s - 1) * e^{log_r} without overflowing the intermediate factor.
double expm1_weighted(double s, double log_r) {
  if (s > 0.5) return std::exp(log_r + log_expm1(s));
  return std::exp(log_r) * std::expm1(s);
}

// Scans log_h on a geometric grid over (0, v_hi]; returns the smallest node
// beyond the last point that is within `nats` of the running maximum.
// Throws domain_error when the integrand has not decayed by the end.
double scan_cutoff(const std::function<double(double)>& log_h, double v_hi,
                   double nats, const char* what) {
  const int n = 400;
  const double v_lo = 1e-6;
  std::vector<double> nodes(n), vals;
  vals.reserve(n);
  double h_max = -std::numeric_limits<double>::infinity();
  // Stop at the first non-finite reading: the integrand (or the test
  // function itself) overflowed there, so only the prefix is usable.
  int scanned = n;
  for (int i = 0; i < n; ++i) {
    nodes[i] = v_lo * std::pow(v_hi / v_lo, static_cast<double>(i) / (n - 1));
    const double h = log_h(nodes[i]);
    if (std::isnan(h) || h == std::numeric_limits<double>::infinity()) {
      scanned = i;
      break;
    }
    vals.push_back(h);
    if (h > h_max) h_max = h;
  }
  if (h_max == -std::numeric_limits<double>::infinity()) {
    if (scanned < n)
      throw domain_error(std::string(what) +
                         ": integrand does not decay fast enough");
    return 0.0;
  }
  int last_above = 0;
  for (int i = 0; i < scanned; ++i)
    if (vals[i] > h_max - nats) last_above = i;
  if (last_above + 8 > scanned)
    throw domain_error(std::string(what) +
                       ": integrand does not decay fast enough");
  return nodes[std::min(last_above + 1, n - 1)];
}

double beta_cap() {
  static const double cap = p1(0.0) / 9.0;
  return cap;
}

void check_lyapunov_params(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0 / 6.0))
    throw domain_error("alpha must lie in (0, 1/6)");
  if (!(beta > 0.0 && beta < std::min(beta_cap(), alpha)))
    throw domain_error("beta must lie in (0, min(p1(0)/9, alpha))");
}

}  // namespace

PathDiagnostics compensator_and_qv(const LimitPath& path, double t) {
  const LimitConfig& cfg = path.config;
  if (!(t >= cfg.t0 - 1e-12 && t <= cfg.t_end + 1e-12))
    throw config_error("diagnostics time outside the simulated span");
  t = std::clamp(t, cfg.t0, cfg.t_end);

  // Breakpoints: start, event times, drift boundaries, evaluation time.
  std::vector<double> cuts{cfg.t0, t};
  for (const auto& e : path.events)
    if (e.time <= t) cuts.push_back(e.time);
  for (const auto& d : path.drift) {
    if (d.lo < t) cuts.push_back(d.lo);
    if (d.hi <= t) cuts.push_back(d.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const bool direct = path.events.size() <= 200;
  const double p = cfg.p;

  double xpre = cfg.x0;
  double qv = 0.0;
  double v = cfg.x0;
  std::size_t ei = 0, di = 0;
  // Events exactly at t0 are applied before any integration.
  while (ei < path.events.size() && path.events[ei].time <= cfg.t0) {
    v += path.events[ei].size;
    ++ei;
  }

  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double u0 = cuts[k];
    const double u1 = cuts[k + 1];
    while (di < path.drift.size() && path.drift[di].hi <= u0) ++di;
    const bool in_drift = di < path.drift.size() &&
                          path.drift[di].lo <= u0 && u1 <= path.drift[di].hi;
    const double rho = in_drift ? path.drift[di].rate : 0.0;
    const double xs = v;

    auto b2 = [&](double s) {
      const double xv = xs + rho * (s - u0);
      if (direct) {
        const KernelMoments m = kernel_moments(s - xv);
        return m.g2 + p * xv * m.g1;
      }
      const double w = s - xv;
      return detail::table_g2(w) + p * xv * detail::table_g1(w);
    };
    auto b3 = [&](double s) {
      const double xv = xs + rho * (s - u0);
      if (direct) {
        const KernelMoments m = kernel_moments(s - xv);
        return m.g3 + 2.0 * p * xv * m.g2;
      }
      const double w = s - xv;
      return detail::table_g3(w) + 2.0 * p * xv * detail::table_g2(w);
    };

    if (direct) {
      xpre += integrate(b2, u0, u1, 1e-12, 1e-8, 4000, "compensator").value;
      qv += integrate(b3, u0, u1, 1e-12, 1e-8, 4000, "variance rate").value;
    } else {
      xpre += chunked_gk15(b2, u0, u1, 0.25);
      qv += chunked_gk15(b3, u0, u1, 0.25);
    }

    v += rho * (u1 - u0);
    while (ei < path.events.size() && path.events[ei].time <= u1) {
      v += path.events[ei].size;
      ++ei;
    }
  }

  PathDiagnostics d;
  d.t = t;
  d.xpre = xpre;
  d.martingale = path.value_at(t) - xpre;
  d.qv = qv;
  return d;
}

double generator_apply_p0(const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime,
                          double x) {
  if (!f || !fprime) throw config_error("generator needs f and f'");
  if (!std::isfinite(x)) throw config_error("generator state must be finite");
  const double w = -x;
  const double lpw = log_p1(w).log_p1;
  const double fx = f(x);

  // Bracket for the decay scan: far beyond where r alone has lost 400 nats.
  const double m = std::max(-w, 0.0);
  const double shift = std::cbrt(m * m * m + 6.0 * 400.0) - m;
  const double v_hi =
      2.0 * std::sqrt(std::max(w - kXMaxP1, 0.0) + shift) + 5.0;

  auto log_h = [&](double v) {
    const double diff = std::abs(f(x + v * v) - fx);
    if (diff == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(diff) + log_p1(w - v * v).log_p1 - lpw;
  };
  const double v_cut = scan_cutoff(log_h, v_hi, 40.0, "generator");
  if (v_cut == 0.0) return -fprime(x);  // f constant along the jumps

  auto g = [&](double v) {
    return (f(x + v * v) - fx) *
           std::exp(log_p1(w - v * v).log_p1 - lpw);
  };
  std::vector<double> breaks{0.0, v_cut};
  if (v_cut > 1.0) breaks.insert(breaks.begin() + 1, std::sqrt(v_cut));
  const double integral =
      integrate_segments<double>(g, breaks, 1e-14, 1e-9, 4000, "generator")
          .value;
  return -fprime(x) + kInvSqrt2Pi * integral;
}

double lyapunov_drift_ratio(double alpha, double beta, double x) {
  check_lyapunov_params(alpha, beta);
  if (!std::isfinite(x)) throw config_error("x must be finite");
  const double w = -x;
  const double lpw = log_p1(w).log_p1;

  if (x >= 0.0) {
    // V = exp(alpha x^3): -V'/V = -3 alpha x^2 and the jump part is
    // int (e^{alpha ((x+v^2)^3 - x^3)} - 1) r dv / sqrt(2 pi).
    auto s_of = [&](double v) {
      const double v2 = v * v;
      return alpha * v2 * (3.0 * x * x + 3.0 * x * v2 + v2 * v2);
    };
    auto log_h = [&](double v) {
      const double s = s_of(v);
      const double ls = s > 1e-300 ? log_expm1(s)
                                   : -std::numeric_limits<double>::infinity();
      return ls + log_p1(w - v * v).log_p1 - lpw;
    };
    const double span = 90.0 / (1.0 / 6.0 - alpha);
    const double v_hi =
        std::sqrt(std::max(std::cbrt(x * x * x + span) - x, 1.0)) + 1.0;
    const double v_cut = scan_cutoff(log_h, v_hi, 46.0, "drift ratio");
    auto g = [&](double v) {
      return expm1_weighted(s_of(v), log_p1(w - v * v).log_p1 - lpw);
    };
    const double integral =
        integrate(g, 0.0, v_cut, 1e-12, 1e-9, 4000, "drift ratio").value;
    return -3.0 * alpha * x * x + kInvSqrt2Pi * integral;
  }

  // x < 0: V = exp(beta |x|^3); the jump path crosses zero at v^2 = |x|.
  const double ax = -x;
  auto s_of = [&](double v) {
    const double v2 = v * v;
    if (v2 < ax) {
      const double d = ax - v2;
      return beta * (d * d * d - ax * ax * ax);
    }
    const double d = v2 - ax;
    return alpha * d * d * d - beta * ax * ax * ax;
  };
  auto log_h = [&](double v) {
    const double s = s_of(v);
    const double la = s > 1e-300 ? log_expm1(s)
                                 : std::log(std::abs(std::expm1(s)) + 1e-300);
    return la + log_p1(w - v * v).log_p1 - lpw;
  };
  const double span = (90.0 + beta * ax * ax * ax) / (1.0 / 6.0 - alpha);
  const double v_hi = std::sqrt(ax + std::cbrt(span)) + 1.0;
  const double v_cut = scan_cutoff(log_h, v_hi, 46.0, "drift ratio");
  auto g = [&](double v) {
    return expm1_weighted(s_of(v), log_p1(w - v * v).log_p1 - lpw);
  };
  std::vector<double> breaks{0.0};
  const double kink = std::sqrt(ax);
  if (kink < v_cut) breaks.push_back(kink);
  breaks.push_back(v_cut);
  const double integral =
      integrate_segments<double>(g, breaks, 1e-12, 1e-9, 4000, "drift ratio")
          .value;
  return 3.0 * beta * x * x + kInvSqrt2Pi * integral;
}

LyapunovReport lyapunov_check(double alpha, double beta, double a,
                              double big_b, const std::vector<double>& grid) {
  check_lyapunov_params(alpha, beta);
  if (!(a > 0.0) || !std::isfinite(a))
    throw config_error("drift margin a must be positive");
  if (!(big_b > 0.0) || !std::isfinite(big_b))
    throw config_error("petite-set radius must be positive");
  if (grid.empty()) throw config_error("grid must be nonempty");

  LyapunovReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.delta_exp = std::cbrt(beta / alpha);
  rep.big_b = big_b;
  rep.a = a;
  rep.b = 0.0;
  rep.all_ok = true;
  const double c_lo = -big_b / rep.delta_exp;
  const double c_hi = big_b;

  for (double x : grid) {
    LyapunovVerdict v;
    v.x = x;
    v.av_ratio = lyapunov_drift_ratio(alpha, beta, x);
    v.inside_c = x >= c_lo && x <= c_hi;
    if (v.inside_c) {
      const double big_v =
          x >= 0.0 ? std::exp(alpha * x * x * x) : std::exp(beta * (-x) * (-x) * (-x));
      const double b_spot = (v.av_ratio + a) * big_v;
      v.bound_ratio = v.av_ratio + a;
      v.ok = std::isfinite(b_spot);
      if (v.ok) rep.b = std::max(rep.b, b_spot);
    } else {
      v.bound_ratio = -a;
      v.ok = v.av_ratio <= -a + 1e-12;
    }
    rep.all_ok = rep.all_ok && v.ok;
    rep.verdicts.push_back(v);
  }
  if (!std::isfinite(rep.b)) rep.all_ok = false;
  return rep;
}

std::vector<double> stationary_samples(double t_burn, double t_sample,
                                       int reps, std::uint64_t seed) {
  if (!(t_burn >= 0.0) || !(t_sample >= t_burn) || !(t_sample > 0.0))
    throw config_error("need 0 <= t_burn <= t_sample and t_sample > 0");
  if (reps < 1) throw config_error("reps must be positive");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    LimitConfig cfg = default_limit_config(
        0.0, t_sample, replica_seed(seed, static_cast<std::uint64_t>(i)));
    const LimitPath path = simulate_path(cfg);
    out.push_back(path.value_at(t_sample) - t_sample);
  }
  return out;
}

}  // namespace frz
