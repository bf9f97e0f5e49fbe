#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "frz/errors.hpp"
#include "frz/limit_sim.hpp"
#include "frz/limit_tables.hpp"
#include "frz/quadrature.hpp"
#include "frz/special_fn.hpp"

namespace frz {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2*pi)
constexpr double kXMaxP1 = -0.8864569954920029;     // argmax of p1
const double kLogP1Max = std::log(0.36576590552085216);  // log p1 at the max

// r_w(v^2) decays like exp(-((v^2 - w)^3 - max(-w,0)^3)/6) once v^2 - w has
// passed the density peak. shift(nats) is the increment of v^2 beyond
// max(w - x_max, 0) where that exponent reaches `nats`.
double tail_shift(double w, double nats) {
  const double m = std::max(-w, 0.0);
  return std::cbrt(m * m * m + 6.0 * nats) - m;
}

// Upper integration limit in v: everything beyond contributes less than
// e^{-46} of the peak even with a v^4 weight attached.
double v_cut_for(double w, double log_p1_w) {
  const double prominence = w > kXMaxP1 ? kLogP1Max - log_p1_w : 0.0;
  const double base = std::max(w - kXMaxP1, 0.0);
  return std::sqrt(base + tail_shift(w, 70.0 + prominence));
}

// Scale marking the core of the integrand; used as an interior breakpoint
// so the first Kronrod pass already sees the support.
double v_core_for(double w) {
  const double base = std::max(w - kXMaxP1, 0.0);
  return std::sqrt(base + tail_shift(w, 6.0));
}

std::vector<double> ascending_breaks(std::vector<double> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts)
    if (out.empty() || p > out.back() * (1.0 + 1e-12) + 1e-300)
      out.push_back(p);
  return out;
}

void check_state(double t, double x, double p, double delta) {
  if (!(std::isfinite(t) && std::isfinite(x) && std::isfinite(p) &&
        std::isfinite(delta)))
    throw config_error("state (t, x, p, delta) must be finite");
  if (!(p >= 0.0 && p <= 1.0)) throw config_error("p must lie in [0, 1]");
  if (x < 0.0) throw config_error("x must be nonnegative");
  if (delta < 0.0) throw config_error("delta must be nonnegative");
  if (p > 0.0 && delta == 0.0)
    throw config_error("delta must be positive when p > 0");
}

}  // namespace

KernelMoments kernel_moments(double w) {
  if (!std::isfinite(w)) throw config_error("w must be finite");
  const double lpw = log_p1(w).log_p1;
  const double vc = v_cut_for(w, lpw);
  const auto breaks = ascending_breaks({0.0, v_core_for(w), vc});
  auto r = [w, lpw](double v) {
    return std::exp(log_p1(w - v * v).log_p1 - lpw);
  };
  KernelMoments m;
  m.w = w;
  m.g1 = 2.0 * kInvSqrt2Pi *
         integrate_segments<double>([&](double v) { return r(v); }, breaks,
                                    1e-15, 1e-10, 2000, "G1 moment")
             .value;
  m.g2 = kInvSqrt2Pi *
         integrate_segments<double>([&](double v) { return v * v * r(v); },
                                    breaks, 1e-15, 1e-10, 2000, "G2 moment")
             .value;
  m.g3 = kInvSqrt2Pi *
         integrate_segments<double>(
             [&](double v) { return v * v * v * v * r(v); }, breaks, 1e-15,
             1e-10, 2000, "G3 moment")
             .value;
  return m;
}

namespace {

std::vector<double> j_breaks(double vd, double w, double vc) {
  std::vector<double> pts{vd, v_core_for(w), vc};
  // Geometric ladder out of the lower end; the integrand varies fastest
  // there for the v^{-2} weight.
  for (double e = vd * 8.0; e < vc; e *= 8.0) pts.push_back(e);
  auto breaks = ascending_breaks(pts);
  // Drop anything below vd (v_core can undercut it for tiny cutoffs).
  while (breaks.size() > 1 && breaks.front() < vd * (1.0 - 1e-12))
    breaks.erase(breaks.begin());
  return breaks;
}

}  // namespace

double moment_j0(double w, double delta) {
  if (!(std::isfinite(w) && delta > 0.0 && std::isfinite(delta)))
    throw config_error("moment_j0 requires finite w and delta > 0");
  const double lpw = log_p1(w).log_p1;
  const double vd = std::sqrt(delta);
  const double vc = v_cut_for(w, lpw);
  if (vd >= vc) return 0.0;
  auto f = [w, lpw](double v) {
    return std::exp(log_p1(w - v * v).log_p1 - lpw) / (v * v);
  };
  return 2.0 * kInvSqrt2Pi *
         integrate_segments<double>(f, j_breaks(vd, w, vc), 1e-15, 1e-10, 4000,
                                    "J0 moment")
             .value;
}

double moment_j1(double w, double delta) {
  if (!(std::isfinite(w) && delta > 0.0 && std::isfinite(delta)))
    throw config_error("moment_j1 requires finite w and delta > 0");
  const double lpw = log_p1(w).log_p1;
  const double vd = std::sqrt(delta);
  const double vc = v_cut_for(w, lpw);
  if (vd >= vc) return 0.0;
  auto f = [w, lpw](double v) {
    return std::exp(log_p1(w - v * v).log_p1 - lpw);
  };
  return 2.0 * kInvSqrt2Pi *
         integrate_segments<double>(f, j_breaks(vd, w, vc), 1e-15, 1e-10, 4000,
                                    "J1 moment")
             .value;
}

double jump_rate(double t, double x, double p, double delta) {
  check_state(t, x, p, delta);
  const double w = t - x;
  const double lpw = log_p1(w).log_p1;
  if (delta == 0.0) {
    // p = 0: Lambda = G1 / 2 and the v-substitution removes the endpoint.
    const double vc = v_cut_for(w, lpw);
    const auto breaks = ascending_breaks({0.0, v_core_for(w), vc});
    auto f = [w, lpw](double v) {
      return std::exp(log_p1(w - v * v).log_p1 - lpw);
    };
    return kInvSqrt2Pi * integrate_segments<double>(f, breaks, 1e-15, 1e-10,
                                                    2000, "jump rate")
                             .value;
  }
  const double vc = v_cut_for(w, lpw);
  const double y_cut = vc * vc;
  if (y_cut <= delta) return 0.0;
  const double z_lo = std::log(delta);
  const double z_hi = std::log(y_cut);
  std::vector<double> pts{z_lo, z_hi};
  const double z_core = 2.0 * std::log(v_core_for(w));
  if (z_core > z_lo && z_core < z_hi) pts.push_back(z_core);
  if (z_lo < 0.0 && z_hi > 0.0) pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  auto f = [w, lpw, p, x](double z) {
    const double y = std::exp(z);
    const double log_r = log_p1(w - y).log_p1 - lpw;
    return 0.5 * kInvSqrt2Pi * (y + 2.0 * p * x) *
           std::exp(-0.5 * z + log_r);
  };
  return integrate_segments<double>(f, pts, 1e-15, 1e-10, 4000, "jump rate")
      .value;
}

double small_jump_mean_rate(double t, double x, double p, double delta) {
  check_state(t, x, p, delta);
  if (delta == 0.0) return 0.0;
  const double w = t - x;
  const double lpw = log_p1(w).log_p1;
  // 5-node Gauss-Legendre on [0, sqrt(delta)]; the integrand is analytic
  // and nearly constant at the deltas in use (<= 1e-3).
  static constexpr double nodes[5] = {
      0.046910077030668004, 0.23076534494715845, 0.5, 0.76923465505284155,
      0.95308992296933200};
  static constexpr double weights[5] = {
      0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
      0.23931433524968324, 0.11846344252809454};
  const double vd = std::sqrt(delta);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double v = vd * nodes[i];
    const double r = std::exp(log_p1(w - v * v).log_p1 - lpw);
    acc += weights[i] * (v * v + 2.0 * p * x) * r;
  }
  return kInvSqrt2Pi * vd * acc;
}

namespace detail {

w_spline::w_spline(double lo, double step, std::vector<double> log_values)
    : lo_(lo),
      hi_(lo + step * static_cast<double>(log_values.size() - 1)),
      step_(step),
      v_(std::move(log_values)) {
  const std::size_t n = v_.size();
  m_.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) m_[i] = 0.5 * (v_[i + 1] - v_[i - 1]);
  if (n >= 2) {
    m_[0] = v_[1] - v_[0];
    m_[n - 1] = v_[n - 1] - v_[n - 2];
  }
}

namespace {

std::size_t table_nodes() {
  return static_cast<std::size_t>(
             std::lround((table_w_hi - table_w_lo) / table_w_step)) +
         1;
}

g_tables build_g_tables() {
  const std::size_t n = table_nodes();
  std::vector<double> l1(n), l2(n), l3(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = table_w_lo + table_w_step * static_cast<double>(i);
    const KernelMoments m = kernel_moments(w);
    l1[i] = std::log(m.g1);
    l2[i] = std::log(m.g2);
    l3[i] = std::log(m.g3);
  }
  g_tables t;
  t.g1 = w_spline(table_w_lo, table_w_step, std::move(l1));
  t.g2 = w_spline(table_w_lo, table_w_step, std::move(l2));
  t.g3 = w_spline(table_w_lo, table_w_step, std::move(l3));
  return t;
}

std::unique_ptr<j_tables> build_j_tables(double delta) {
  const std::size_t n = table_nodes();
  std::vector<double> l0(n), l1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = table_w_lo + table_w_step * static_cast<double>(i);
    l0[i] = std::log(moment_j0(w, delta));
    l1[i] = std::log(moment_j1(w, delta));
  }
  auto t = std::make_unique<j_tables>();
  t->delta = delta;
  t->j0 = w_spline(table_w_lo, table_w_step, std::move(l0));
  t->j1 = w_spline(table_w_lo, table_w_step, std::move(l1));
  return t;
}

}  // namespace

const g_tables& get_g_tables() {
  static const g_tables tables = build_g_tables();
  return tables;
}

const j_tables& get_j_tables(double delta) {
  if (!(delta > 0.0 && std::isfinite(delta)))
    throw config_error("jump tables require delta > 0");
  static std::mutex mu;
  static std::map<double, std::unique_ptr<j_tables>> registry;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = registry[delta];
  if (!slot) slot = build_j_tables(delta);
  return *slot;
}

double table_g1(double w) {
  const g_tables& t = get_g_tables();
  return t.g1.covers(w) ? t.g1.eval(w) : kernel_moments(w).g1;
}

double table_g2(double w) {
  const g_tables& t = get_g_tables();
  return t.g2.covers(w) ? t.g2.eval(w) : kernel_moments(w).g2;
}

double table_g3(double w) {
  const g_tables& t = get_g_tables();
  return t.g3.covers(w) ? t.g3.eval(w) : kernel_moments(w).g3;
}

double table_j0(const j_tables& jt, double w) {
  return jt.j0.covers(w) ? jt.j0.eval(w) : moment_j0(w, jt.delta);
}

double table_j1(const j_tables& jt, double w) {
  return jt.j1.covers(w) ? jt.j1.eval(w) : moment_j1(w, jt.delta);
}

double table_rate(const j_tables& jt, double t, double x, double p) {
  const double w = t - x;
  return 0.5 * table_j1(jt, w) + p * x * table_j0(jt, w);
}

}  // namespace detail

}  // namespace frz
