#include <algorithm>
#include <cmath>
#include <vector>

#include "frz/errors.hpp"
#include "frz/limit_sim.hpp"
#include "frz/limit_tables.hpp"
#include "frz/special_fn.hpp"

namespace frz {

namespace {

constexpr double kXMaxP1 = -0.8864569954920029;  // argmax of p1

void check_config(const LimitConfig& cfg) {
  if (!(std::isfinite(cfg.p) && std::isfinite(cfg.t0) &&
        std::isfinite(cfg.x0) && std::isfinite(cfg.t_end) &&
        std::isfinite(cfg.delta)))
    throw config_error("limit config fields must be finite");
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0))
    throw config_error("p must lie in [0, 1]");
  if (cfg.x0 < 0.0) throw config_error("x0 must be nonnegative");
  if (!(cfg.t_end > cfg.t0)) throw config_error("t_end must exceed t0");
  if (!(cfg.delta > 0.0)) throw config_error("delta must be positive");
}

}  // namespace

LimitConfig default_limit_config(double p, double t_end, std::uint64_t seed) {
  LimitConfig cfg;
  cfg.p = p;
  cfg.t_end = t_end;
  cfg.delta = p > 0.0 ? 1e-4 : 1e-8;
  cfg.compensate_small = p > 0.0;
  cfg.seed = seed;
  check_config(cfg);
  return cfg;
}

double LimitPath::value_at(double t) const {
  if (!(t >= config.t0 - 1e-12 && t <= config.t_end + 1e-12))
    throw domain_error("value_at: time outside the simulated span");
  double v = config.x0;
  for (const auto& e : events) {
    if (e.time > t) break;
    v += e.size;
  }
  for (const auto& d : drift) {
    if (d.lo >= t) break;
    v += d.rate * (std::min(d.hi, t) - d.lo);
  }
  return v;
}

jump_sampler::jump_sampler(double p, double delta) : p_(p), delta_(delta) {
  if (!(std::isfinite(p) && p >= 0.0 && p <= 1.0))
    throw config_error("jump sampler requires p in [0, 1]");
  if (!(std::isfinite(delta) && delta > 0.0))
    throw config_error("jump sampler requires delta > 0");
}

void jump_sampler::build(double w) {
  ++builds_;
  w_built_ = w;
  // The envelope must dominate r for every w in a window around w_built;
  // size the window so the dominating constant costs at most ~one nat,
  // using the local slope of log p1.
  const double dlp =
      (log_p1(w + 1e-3).log_p1 - log_p1(w - 1e-3).log_p1) / 2e-3;
  w_halfwidth_ = std::clamp(1.0 / (std::abs(dlp) + 2.0), 5e-4, 0.25);
  const double w_lo = w - w_halfwidth_;
  const double w_hi = w + w_halfwidth_;
  // p1 is unimodal, so its minimum over the window sits at an endpoint.
  const double lp_base =
      std::min(log_p1(w_lo).log_p1, log_p1(w_hi).log_p1);

  // Upper end of the support: beyond it r is below e^{-46} of its peak for
  // every w in the window.
  const double lp_hi = log_p1(w_hi).log_p1;
  const double prominence =
      w_hi > kXMaxP1 ? std::log(0.36576590552085216) - lp_hi : 0.0;
  const double m = std::max(-w_hi, 0.0);
  const double shift =
      std::cbrt(m * m * m + 6.0 * (70.0 + prominence)) - m;
  const double y_cut =
      std::max(w_hi - kXMaxP1, 0.0) + shift;

  pieces_.clear();
  cum_flat_.clear();
  cum_sing_.clear();
  if (y_cut <= delta_)
    throw numeric_error("jump sampler: truncation above the kernel support");
  const double decades = std::log10(y_cut / delta_);
  const int n = std::max(
      1, static_cast<int>(std::ceil(decades * nodes_per_decade_)));
  pieces_.reserve(static_cast<std::size_t>(n));
  cum_flat_.reserve(static_cast<std::size_t>(n));
  cum_sing_.reserve(static_cast<std::size_t>(n));
  double a = delta_;
  double acc_flat = 0.0, acc_sing = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double b =
        i == n ? y_cut
               : delta_ * std::pow(10.0, static_cast<double>(i) /
                                             nodes_per_decade_);
    piece pc;
    pc.a = a;
    pc.b = b;
    // sup over y in [a, b] and w in the window of log p1(w - y): the
    // argument ranges over [w_lo - b, w_hi - a] and p1 is unimodal with
    // peak at kXMaxP1.
    const double arg = std::clamp(kXMaxP1, w_lo - b, w_hi - a);
    pc.log_rbar = log_p1(arg).log_p1 - lp_base;
    const double scale = std::exp(pc.log_rbar);
    pc.flat = scale * 2.0 * (std::sqrt(b) - std::sqrt(a));
    pc.sing = scale * 2.0 * (1.0 / std::sqrt(a) - 1.0 / std::sqrt(b));
    acc_flat += pc.flat;
    acc_sing += pc.sing;
    pieces_.push_back(pc);
    cum_flat_.push_back(acc_flat);
    cum_sing_.push_back(acc_sing);
    a = b;
  }
}

double jump_sampler::sample(rng& gen, double t, double x) {
  if (x < 0.0) throw config_error("jump sampler requires x >= 0");
  const double w = t - x;
  if (!(std::abs(w - w_built_) <= w_halfwidth_)) build(w);

  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double px2 = 2.0 * p_ * x;
    const double total = cum_flat_.back() + px2 * cum_sing_.back();
    if (!(total > 0.0) || !std::isfinite(total))
      throw numeric_error("jump sampler: degenerate envelope mass");

    // cum_flat + px2 * cum_sing is increasing; bisect for the piece.
    const double u = gen.next_u01() * total;
    std::size_t lo = 0, hi = pieces_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cum_flat_[mid] + px2 * cum_sing_[mid] < u)
        lo = mid + 1;
      else
        hi = mid;
    }
    const piece* chosen = &pieces_[lo];
    const double flat_mass = chosen->flat;
    const double sing_mass = px2 * chosen->sing;

    double y;
    if (gen.next_u01() * (flat_mass + sing_mass) < sing_mass) {
      // y^{-3/2} component: invert 2(a^{-1/2} - y^{-1/2}).
      const double ra = 1.0 / std::sqrt(chosen->a);
      const double rb = 1.0 / std::sqrt(chosen->b);
      const double r = ra - gen.next_u01() * (ra - rb);
      y = 1.0 / (r * r);
    } else {
      // y^{-1/2} component: invert 2(y^{1/2} - a^{1/2}).
      const double sa = std::sqrt(chosen->a);
      const double sb = std::sqrt(chosen->b);
      const double s = sa + gen.next_u01() * (sb - sa);
      y = s * s;
    }

    const double slack = p1_ratio_log(w, y) - chosen->log_rbar;
    if (slack > 1e-9) {
      // The piecewise sup was computed exactly, so this can only be noise;
      // refine the grid and rebuild defensively.
      if (++violations_ > 6)
        throw numeric_error("jump sampler: persistent envelope violation");
      nodes_per_decade_ = std::min(1024, nodes_per_decade_ * 2);
      build(w);
      continue;
    }
    if (std::log(gen.next_u01_open0()) <= slack) return y;
  }
  throw numeric_error("jump sampler: acceptance stalled");
}

double sample_jump_size(rng& gen, double t, double x, double p, double delta) {
  jump_sampler sampler(p, delta);
  return sampler.sample(gen, t, x);
}

namespace detail {

LimitPath simulate_path_tuned(const LimitConfig& cfg, double safety,
                              double max_window) {
  check_config(cfg);
  if (!(safety > 1.0) || !(max_window > 0.0))
    throw config_error("thinning needs safety > 1 and max_window > 0");

  const j_tables& jt = get_j_tables(cfg.delta);
  jump_sampler sampler(cfg.p, cfg.delta);
  rng gen(cfg.seed);

  LimitPath path;
  path.config = cfg;
  double t = cfg.t0;
  double x = cfg.x0;
  double win = max_window;
  const double win_min = 1e-3 * max_window;

  while (t < cfg.t_end) {
    const double s_end = std::min(t + win, cfg.t_end);
    const double rho =
        cfg.compensate_small
            ? small_jump_mean_rate(t, x, cfg.p, cfg.delta)
            : 0.0;

    // Dominating rate over the window, scanned on a 17-point grid at the
    // drift-extrapolated state.
    double lam_bar = 0.0;
    for (int i = 0; i <= 16; ++i) {
      const double tau = t + (s_end - t) * (static_cast<double>(i) / 16.0);
      const double xi = x + rho * (tau - t);
      lam_bar = std::max(lam_bar, table_rate(jt, tau, xi, cfg.p));
    }
    lam_bar *= safety;
    if (!(lam_bar > 0.0) || !std::isfinite(lam_bar))
      throw numeric_error("thinning bound is not positive and finite");

    bool violated = false;
    bool jumped = false;
    double tau = t;
    for (;;) {
      tau += gen.next_exponential(lam_bar);
      if (tau >= s_end) break;
      const double x_tau = x + rho * (tau - t);
      const double lam = table_rate(jt, tau, x_tau, cfg.p);
      if (lam > lam_bar) {
        violated = true;
        break;
      }
      if (gen.next_u01() * lam_bar < lam) {
        const double y = sampler.sample(gen, tau, x_tau);
        if (rho != 0.0) path.drift.push_back({t, tau, rho});
        path.events.push_back({tau, y});
        x = x_tau + y;
        t = tau;
        jumped = true;
        break;
      }
    }

    if (violated) {
      // The dominating bound was undershot; nothing was committed in this
      // window, so halve it and redraw from the window start.
      win *= 0.5;
      if (win < win_min)
        throw numeric_error("thinning window collapsed below its floor");
      continue;
    }
    if (jumped) continue;  // window restarts at the accepted jump
    if (rho != 0.0) {
      path.drift.push_back({t, s_end, rho});
      x += rho * (s_end - t);
    }
    t = s_end;
    win = std::min(max_window, 2.0 * win);
  }
  return path;
}

}  // namespace detail

LimitPath simulate_path(const LimitConfig& config) {
  return detail::simulate_path_tuned(config, 1.5, 0.1);
}

}  // namespace frz
