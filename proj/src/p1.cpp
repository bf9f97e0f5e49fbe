#include <cmath>
#include <functional>
#include <sstream>

#include "frz/errors.hpp"
#include "frz/special_fn.hpp"

namespace frz {
namespace detail {

// Tail coefficients a_m = (-1)^m (8/9)^m/(2m+1)! * prod_{j=0}^{3m-1}(5/2+j),
// rounded once to double from an exact rational evaluation.
const double tail_coeff[tail_terms] = {
    1.0,
    -5.83333333333333304e+00,
    6.95138888888888857e+01,
    -1.24738811728395058e+03,
    2.98853403099279822e+04,
    -8.95564031287508551e+05,
    3.22154283477034345e+07,
    -1.35228095659526563e+09,
    6.48813133966436768e+10,
    -3.50238941761511719e+12,
    2.10084991899946781e+14,
    -1.38624263594586100e+16,
    9.97902164181582976e+17,
    -7.78235751886739538e+19,
    6.53625384471541422e+21,
    -5.88190220981668223e+23,
    5.64601342327715900e+25,
};

// log of x^{-5/2}/sqrt(2 pi) * (1 + sum_{m>=1} a_m x^{-3m}).
double log_p1_tail(double x) {
  const double t = 1.0 / (x * x * x);
  double s = 0.0;
  for (int m = tail_terms - 1; m >= 1; --m) s = (s + tail_coeff[m]) * t;
  return -2.5 * std::log(x) - 0.5 * std::log(2.0 * std::acos(-1.0)) +
         std::log1p(s);
}

}  // namespace detail

namespace {

// Bracket -(x*Ai + 2*Ai') at z = x^2/4, returned on the scaled side together
// with the exponent bookkeeping already folded into log space:
//   log p1(x) = -max(-x,0)^3/6 + log(bracket_scaled/2).
// For z <= z_switch the bracket is formed in double-double before any
// rounding, which is what survives the cancellation at moderate x > 0.
double log_half_bracket(double x) {
  const double z = 0.25 * x * x;
  if (z <= detail::z_switch) {
    const auto a = detail::airy_maclaurin_dd(z);
    const dd br = -(dd(x) * a.ai + 2.0 * a.aip);
    const double zeta = (2.0 / 3.0) * z * std::sqrt(z);
    return zeta + std::log(0.5 * to_double(br));
  }
  const auto a = detail::airy_asymptotic(z);
  return std::log(-0.5 * (x * a.ai_s + 2.0 * a.aip_s));
}

double neg_cube_term(double x) {
  const double m = std::max(-x, 0.0);
  return -(m * m * m) / 6.0;
}

}  // namespace

LogDensityValue log_p1(double x) {
  if (!std::isfinite(x)) throw domain_error("log_p1: x must be finite");
  LogDensityValue out;
  out.x = x;
  if (x > detail::x_switch_pos) {
    out.log_p1 = detail::log_p1_tail(x);
  } else {
    out.log_p1 = neg_cube_term(x) + log_half_bracket(x);
  }
  return out;
}

double p1(double x) { return std::exp(log_p1(x).log_p1); }

double p1_ratio_log(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw domain_error("p1_ratio_log: arguments must be finite");
  if (y < 0.0) throw domain_error("p1_ratio_log: y must be nonnegative");
  if (y == 0.0) return 0.0;
  return log_p1(x - y).log_p1 - log_p1(x).log_p1;
}

namespace {

// Scaled derivative bracket D(x) = (1 + x^3/2) ai_s + x^2 aip_s; p1'(x) =
// -exp(-max(-x,0)^3/6) * D(x) / 2, so D carries the sign and the root.
dd derivative_bracket_dd(double x) {
  const double z = 0.25 * x * x;
  const auto a = detail::airy_maclaurin_dd(z);
  const dd x3 = dd(x) * dd(x) * dd(x);
  return (dd(1.0) + x3 / 2.0) * a.ai + (dd(x) * x) * a.aip;
}

}  // namespace

double p1_prime(double x) {
  if (!std::isfinite(x)) throw domain_error("p1_prime: x must be finite");
  const double z = 0.25 * x * x;
  if (z <= detail::z_switch) {
    const double zeta = (2.0 / 3.0) * z * std::sqrt(z);
    const double d = to_double(derivative_bracket_dd(x));
    return -0.5 * std::exp(neg_cube_term(x) + zeta) * d;
  }
  const auto a = detail::airy_asymptotic(z);
  const double d = (1.0 + 0.5 * x * x * x) * a.ai_s + x * x * a.aip_s;
  return -0.5 * std::exp(neg_cube_term(x)) * d;
}

XMax find_xmax() {
  // Golden-section maximization of log p1 on the unimodal bracket.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = -1.5, b = -0.3;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = log_p1(c).log_p1;
  double fd = log_p1(d).log_p1;
  int iters = 0;
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = log_p1(c).log_p1;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = log_p1(d).log_p1;
    }
    if (++iters > 200) {
      std::ostringstream msg;
      msg << "find_xmax: golden-section failed to converge, bracket [" << a
          << ", " << b << "]";
      throw numeric_error(msg.str());
    }
  }
  double x0 = 0.5 * (a + b);

  // Polish on the closed-form derivative bracket: D < 0 left of the maximum,
  // D > 0 right of it, so bisect a sign change around the golden estimate.
  double lo = x0 - 1e-6, hi = x0 + 1e-6;
  double dlo = to_double(derivative_bracket_dd(lo));
  double dhi = to_double(derivative_bracket_dd(hi));
  if (dlo < 0.0 && dhi > 0.0) {
    for (int i = 0; i < 80 && hi - lo > 4e-17; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (to_double(derivative_bracket_dd(mid)) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    x0 = 0.5 * (lo + hi);
  }

  XMax out;
  out.x_max = x0;
  out.p1_at_max = p1(x0);
  return out;
}

namespace detail {

double log_cutoff(double (*log_f)(double, const void*), const void* ctx,
                  double lo, double hi_limit, double nats) {
  // Scan a log-spaced grid for the maximum, then bisect the -nats crossing
  // to its right.
  const int n = 240;
  double best = -1e308;
  double best_y = lo;
  const double ratio = std::log(hi_limit / lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double y = lo * std::exp(i * ratio);
    const double v = log_f(y, ctx);
    if (v > best) {
      best = v;
      best_y = y;
    }
  }
  const double target = best - nats;
  if (log_f(hi_limit, ctx) > target) return hi_limit;
  double a = best_y, b = hi_limit;
  for (int i = 0; i < 200 && (b - a) > 1e-9 * (1.0 + b); ++i) {
    const double mid = 0.5 * (a + b);
    if (log_f(mid, ctx) > target)
      a = mid;
    else
      b = mid;
  }
  return b;
}

}  // namespace detail

}  // namespace frz
