#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "frz/errors.hpp"

namespace frz {

// Adaptive Gauss-Kronrod 7-15 quadrature (QUADPACK QK15 rule with the
// standard error estimate, globally adaptive bisection of the worst
// subinterval). The generic value type R is double or std::complex<double>.

namespace quad_detail {

// Abscissae and weights of the 15-point Kronrod rule on [-1, 1]; the odd
// entries are the embedded 7-point Gauss nodes.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class R>
struct segment {
  double lo = 0.0, hi = 0.0;
  R value{};
  double err = 0.0;
};

template <class R, class F>
segment<R> eval_segment(F& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);

  R fc = f(c);
  R resk = fc * wgk[7];
  R resg = fc * wg[3];
  double resabs = std::abs(fc) * wgk[7];
  R fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    resk = resk + wgk[j] * (fv1[j] + fv2[j]);
    resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg = resg + wg[(j - 1) / 2] * (fv1[j] + fv2[j]);
  }
  const R mean = resk * 0.5;
  double resasc = wgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  resasc *= std::abs(h);
  resabs *= std::abs(h);

  segment<R> s;
  s.lo = lo;
  s.hi = hi;
  s.value = resk * h;
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > 1e-290) err = std::max(err, 50.0 * DBL_EPSILON * resabs);
  s.err = err;
  return s;
}

template <class R>
struct err_less {
  bool operator()(const segment<R>& a, const segment<R>& b) const {
    return a.err < b.err;
  }
};

}  // namespace quad_detail

template <class R>
struct quad_result_t {
  R value{};
  double abs_err = 0.0;
  int intervals = 0;
};

using quad_result = quad_result_t<double>;

// Integrates f over [breaks.front(), breaks.back()], refining until the
// summed error estimate meets max(abs_tol, rel_tol*|value|). Throws
// numeric_error naming `what` and the worst subinterval on failure.
template <class R, class F>
quad_result_t<R> integrate_segments(F&& f, const std::vector<double>& breaks,
                                    double abs_tol, double rel_tol,
                                    int max_intervals, const char* what) {
  using quad_detail::segment;
  std::vector<segment<R>> segs;
  segs.reserve(64);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1]))
      throw domain_error("quadrature breakpoints must be strictly increasing");
    segs.push_back(quad_detail::eval_segment<R>(f, breaks[i], breaks[i + 1]));
  }
  quad_detail::err_less<R> cmp;
  std::make_heap(segs.begin(), segs.end(), cmp);

  auto totals = [&segs]() {
    R v{};
    double e = 0.0;
    for (const auto& s : segs) {
      v = v + s.value;
      e += s.err;
    }
    return std::pair<R, double>(v, e);
  };

  for (;;) {
    auto [val, err] = totals();
    if (err <= std::max(abs_tol, rel_tol * std::abs(val)))
      return {val, err, static_cast<int>(segs.size())};

    std::pop_heap(segs.begin(), segs.end(), cmp);
    segment<R> worst = segs.back();
    segs.pop_back();

    const double mid = 0.5 * (worst.lo + worst.hi);
    const double width = worst.hi - worst.lo;
    // Stop only when the interval can no longer be bisected in floating
    // point. An interval with an endpoint at (or near) zero can shrink
    // essentially forever, which is what integrable endpoint
    // singularities like y^{-1/2} need: the local error decays like
    // sqrt(width), so reaching 1e-10 takes widths around 1e-21.
    const double scale = std::abs(worst.lo) + std::abs(worst.hi);
    if (static_cast<int>(segs.size()) + 2 > max_intervals ||
        width <= 8.0 * DBL_EPSILON * scale || mid <= worst.lo ||
        mid >= worst.hi) {
      std::ostringstream msg;
      msg << "quadrature failed: " << what << ": abs_err=" << err
          << " above tolerance " << std::max(abs_tol, rel_tol * std::abs(val))
          << ", worst subinterval [" << worst.lo << ", " << worst.hi << "]";
      throw numeric_error(msg.str());
    }
    segs.push_back(quad_detail::eval_segment<R>(f, worst.lo, mid));
    std::push_heap(segs.begin(), segs.end(), cmp);
    segs.push_back(quad_detail::eval_segment<R>(f, mid, worst.hi));
    std::push_heap(segs.begin(), segs.end(), cmp);
  }
}

template <class F>
quad_result integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                      double rel_tol = 1e-12, int max_intervals = 10000,
                      const char* what = "integral") {
  return integrate_segments<double>(std::forward<F>(f), {a, b}, abs_tol,
                                    rel_tol, max_intervals, what);
}

template <class F>
quad_result_t<std::complex<double>> integrate_complex(
    F&& f, double a, double b, double abs_tol = 1e-12, double rel_tol = 1e-12,
    int max_intervals = 10000, const char* what = "integral") {
  return integrate_segments<std::complex<double>>(std::forward<F>(f), {a, b},
                                                  abs_tol, rel_tol,
                                                  max_intervals, what);
}

}  // namespace frz
