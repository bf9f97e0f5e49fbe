#include <cmath>
#include <complex>
#include <vector>

#include "frz/errors.hpp"
#include "frz/quadrature.hpp"
#include "frz/special_fn.hpp"

namespace frz {
namespace detail {

namespace {

using cplx = std::complex<double>;

const double kPi = std::acos(-1.0);
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

// e^{-s} - 1 + s without cancellation for s >= 0.
double expm1_minus(double s) {
  if (s < 0.03) {
    return s * s *
           (0.5 +
            s * (-1.0 / 6.0 +
                 s * (1.0 / 24.0 +
                      s * (-1.0 / 120.0 +
                           s * (1.0 / 720.0 +
                                s * (-1.0 / 5040.0 + s / 40320.0))))));
  }
  return std::expm1(-s) + s;
}

// e^{-iw} - 1 + iw = (cos w - 1) + i(w - sin w), both parts cancellation-free.
cplx cis_minus(double w) {
  const double h = std::sin(0.5 * w);
  const double re = -2.0 * h * h;
  double im;
  if (std::abs(w) < 1e-3)
    im = w * w * w * (1.0 / 6.0 - w * w / 120.0);
  else
    im = w - std::sin(w);
  return {re, im};
}

}  // namespace

// psi(theta) for theta > 0 with the y = v^2 substitution:
//   (2/sqrt(2pi)) int_0^V (e^{i theta v^2} - 1 - i theta v^2) v^{-4} dv
// plus the [V^2, inf) remainder: the compensator part in closed form and the
// oscillatory part on the rotated contour y = Y + it/theta.
std::complex<double> levy_exponent(double theta) {
  if (!(theta > 0.0)) throw domain_error("levy_exponent: theta must be > 0");
  const double Y = std::max(9.0, 40.0 / theta);
  const double V = std::sqrt(Y);

  auto core_f = [theta](double v) -> cplx {
    const double v2 = v * v;
    return std::conj(cis_minus(theta * v2)) / (v2 * v2);
  };
  const cplx core = integrate_complex(core_f, 0.0, V, 1e-300, 1e-13, 20000,
                                      "levy exponent core")
                        .value *
                    (2.0 / kSqrt2Pi);

  // int_Y^inf (-1 - i theta y) y^{-5/2} dy, exactly.
  const cplx comp_tail =
      cplx{-(2.0 / 3.0) * std::pow(Y, -1.5), -theta * 2.0 / std::sqrt(Y)} /
      kSqrt2Pi;

  // int_Y^inf e^{i theta y} y^{-5/2} dy on y = Y + it/theta.
  auto rot_f = [theta, Y](double t) -> cplx {
    return std::exp(-t) * std::pow(cplx{Y, t / theta}, -2.5);
  };
  const cplx rot = integrate_complex(rot_f, 0.0, 45.0, 1e-300, 1e-12, 20000,
                                     "levy exponent oscillatory tail")
                       .value;
  const cplx osc_tail =
      cplx{0.0, 1.0 / theta} * std::exp(cplx{0.0, theta * Y}) * rot / kSqrt2Pi;

  return core + comp_tail + osc_tail;
}

double levy_exponent_laplace(double sigma) {
  if (!(sigma > 0.0))
    throw domain_error("levy_exponent_laplace: sigma must be > 0");
  const double Y = 45.0 / sigma;
  const double V = std::sqrt(Y);
  auto f = [sigma](double v) {
    const double v2 = v * v;
    return expm1_minus(sigma * v2) / (v2 * v2);
  };
  const double core = integrate(f, 0.0, V, 1e-300, 2e-14, 20000,
                                "laplace exponent core")
                          .value *
                      (2.0 / kSqrt2Pi);
  // int_Y^inf (-1 + sigma y) y^{-5/2} dy; the e^{-sigma y} part is below
  // e^{-45} of the total and is dropped.
  const double tail =
      (-(2.0 / 3.0) * std::pow(Y, -1.5) + sigma * 2.0 / std::sqrt(Y)) /
      kSqrt2Pi;
  return core + tail;
}

std::complex<double> levy_exponent_laplace_diff(double sigma, double u) {
  if (!(sigma > 0.0))
    throw domain_error("levy_exponent_laplace_diff: sigma must be > 0");
  const double Y = 45.0 / sigma;
  const double V = std::sqrt(Y);
  auto f = [sigma, u](double v) -> cplx {
    const double v2 = v * v;
    const double es = std::exp(-sigma * v2);
    const cplx osc = cis_minus(u * v2) * es;
    const double comp = u * v2 * (-std::expm1(-sigma * v2));
    return (osc + cplx{0.0, comp}) / (v2 * v2);
  };
  const cplx core = integrate_complex(f, 0.0, V, 1e-300, 1e-13, 20000,
                                      "laplace exponent difference core")
                        .value *
                    (2.0 / kSqrt2Pi);
  const cplx tail = cplx{0.0, u * 2.0 / std::sqrt(Y)} / kSqrt2Pi;
  return core + tail;
}

namespace {

// Cached characteristic function grid for the real-axis inversion: composite
// Gauss-Kronrod nodes on [0, theta_max] with psi evaluated once per node.
struct cf_grid {
  struct node {
    double theta;
    double wk;         // Kronrod weight x half-width
    double wg;         // Gauss weight x half-width (0 off Gauss nodes)
    double psi_re;
    double psi_im;
  };
  struct segment {
    node nodes[15];
  };
  std::vector<segment> segments;
};

cf_grid build_cf_grid() {
  // psi ~ -(1+i)(2/3) theta^{3/2} has a branch-point corner at theta = 0,
  // so the grid is graded: a tiny corner piece, a geometric band, then
  // uniform bands whose widths keep the per-segment phase (up to |x| ~ 30)
  // small enough that even the embedded Gauss rule is accurate; that keeps
  // the summed Kronrod-Gauss discrepancy honest as an error estimate.
  std::vector<double> edges{0.0, 1e-4};
  while (edges.back() < 0.2) edges.push_back(std::min(0.2, edges.back() * 1.5));
  const double bands[3][2] = {{3.0, 0.02}, {6.0, 0.05}, {17.0, 0.10}};
  for (const auto& band : bands)
    while (edges.back() < band[0] - 1e-12)
      edges.push_back(std::min(band[0], edges.back() + band[1]));

  cf_grid grid;
  grid.segments.resize(edges.size() - 1);
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double c = 0.5 * (edges[s] + edges[s + 1]);
    const double h = 0.5 * (edges[s + 1] - edges[s]);
    int idx = 0;
    for (int j = 0; j < 7; ++j) {
      for (double sign : {-1.0, 1.0}) {
        auto& nd = grid.segments[s].nodes[idx++];
        nd.theta = c + sign * h * quad_detail::xgk[j];
        nd.wk = h * quad_detail::wgk[j];
        nd.wg = (j % 2 == 1) ? h * quad_detail::wg[(j - 1) / 2] : 0.0;
        const cplx p = levy_exponent(nd.theta);
        nd.psi_re = p.real();
        nd.psi_im = p.imag();
      }
    }
    auto& nd = grid.segments[s].nodes[idx];
    nd.theta = c;
    nd.wk = h * quad_detail::wgk[7];
    nd.wg = h * quad_detail::wg[3];
    const cplx p = levy_exponent(nd.theta);
    nd.psi_re = p.real();
    nd.psi_im = p.imag();
  }
  return grid;
}

}  // namespace

// p1(x) = (1/pi) Re int_0^inf exp(-i theta x + psi(theta)) dtheta on the
// cached grid, with the Kronrod-vs-Gauss discrepancy as the error estimate.
double oracle_cf_inversion(double x) {
  static const cf_grid grid = build_cf_grid();
  double sum_k = 0.0;
  double err = 0.0;
  for (const auto& seg : grid.segments) {
    double k = 0.0, g = 0.0;
    for (const auto& nd : seg.nodes) {
      const double f =
          std::exp(nd.psi_re) * std::cos(nd.psi_im - nd.theta * x);
      k += nd.wk * f;
      g += nd.wg * f;
    }
    sum_k += k;
    err += std::abs(k - g);
  }
  const double value = sum_k / kPi;
  if (err / kPi > std::max(1e-10, 1e-8 * std::abs(value)))
    throw numeric_error(
        "oracle_p1: oscillatory inversion error estimate above tolerance");
  return value;
}

// log p1(x) through the saddle of the shifted-contour (Bromwich) inversion:
//   log p1 = sigma x + Phi(sigma)
//            + log((1/pi) int_0^inf Re exp(Phi(sigma+iu) - Phi(sigma) + iux) du)
// at sigma = x^2/2, where the leading terms are the exact Legendre pair and
// the integral is an O(1) Gaussian-like correction.
double oracle_saddle_log(double x) {
  if (!(x < 0.0)) throw domain_error("oracle_saddle_log: x must be negative");
  const double sigma = 0.5 * x * x;
  const double phi_s = levy_exponent_laplace(sigma);

  // Cutoff where the closed form of Re(Phi(sigma+iu) - Phi(sigma)) passes
  // -45; the closed form is only used to place the cutoff.
  const double c = 2.0 * std::sqrt(2.0) / 3.0;
  auto drop = [&](double u) {
    return c * (std::pow(cplx{sigma, u}, 1.5).real() -
                std::pow(sigma, 1.5));
  };
  double hi = sigma;
  while (drop(hi) > -45.0) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 100 && hi - lo > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (drop(mid) > -45.0 ? lo : hi) = mid;
  }
  const double u_cut = hi;

  auto g = [&](double u) {
    const cplx d = levy_exponent_laplace_diff(sigma, u);
    return std::exp(d.real()) * std::cos(d.imag() + u * x);
  };
  const double uw = 2.0 * std::pow(sigma, 0.25);  // saddle Gaussian width
  std::vector<double> breaks{0.0};
  if (3.0 * uw < u_cut) {
    breaks.push_back(uw);
    breaks.push_back(3.0 * uw);
  }
  breaks.push_back(u_cut);
  const auto q = integrate_segments<double>(g, breaks, 1e-300, 1e-11, 4000,
                                            "saddle inversion integral");
  if (!(q.value > 0.0))
    throw numeric_error("oracle_p1: saddle integral not positive");
  return sigma * x + phi_s + std::log(q.value / kPi);
}

}  // namespace detail

double oracle_p1(double x) {
  if (!std::isfinite(x)) throw domain_error("oracle_p1: x must be finite");
  if (x <= -3.5) return std::exp(detail::oracle_saddle_log(x));
  return detail::oracle_cf_inversion(x);
}

double oracle_log_p1(double x) {
  if (!std::isfinite(x)) throw domain_error("oracle_log_p1: x must be finite");
  if (x <= -3.5) return detail::oracle_saddle_log(x);
  const double v = detail::oracle_cf_inversion(x);
  if (!(v > 0.0))
    throw numeric_error("oracle_log_p1: inversion returned a nonpositive value");
  return std::log(v);
}

}  // namespace frz
