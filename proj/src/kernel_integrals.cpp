#include <algorithm>
#include <cmath>

#include "frz/errors.hpp"
#include "frz/quadrature.hpp"
#include "frz/special_fn.hpp"

namespace frz {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::acos(-1.0));

// Ratio r(y) = p1(-x-y)/p1(-x) for the kernel integrals, in log space.
struct ratio_ctx {
  double x;
};

double log_ratio(double y, const void* ctx) {
  const double x = static_cast<const ratio_ctx*>(ctx)->x;
  return p1_ratio_log(-x, y);
}

// log-integrand of the heaviest-tailed integral I3 (y^{3/2} weight), used to
// place the common 40-nat truncation point.
double log_i3_integrand(double y, const void* ctx) {
  return log_ratio(y, ctx) + 1.5 * std::log(y);
}

}  // namespace

KernelIntegrals kernel_integrals(double x, double abs_tol) {
  if (!std::isfinite(x) || x < 0.0)
    throw domain_error("kernel_integrals: x must be finite and nonnegative");
  if (!(abs_tol > 0.0))
    throw domain_error("kernel_integrals: abs_tol must be positive");

  const ratio_ctx ctx{x};
  static const double y_trunc = -find_xmax().x_max;  // upper limit of i1_trunc

  KernelIntegrals out;
  out.x = x;
  double achieved = 0.0;
  const double tol = 0.5 * abs_tol;

  auto r = [&ctx](double y) { return std::exp(log_ratio(y, &ctx)); };

  if (x >= 1.0) {
    // Substitution u = x sqrt(y) flattens the near-0 peak:
    //   I1 = 2/(x sqrt(2pi)) * int r du,   I2 = (x^3 sqrt(2pi))^{-1} int u^2 r du,
    //   I3 = (x^5 sqrt(2pi))^{-1} int u^4 r du.
    const double y_cut =
        detail::log_cutoff(log_i3_integrand, &ctx, 1e-10, 120.0, 40.0);
    const double u_cut = x * std::sqrt(y_cut);

    auto ru = [&](double u) {
      const double y = (u / x) * (u / x);
      return std::exp(log_ratio(y, &ctx));
    };
    auto q1 = integrate([&](double u) { return ru(u); }, 0.0, u_cut, tol,
                        1e-12, 10000, "kernel integral i1");
    auto q2 = integrate([&](double u) { return u * u * ru(u); }, 0.0, u_cut,
                        tol, 1e-12, 10000, "kernel integral i2");
    auto q3 = integrate([&](double u) { return u * u * u * u * ru(u); }, 0.0,
                        u_cut, tol, 1e-12, 10000, "kernel integral i3");
    const double u_tr = std::min(x * std::sqrt(y_trunc), u_cut);
    auto q4 = integrate([&](double u) { return ru(u); }, 0.0, u_tr, tol,
                        1e-12, 10000, "kernel integral i1_trunc");

    out.i1 = 2.0 / (x * kSqrt2Pi) * q1.value;
    out.i2 = q2.value / (x * x * x * kSqrt2Pi);
    out.i3 = q3.value / (std::pow(x, 5) * kSqrt2Pi);
    out.i1_trunc = 2.0 / (x * kSqrt2Pi) * q4.value;
    achieved = std::max({2.0 / (x * kSqrt2Pi) * q1.abs_err,
                         q2.abs_err / (x * x * x * kSqrt2Pi),
                         q3.abs_err / (std::pow(x, 5) * kSqrt2Pi),
                         2.0 / (x * kSqrt2Pi) * q4.abs_err});
  } else {
    // Raw y integration, split into [0,1] plus the tail; the y^{-1/2}
    // endpoint is integrable and the open Kronrod nodes never touch it.
    const double y_cut =
        detail::log_cutoff(log_i3_integrand, &ctx, 1e-10, 120.0, 40.0);

    auto f1 = [&](double y) { return r(y) / std::sqrt(y); };
    auto f2 = [&](double y) { return std::sqrt(y) * r(y); };
    auto f3 = [&](double y) { return y * std::sqrt(y) * r(y); };

    auto q1 = integrate_segments<double>(f1, {0.0, 1.0, y_cut}, tol, 1e-12,
                                         10000, "kernel integral i1");
    auto q2 = integrate_segments<double>(f2, {0.0, 1.0, y_cut}, tol, 1e-12,
                                         10000, "kernel integral i2");
    auto q3 = integrate_segments<double>(f3, {0.0, 1.0, y_cut}, tol, 1e-12,
                                         10000, "kernel integral i3");
    auto q4 = integrate(f1, 0.0, y_trunc, tol, 1e-12, 10000,
                        "kernel integral i1_trunc");

    out.i1 = q1.value / kSqrt2Pi;
    out.i2 = 0.5 * q2.value / kSqrt2Pi;
    out.i3 = 0.5 * q3.value / kSqrt2Pi;
    out.i1_trunc = q4.value / kSqrt2Pi;
    achieved = std::max({q1.abs_err, 0.5 * q2.abs_err, 0.5 * q3.abs_err, q4.abs_err}) /
               kSqrt2Pi;
  }

  out.abs_tol = achieved;
  return out;
}

}  // namespace frz
