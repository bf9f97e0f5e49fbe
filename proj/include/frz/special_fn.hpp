#pragma once

#include <complex>

#include "frz/dd.hpp"

namespace frz {

// Exponentially scaled Airy values: ai_s = Ai(z)*exp((2/3)z^{3/2}) and
// aip_s = Ai'(z)*exp((2/3)z^{3/2}).
struct ScaledAiryPair {
  double z = 0.0;
  double ai_s = 0.0;
  double aip_s = 0.0;
};

// Natural log of the density p1 at x.
struct LogDensityValue {
  double x = 0.0;
  double log_p1 = 0.0;
};

struct KernelIntegrals {
  double x = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double i1_trunc = 0.0;
  double abs_tol = 0.0;  // achieved quadrature tolerance
};

struct XMax {
  double x_max = 0.0;
  double p1_at_max = 0.0;
};

// Scaled Airy pair for z >= 0. Maclaurin summation in double-double below
// the branch switch, scaled asymptotic series above it.
ScaledAiryPair airy_scaled(double z);

// log p1(x) for finite x. Scaled-Airy bracket up to x_switch_pos = 8, tail
// series beyond.
LogDensityValue log_p1(double x);

// exp(log_p1(x).log_p1); underflows to 0 for x below about -26.
double p1(double x);

// log p1(x-y) - log p1(x) for y >= 0, entirely in log space.
double p1_ratio_log(double x, double y);

// Derivative p1'(x)/p1(x)-free closed form helpers used by find_xmax and by
// monotonicity tests: sign-stable scaled bracket of p1'(x).
double p1_prime(double x);

// Argmax of p1 by golden-section on [-1.5, -0.3] plus a secant polish on the
// closed-form derivative bracket.
XMax find_xmax();

// I1, I2, I3 and the truncated I1 for x >= 0.
KernelIntegrals kernel_integrals(double x, double abs_tol = 1e-10);

// Independent evaluation of p1 by inversion of the numerically integrated
// compensated Levy exponent (no Airy functions involved).
double oracle_p1(double x);

// log of oracle_p1, exact in the far left tail where oracle_p1 underflows.
double oracle_log_p1(double x);

namespace detail {

// Unscaled Airy pair in double-double for z in [0, z_switch]; exposed for
// the bracket evaluation in log_p1 which must subtract x*Ai and 2*Ai' before
// any rounding to double.
struct dd_airy {
  dd ai;
  dd aip;
};
dd_airy airy_maclaurin_dd(double z);

// Scaled asymptotic pair for z > z_switch (also usable somewhat below).
ScaledAiryPair airy_asymptotic(double z);

inline constexpr double z_switch = 9.0;        // Maclaurin/asymptotic switch
inline constexpr double x_switch_pos = 8.0;    // Airy bracket/tail switch

// Coefficients of the tail series p1(x) = x^{-5/2}/sqrt(2*pi) *
// sum_m a_m x^{-3m}; a_m = (-1)^m (8/9)^m/(2m+1)! * prod_{j<3m}(5/2+j).
inline constexpr int tail_terms = 17;
extern const double tail_coeff[tail_terms];

// log of the tail series at x (valid for x >= ~6).
double log_p1_tail(double x);

// Smallest y >= lo where log_f drops `nats` below its maximum over
// [lo, hi_limit]; scans a log-spaced grid then bisects the crossing.
double log_cutoff(double (*log_f)(double, const void*), const void* ctx,
                  double lo, double hi_limit, double nats);

// Numerically integrated Levy exponent psi(theta) =
// int (e^{i theta y} - 1 - i theta y) (2 pi)^{-1/2} y^{-5/2} dy, theta > 0.
std::complex<double> levy_exponent(double theta);

// Laplace form Phi(sigma) = int (e^{-sigma y} - 1 + sigma y) nu(dy) and the
// difference Phi(sigma + iu) - Phi(sigma), both by direct quadrature.
double levy_exponent_laplace(double sigma);
std::complex<double> levy_exponent_laplace_diff(double sigma, double u);

// The two inversion routes behind oracle_p1: real-axis characteristic
// function inversion (accurate where p1 is not tiny) and the shifted-contour
// route through the saddle sigma = x^2/2 (returns log p1; exact in the far
// left tail). oracle_p1 switches at x = -3.5; tests compare both on [-4,-3].
double oracle_cf_inversion(double x);
double oracle_saddle_log(double x);

}  // namespace detail

}  // namespace frz
