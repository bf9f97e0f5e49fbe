#include <cmath>

#include "frz/errors.hpp"
#include "frz/special_fn.hpp"

namespace frz {
namespace detail {

namespace {

// Ai(0) and -Ai'(0) in double-double: 3^{-2/3}/Gamma(2/3) and 3^{-1/3}/Gamma(1/3).
const dd kAi0{0.3550280538878172, 2.05233632436212e-17};
const dd kMinusAip0{0.2588194037928068, -2.522243111610832e-17};

}  // namespace

// Maclaurin sums for Ai and Ai' in double-double. All four series have
// nonnegative terms for z >= 0, so the only cancellation is the final
// c1*f - c2*g bracket; keeping everything in dd bounds that loss by about
// exp(2*zeta)*2^-104, which stays below 3e-16 relative for z <= 9.
dd_airy airy_maclaurin_dd(double z) {
  const dd zd(z);
  const dd z3 = zd * zd * zd;

  dd f(1.0), g(zd), fp(0.0), gp(1.0);
  dd ft(1.0), gt(zd), fpt(0.0), gpt(1.0);
  // fp term starts at k=1 with z^2/2.
  dd fpt1 = (zd * zd) / 2.0;
  fp = fpt1;
  fpt = fpt1;

  for (int k = 1; k <= 200; ++k) {
    const double tk = 3.0 * k;
    ft = ft * z3 / (tk * (tk - 1.0));
    gt = gt * z3 / ((tk + 1.0) * tk);
    if (k >= 2) {
      // Keep every scalar factor exactly representable: k and
      // (k-1)*3k*(3k-1) are small integers, so the dd rounding stays at
      // 2^-104 per step instead of the 2^-53 a fused double quotient
      // would inject.
      fpt = (fpt * z3 * static_cast<double>(k)) / ((k - 1.0) * tk * (tk - 1.0));
    }
    gpt = gpt * z3 / ((tk - 2.0) * tk);

    f = f + ft;
    g = g + gt;
    if (k >= 2) fp = fp + fpt;
    gp = gp + gpt;

    const double floor_rel = 1e-34;
    if (ft.hi < floor_rel * f.hi && gt.hi < floor_rel * g.hi &&
        fpt.hi < floor_rel * (fp.hi + 1e-300) && gpt.hi < floor_rel * gp.hi)
      break;
  }

  dd_airy out;
  out.ai = kAi0 * f - kMinusAip0 * g;
  out.aip = kAi0 * fp - kMinusAip0 * gp;
  return out;
}

// Scaled asymptotic series (DLMF 9.7.5/9.7.6): with zeta = (2/3)z^{3/2},
//   Ai(z) e^{zeta}  ~ (2 sqrt(pi) z^{1/4})^{-1} sum (-1)^k u_k zeta^{-k}
//   Ai'(z) e^{zeta} ~ -(z^{1/4}/(2 sqrt(pi))) sum (-1)^k v_k zeta^{-k}
// truncated at the smallest term.
ScaledAiryPair airy_asymptotic(double z) {
  const double sqrt_z = std::sqrt(z);
  const double zeta = (2.0 / 3.0) * z * sqrt_z;
  const double inv_zeta = 1.0 / zeta;

  double u = 1.0;
  double sa = 1.0, sb = 1.0;
  double term_a = 1.0;
  double prev_abs = 1e300;
  for (int k = 1; k <= 80; ++k) {
    u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
         (216.0 * k * (2.0 * k - 1.0));
    const double v = u * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
    term_a = ((k % 2) ? -1.0 : 1.0) * u * std::pow(inv_zeta, k);
    const double term_b = ((k % 2) ? -1.0 : 1.0) * v * std::pow(inv_zeta, k);
    if (std::abs(term_a) >= prev_abs) break;  // divergent tail reached
    sa += term_a;
    sb += term_b;
    prev_abs = std::abs(term_a);
    if (std::abs(term_a) < 1e-18 * std::abs(sa)) break;
  }

  const double q = std::pow(z, 0.25);
  const double c = 0.5 / std::sqrt(std::acos(-1.0));
  ScaledAiryPair out;
  out.z = z;
  out.ai_s = c * sa / q;
  out.aip_s = -c * q * sb;
  return out;
}

}  // namespace detail

ScaledAiryPair airy_scaled(double z) {
  if (!std::isfinite(z) || z < 0.0)
    throw domain_error("airy_scaled: z must be finite and nonnegative");
  if (z > detail::z_switch) return detail::airy_asymptotic(z);

  const auto a = detail::airy_maclaurin_dd(z);
  const double zeta = (2.0 / 3.0) * z * std::sqrt(z);
  const double s = std::exp(zeta);
  ScaledAiryPair out;
  out.z = z;
  out.ai_s = to_double(a.ai) * s;
  out.aip_s = to_double(a.aip) * s;
  return out;
}

}  // namespace frz
