#include <cmath>
#include <complex>

#include "doctest.h"
#include "frz/errors.hpp"
#include "frz/quadrature.hpp"

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("kronrod weights sum to the interval length") {
  double wk = frz::quad_detail::wgk[7];
  double wg = frz::quad_detail::wg[3];
  for (int j = 0; j < 7; ++j) {
    wk += 2.0 * frz::quad_detail::wgk[j];
    if (j % 2 == 1) wg += 2.0 * frz::quad_detail::wg[(j - 1) / 2];
  }
  CHECK(std::abs(wk - 2.0) < 1e-15);
  CHECK(std::abs(wg - 2.0) < 1e-15);
}

TEST_CASE("polynomials integrate exactly") {
  // Gauss 7 is exact to degree 13, Kronrod 15 to degree 22.
  auto q = frz::integrate([](double x) { return x * x * x * x * x * x; },
                          -1.0, 2.0, 1e-14);
  CHECK(std::abs(q.value - (std::pow(2.0, 7) + 1.0) / 7.0) < 1e-13);
}

TEST_CASE("smooth integrand reaches tight tolerance") {
  auto q = frz::integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0,
                          1.0, 1e-14);
  CHECK(std::abs(q.value - kPi / 4.0) < 1e-14);
  CHECK(q.abs_err < 1e-13);
}

TEST_CASE("integrable endpoint singularity y^{-1/2}") {
  auto q = frz::integrate([](double y) { return 1.0 / std::sqrt(y); }, 0.0,
                          1.0, 1e-10);
  CHECK(std::abs(q.value - 2.0) < 1e-9);
}

TEST_CASE("oscillatory integrand") {
  auto q = frz::integrate([](double x) { return std::cos(40.0 * x); }, 0.0,
                          1.0, 1e-13);
  CHECK(std::abs(q.value - std::sin(40.0) / 40.0) < 1e-12);
}

TEST_CASE("gaussian over a wide interval") {
  auto q = frz::integrate(
      [](double x) { return std::exp(-0.5 * x * x); }, -40.0, 40.0, 1e-12);
  CHECK(std::abs(q.value - std::sqrt(2.0 * kPi)) < 1e-11);
}

TEST_CASE("complex-valued integrand") {
  auto q = frz::integrate_complex(
      [](double x) {
        return std::exp(std::complex<double>(0.0, 3.0 * x));
      },
      0.0, 1.0, 1e-13);
  const std::complex<double> truth =
      (std::exp(std::complex<double>(0.0, 3.0)) - 1.0) /
      std::complex<double>(0.0, 3.0);
  CHECK(std::abs(q.value - truth) < 1e-12);
}

TEST_CASE("breakpoint form integrates piecewise-awkward functions") {
  auto q = frz::integrate_segments<double>(
      [](double x) { return std::abs(x); }, {-1.0, 0.0, 2.0}, 1e-13, 1e-13,
      10000, "piecewise");
  CHECK(std::abs(q.value - 2.5) < 1e-12);
}

TEST_CASE("non-integrable singularity fails with the worst subinterval") {
  CHECK_THROWS_AS(
      frz::integrate([](double y) { return 1.0 / y; }, 0.0, 1.0, 1e-10,
                     1e-10, 200, "divergent test integral"),
      frz::numeric_error);
  try {
    frz::integrate([](double y) { return 1.0 / y; }, 0.0, 1.0, 1e-10, 1e-10,
                   200, "divergent test integral");
  } catch (const frz::numeric_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("divergent test integral") != std::string::npos);
    CHECK(msg.find("worst subinterval") != std::string::npos);
  }
}
