#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace frz {
namespace detail {

// Cubic Hermite interpolant of log-values on a uniform w-grid, with
// centered-difference node slopes. covers() excludes the first and last
// cell so every evaluated cell has centered slopes on both ends.
class w_spline {
 public:
  w_spline() = default;
  w_spline(double lo, double step, std::vector<double> log_values);

  bool covers(double w) const {
    return !v_.empty() && w >= lo_ + step_ && w <= hi_ - step_;
  }

  double eval_log(double w) const {
    const double u = (w - lo_) / step_;
    std::size_t i = static_cast<std::size_t>(u);
    if (i + 1 >= v_.size()) i = v_.size() - 2;
    const double s = u - static_cast<double>(i);
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * v_[i] + h10 * m_[i] + h01 * v_[i + 1] + h11 * m_[i + 1];
  }

  double eval(double w) const { return std::exp(eval_log(w)); }

 private:
  double lo_ = 0.0, hi_ = 0.0, step_ = 0.0;
  std::vector<double> v_;  // log values at nodes
  std::vector<double> m_;  // node slopes per cell (already times step)
};

struct g_tables {
  w_spline g1, g2, g3;
};

struct j_tables {
  double delta = 0.0;
  w_spline j0, j1;
};

inline constexpr double table_w_lo = -64.0;
inline constexpr double table_w_hi = 40.0;
inline constexpr double table_w_step = 0.01;

// Built once per process on first use; thread-safe.
const g_tables& get_g_tables();

// One table set per distinct delta, built on first request and cached.
const j_tables& get_j_tables(double delta);

// Table-backed moment lookups with direct-quadrature fallback outside the
// covered w-range.
double table_g1(double w);
double table_g2(double w);
double table_g3(double w);
double table_j0(const j_tables& jt, double w);
double table_j1(const j_tables& jt, double w);

// J1/2 + p x J0 through the tables; the fast path of the simulator.
double table_rate(const j_tables& jt, double t, double x, double p);

}  // namespace detail
}  // namespace frz
