#include "frz/stats.hpp"

#include <algorithm>
#include <cmath>

#include "frz/errors.hpp"

namespace frz {

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw config_error("ks_statistic: both samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (i >= a.size())
      v = b[j];
    else if (j >= b.size())
      v = a[i];
    else
      v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double tail_cubic_fit(std::vector<double> samples, double q_lo, double q_hi) {
  if (samples.size() < 500)
    throw config_error("tail_cubic_fit: need at least 500 samples");
  if (!(0.5 < q_lo && q_lo < q_hi && q_hi < 0.999))
    throw config_error(
        "tail_cubic_fit: quantile range must satisfy 0.5 < lo < hi < 0.999");
  std::sort(samples.begin(), samples.end());

  const double np1 = static_cast<double>(samples.size()) + 1.0;
  double sx = 0.0, sy = 0.0, n = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 1; i <= samples.size(); ++i) {
    const double q = static_cast<double>(i) / np1;
    if (q < q_lo || q > q_hi) continue;
    const double t = samples[i - 1];
    if (!(t > 0.0) || !std::isfinite(t)) continue;  // log t undefined
    const double x = std::log(t);
    const double y = std::log(-std::log1p(-q));  // log(-log S), S = 1-q
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    n += 1.0;
  }
  if (pts.size() < 10)
    throw stats_error("tail_cubic_fit: fewer than 10 usable tail points");

  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0))
    throw stats_error("tail_cubic_fit: degenerate tail (all points equal)");
  return sxy / sxx;
}

double sample_mean(const std::vector<double>& v) {
  if (v.empty()) throw config_error("sample_mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw config_error("sample_variance: need two samples");
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double standard_error(const std::vector<double>& v) {
  return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

double sample_median(std::vector<double> v) {
  if (v.empty()) throw config_error("sample_median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw config_error("sorted_quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0))
    throw config_error("sorted_quantile: q must lie in [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace frz
