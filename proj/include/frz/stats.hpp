#pragma once

#include <cstddef>
#include <vector>

namespace frz {

// Two-sample Kolmogorov-Smirnov sup-distance between empirical CDFs.
// Ties within and across samples are handled by advancing both scans past
// every occurrence of the current value before comparing the CDFs.
// Throws config_error on an empty sample.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Ordinary least squares slope of log(-log S(t)) against log t over the
// right-tail quantile window [q_lo, q_hi], where S is the empirical
// survival function with plotting positions S_i = 1 - i/(N+1). A survival
// tail exp(-c t^k) produces slope k, so the fit separates exponential (1),
// Gaussian-type (2) and cubic (3) tails.
//
// Requires at least 500 samples and 0.5 < q_lo < q_hi < 0.999
// (config_error otherwise); throws stats_error when fewer than 10 usable
// tail points (positive t) remain in the window.
double tail_cubic_fit(std::vector<double> samples, double q_lo, double q_hi);

// Basic sample statistics used by the experiment harness.
double sample_mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // n-1 denominator
double standard_error(const std::vector<double>& v);
double sample_median(std::vector<double> v);
// Linearly interpolated quantile (type 7) of an already sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double q);

}  // namespace frz
