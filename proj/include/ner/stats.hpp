#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace ner {

// Kolmogorov-Smirnov distance sup |F_n(x) - F(x)| between the empirical CDF
// of samples and cdf. samples is taken by value and sorted.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Asymptotic one-sample critical value sqrt(-ln(alpha / 2) / 2) / sqrt(n).
double ks_critical_value(std::size_t n, double alpha);

// Wilson score interval for hits out of trials at the given two-sided level.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials,
                                          double confidence = 0.95);

}  // namespace ner
