#include "ner/stats.hpp"

#include "ner/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ner {

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0 && alpha < 1))
    throw std::invalid_argument("ks_critical_value: need n >= 1 and alpha in (0, 1)");
  return std::sqrt(-std::log(alpha / 2) / 2) / std::sqrt(static_cast<double>(n));
}

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials,
                                          double confidence) {
  if (trials == 0 || hits > trials)
    throw std::invalid_argument("wilson_interval: need 0 <= hits <= trials, trials >= 1");
  const double z = static_cast<double>(std_normal_inv_cdf(0.5L + confidence / 2));
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2n = z * z / n;
  const double centre = (p + z2n / 2) / (1 + z2n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2n / (4 * n)) / (1 + z2n);
  // Rounding at p = 0 or 1 must not push the interval off the estimate.
  return {std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
}

}  // namespace ner
