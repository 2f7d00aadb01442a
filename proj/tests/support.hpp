#ifndef PLCP_TESTS_SUPPORT_HPP
#define PLCP_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace support {

inline std::pair<double, double> mean_var(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, s / static_cast<double>(v.size() - 1)};
}

/// One-sample KS distance against a continuous cdf.
template <class Cdf>
double ks_distance(std::vector<double> v, Cdf cdf) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double ks_uniform(std::vector<double> v) {
  return ks_distance(std::move(v), [](double x) { return std::clamp(x, 0.0, 1.0); });
}

/// Asymptotic one-sample KS critical value.
inline double ks_critical(std::size_t n, double alpha) {
  return std::sqrt(-std::log(alpha / 2.0) / (2.0 * static_cast<double>(n)));
}

}  // namespace support

#endif  // PLCP_TESTS_SUPPORT_HPP
