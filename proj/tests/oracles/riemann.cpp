#include "riemann.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

static double wrap_pi(double a) {
  while (a < 0.0) a += kPi;
  while (a >= kPi) a -= kPi;
  return a;
}

double tx_midpoint(double mu, double t, int n, Thm2Reading reading) {
  const double hw = kPi / n, hx = t / n;
  std::vector<double> s1(n), c1(n);
  for (int j = 0; j < n; ++j) {
    s1[j] = std::sin((j + 0.5) * hw);
    c1[j] = std::cos((j + 0.5) * hw);
  }
  std::vector<double> z(n);
  long double total = 0.0L;
  for (int a = 0; a < n; ++a) {
    const double w = (a + 0.5) * hw;
    const double sw = std::sin(w), cw = std::cos(w);
    long double plane = 0.0L;
    for (int b = 0; b < n; ++b) {
      const double x = (b + 0.5) * hx;
      double e11 = reading.proof_thresholds ? wrap_pi(std::atan2(sw, cw - 1.0))
                                            : wrap_pi(std::atan2(t * sw, t * cw - x));
      double e12 = wrap_pi(std::atan2(t * sw, x + t * cw));
      const double lo = std::min(e11, e12), hi = std::max(e11, e12);
      const double q = (2.0 * t - x) / x;
      const double qq = q * q + 1.0;
      const double e21 = std::acos(std::clamp((qq * cw + 2.0 * q) / (2.0 * q * cw + qq), -1.0, 1.0));
      const double e22 = std::acos(std::clamp((qq * cw - 2.0 * q) / (qq - 2.0 * q * cw), -1.0, 1.0));
      const double mid = 2.0 * (t - x);
      for (int j = 0; j < n; ++j) {
        const double w1 = (j + 0.5) * hw;
        double zz;
        if (w1 >= lo && w1 <= hi) {
          zz = mid;
        } else {
          const double sd = s1[j] * cw - c1[j] * sw;
          if (w1 <= e21 || w1 >= e22) {
            const double num = reading.plus_sign ? sw + s1[j] : sw - s1[j];
            zz = 2.0 * t - x * (num / sd + 1.0);
          } else {
            zz = 4.0 * t - 2.0 * x * (1.0 + 2.0 * s1[j] / sd);
          }
          zz = std::min(std::max(zz, 0.0), 4.0 * t);
        }
        z[j] = -mu * zz;
      }
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += std::exp(z[j]);
      plane += row;
    }
    total += plane;
  }
  return static_cast<double>(total) * hw * hx * hw / (kPi * kPi);
}

double two_turn_midpoint(double w, double u, double t, double mu, int n) {
  const double h = kPi / n;
  const double r = (u - w) / (t - w);
  long double total = 0.0L;
  for (int a = 0; a < n; ++a) {
    const double ti = (a + 0.5) * h;
    const double si = std::sin(ti), ci = std::cos(ti);
    // printed event bounds; inverse cotangent onto (0, pi)
    const double bound = ti <= kPi / 2 ? kPi / 2 - std::atan(ci - r / si)
                                       : kPi / 2 - std::atan((r - ci) / si);
    double row = 0.0;
    for (int b = 0; b < n; ++b) {
      const double t1 = (b + 0.5) * h;
      const bool in = ti <= kPi / 2 ? t1 <= bound : t1 > bound;
      if (!in) {
        row += 1.0;
        continue;
      }
      const double y = (u - w) / (ci - si / std::tan(t1));
      row += std::exp(-mu * std::max(0.0, t - (y + w)));
    }
    total += row;
  }
  return static_cast<double>(total) / (static_cast<double>(n) * n);
}

}  // namespace oracle
