#pragma once

#include <cmath>
#include <span>

namespace spr {

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// log density of the location-scale Student t.
inline double t_log_pdf(double x, double location, double scale, double df) {
  const double z = (x - location) / scale;
  return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
         0.5 * std::log(df * M_PI) - std::log(scale) -
         0.5 * (df + 1.0) * std::log1p(z * z / df);
}

inline double normal_log_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(var)) - 0.5 * d * d / var;
}

// shape/rate parametrisation
inline double gamma_log_pdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) -
         rate * x;
}

inline double beta_log_pdf(double x, double a, double b) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
         (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
}

inline double dirichlet_log_pdf(std::span<const double> x, std::span<const double> a) {
  double lp = 0.0, asum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    lp += (a[k] - 1.0) * std::log(x[k]) - std::lgamma(a[k]);
    asum += a[k];
  }
  return lp + std::lgamma(asum);
}

inline double gamma_cdf(double x, double shape, double rate);

// Regularised lower incomplete gamma, series/continued-fraction evaluation.
// Used by the KS checks against analytic Gamma laws.
inline double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    // series
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // continued fraction for Q, then P = 1 - Q
  double b = x + 1.0 - a, c = 1e308, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double gamma_cdf(double x, double shape, double rate) {
  return gamma_p(shape, rate * x);
}

}  // namespace spr
