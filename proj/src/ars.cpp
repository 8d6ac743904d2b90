#include "spr/ars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spr/errors.hpp"

namespace spr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// log( (exp(s*L) - 1) / s ) for L >= 0, stable for small |s|*L.
double log_expm1_ratio(double s, double L) {
  const double sl = s * L;
  if (std::fabs(sl) < 1e-10) return std::log(L) + 0.5 * sl;
  if (sl > 0.0) return std::log(std::expm1(sl)) - std::log(s);
  return std::log(-std::expm1(sl)) - std::log(-s);
}
}  // namespace

double find_concave_mode(const std::function<double(double)>& fprime,
                         const std::function<double(double)>& fsecond, double init,
                         const char* context) {
  double lo = init, hi = init;
  double flo = fprime(lo), fhi = flo;
  double step = 1.0;
  // fprime is strictly decreasing: expand until it changes sign
  for (int iter = 0; flo < 0.0 || fhi > 0.0; ++iter) {
    if (iter >= 200)
      throw NumericalError(std::string("mode bracketing failed: ") + context);
    if (flo < 0.0) {
      lo -= step;
      flo = fprime(lo);
    }
    if (fhi > 0.0) {
      hi += step;
      fhi = fprime(hi);
    }
    step *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double g = fprime(x);
    if (g > 0.0)
      lo = x;
    else
      hi = x;
    const double h = fsecond(x);
    double next = x - g / h;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
    if (std::fabs(next - x) < 1e-12 * (1.0 + std::fabs(x))) return next;
    x = next;
  }
  return x;
}

ArsSampler::ArsSampler(std::function<double(double)> log_f,
                       std::function<double(double)> dlog_f, double x_low,
                       double x_high, int max_segments)
    : log_f_(std::move(log_f)), dlog_f_(std::move(dlog_f)), max_segments_(max_segments) {
  if (!(x_low < x_high)) throw NumericalError("ars: initial abscissae not ordered");
  // the leftmost slope must be positive and the rightmost negative, else the
  // envelope is not integrable
  double gap = x_high - x_low;
  for (int iter = 0; dlog_f_(x_low) <= 0.0; ++iter) {
    if (iter >= 100) throw NumericalError("ars: cannot find rising left abscissa");
    x_low -= gap;
    gap *= 2.0;
  }
  gap = x_high - x_low;
  for (int iter = 0; dlog_f_(x_high) >= 0.0; ++iter) {
    if (iter >= 100) throw NumericalError("ars: cannot find falling right abscissa");
    x_high += gap;
    gap *= 2.0;
  }
  x_ = {x_low, x_high};
  h_ = {log_f_(x_low), log_f_(x_high)};
  hp_ = {dlog_f_(x_low), dlog_f_(x_high)};
  rebuild();
}

void ArsSampler::rebuild() {
  const int k = static_cast<int>(x_.size());
  z_.assign(k - 1, 0.0);
  for (int j = 0; j + 1 < k; ++j) {
    const double denom = hp_[j] - hp_[j + 1];
    double z;
    if (denom <= 1e-14) {
      z = 0.5 * (x_[j] + x_[j + 1]);  // numerically parallel tangents
    } else {
      z = (h_[j + 1] - h_[j] + x_[j] * hp_[j] - x_[j + 1] * hp_[j + 1]) / denom;
    }
    z_[j] = std::clamp(z, x_[j], x_[j + 1]);
  }
  log_area_.assign(k, -kInf);
  for (int j = 0; j < k; ++j) {
    const double zl = (j == 0) ? -kInf : z_[j - 1];
    const double zr = (j == k - 1) ? kInf : z_[j];
    const double s = hp_[j];
    if (zl == -kInf) {
      log_area_[j] = h_[j] + s * (zr - x_[j]) - std::log(s);
    } else if (zr == kInf) {
      log_area_[j] = h_[j] + s * (zl - x_[j]) - std::log(-s);
    } else if (zr > zl) {
      log_area_[j] = h_[j] + s * (zl - x_[j]) + log_expm1_ratio(s, zr - zl);
    }
  }
}

void ArsSampler::insert(double x, double h, double hp) {
  if (static_cast<int>(x_.size()) >= max_segments_) return;
  auto it = std::lower_bound(x_.begin(), x_.end(), x);
  const auto idx = it - x_.begin();
  // skip points that would produce a non-decreasing slope sequence
  if (idx > 0 && hp_[idx - 1] - hp <= 1e-14) return;
  if (idx < static_cast<long>(hp_.size()) && hp - hp_[idx] <= 1e-14) return;
  x_.insert(it, x);
  h_.insert(h_.begin() + idx, h);
  hp_.insert(hp_.begin() + idx, hp);
  rebuild();
}

double ArsSampler::envelope_at(double u, int piece) const {
  return h_[piece] + hp_[piece] * (u - x_[piece]);
}

double ArsSampler::squeeze_at(double u) const {
  if (u < x_.front() || u > x_.back()) return -kInf;
  const auto it = std::upper_bound(x_.begin(), x_.end(), u);
  const int j = std::max<int>(0, static_cast<int>(it - x_.begin()) - 1);
  if (j + 1 >= static_cast<int>(x_.size())) return h_.back();
  const double t = (u - x_[j]) / (x_[j + 1] - x_[j]);
  return h_[j] + t * (h_[j + 1] - h_[j]);
}

double ArsSampler::draw(Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int k = static_cast<int>(x_.size());
    // pick an envelope piece proportional to its integral
    const int j = rng.categorical_logits(log_area_);
    const double zl = (j == 0) ? -kInf : z_[j - 1];
    const double zr = (j == k - 1) ? kInf : z_[j];
    const double s = hp_[j];
    const double u1 = rng.uniform();
    double u;
    if (zl == -kInf) {
      u = zr + std::log(u1) / s;
    } else if (zr == kInf) {
      u = zl + std::log(u1) / s;
    } else {
      const double L = zr - zl;
      if (std::fabs(s) * L < 1e-10) {
        u = zl + u1 * L;
      } else {
        u = zl + std::log1p(u1 * std::expm1(s * L)) / s;
      }
    }
    const double env = envelope_at(u, j);
    const double logw = std::log(rng.uniform());
    if (logw <= squeeze_at(u) - env) return u;
    const double hu = log_f_(u);
    if (std::isfinite(hu)) insert(u, hu, dlog_f_(u));
    if (logw <= hu - env) return u;
  }
  throw NumericalError("ars: rejection loop failed to accept");
}

}  // namespace spr
