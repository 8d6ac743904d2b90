#include "spr/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spr {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double Rng::uniform() {
  // 53 random bits, shifted off the integers so the result is strictly
  // inside (0,1): both log(u) and log(1-u) stay finite.
  return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
  // rejection to avoid modulo bias
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return static_cast<int>(x % un);
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double Rng::gamma(double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0)
    throw std::invalid_argument("gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // boost: G(a) = G(a+1) * U^(1/a)
    const double g = gamma(shape + 1.0, 1.0);
    const double u = uniform();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double Rng::beta(double a, double b) {
  const double ga = gamma(a, 1.0);
  const double gb = gamma(b, 1.0);
  return ga / (ga + gb);
}

double Rng::student_t(double df, double location, double scale) {
  const double z = normal();
  const double g = gamma(0.5 * df, 0.5 * df);
  return location + scale * z / std::sqrt(g);
}

long Rng::poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson: mean must be nonnegative");
  long total = 0;
  // Poisson(a+b) = Poisson(a) + Poisson(b); chunking keeps exp(-mu) away
  // from underflow while staying exact.
  while (mean > 30.0) {
    double chunk = 30.0;
    const double l = std::exp(-chunk);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    total += k - 1;
    mean -= chunk;
  }
  const double l = std::exp(-mean);
  long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform();
  } while (p > l);
  return total + k - 1;
}

std::vector<double> Rng::dirichlet(std::span<const double> concentration) {
  std::vector<double> out(concentration.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < concentration.size(); ++k) {
    out[k] = gamma(concentration[k], 1.0);
    sum += out[k];
  }
  for (double& v : out) v /= sum;
  return out;
}

int Rng::categorical_logits(std::span<const double> log_weights) {
  double max_lw = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights)
    if (lw > max_lw) max_lw = lw;
  if (!std::isfinite(max_lw))
    throw std::runtime_error("categorical_logits: all weights are zero");
  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - max_lw);
  const double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t c = 0; c < log_weights.size(); ++c) {
    acc += std::exp(log_weights[c] - max_lw);
    if (u <= acc) return static_cast<int>(c);
  }
  return static_cast<int>(log_weights.size()) - 1;
}

std::uint64_t Rng::derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 of (master ^ golden-ratio stream offset)
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace spr
