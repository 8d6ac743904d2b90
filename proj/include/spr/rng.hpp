#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace spr {

// Random stream with hand-rolled variate generators on top of mt19937_64.
// The standard library distributions are implementation-defined, so every
// draw here goes through our own code to keep runs reproducible bit-for-bit
// across platforms and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on the open interval (0,1).
  double uniform();

  // Uniform integer in [0, n).
  int uniform_int(int n);

  // Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma with shape/rate parametrisation (Marsaglia-Tsang).
  double gamma(double shape, double rate);

  double beta(double a, double b);

  // Location-scale Student t.
  double student_t(double df, double location, double scale);

  // Exact Poisson draw for any mean.
  long poisson(double mean);

  std::vector<double> dirichlet(std::span<const double> concentration);

  // Index draw from unnormalised log-weights (max-subtraction).
  int categorical_logits(std::span<const double> log_weights);

  // Derived seed for an independent stream (chain k of a master seed).
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

 private:
  std::mt19937_64 gen_;
};

}  // namespace spr
