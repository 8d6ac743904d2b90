#pragma once

#include <functional>
#include <vector>

#include "spr/rng.hpp"

namespace spr {

// Root of a strictly decreasing function (the derivative of a strictly
// concave log-density) via bracket expansion plus safeguarded Newton.
// Throws NumericalError if no bracket is found after bounded expansion;
// `context` is included in the message.
double find_concave_mode(const std::function<double(double)>& fprime,
                         const std::function<double(double)>& fsecond, double init,
                         const char* context);

// Tangent-envelope adaptive rejection sampler for a strictly log-concave
// density on the real line (Gilks & Wild). The two initial abscissae must
// sit on opposite sides of the mode; the constructor expands them outward
// if their slopes do not bracket it. Envelope growth is capped at
// max_segments abscissae.
class ArsSampler {
 public:
  ArsSampler(std::function<double(double)> log_f, std::function<double(double)> dlog_f,
             double x_low, double x_high, int max_segments = 64);

  double draw(Rng& rng);

  int n_abscissae() const { return static_cast<int>(x_.size()); }

 private:
  void rebuild();
  void insert(double x, double h, double hp);
  double envelope_at(double u, int piece) const;
  double squeeze_at(double u) const;

  std::function<double(double)> log_f_;
  std::function<double(double)> dlog_f_;
  int max_segments_;
  std::vector<double> x_, h_, hp_;   // abscissae, log f, d log f
  std::vector<double> z_;            // tangent intersections, size k-1
  std::vector<double> log_area_;     // per-piece envelope log-integrals, size k
};

}  // namespace spr
