#pragma once

#include <functional>
#include <span>
#include <vector>

#include "spr/data.hpp"
#include "spr/rng.hpp"

namespace spr {

// Global response parameters shared across clusters.
struct ResponseGlobals {
  std::vector<double> beta;
  double sigmaY2 = 1.0;  // Gaussian only
  double tauY = 1.0;     // 1/sigmaY2

  void set_tauY(double t) {
    tauY = t;
    sigmaY2 = 1.0 / t;
  }
};

struct ClusterResponseParams {
  double theta = 0.0;
};

double linear_predictor(double theta, std::span<const double> beta,
                        std::span<const double> w, double u);

double gaussian_log_likelihood(double y, double lambda, double sigmaY2);

// y * (log E + lambda) - E * exp(lambda) - lgamma(y+1)
double poisson_log_likelihood(double y, double offset, double lambda);

// Scalar random-walk Metropolis step size with Robbins-Monro adaptation
// toward 0.44 acceptance. Adaptation stops once frozen.
struct AdaptiveStep {
  double log_step = 0.0;
  long n_proposed = 0;
  long n_accepted = 0;
  bool frozen = false;

  double step() const { return std::exp(log_step); }
  void record(bool accepted);
  double acceptance_rate() const {
    return n_proposed == 0 ? 0.0 : static_cast<double>(n_accepted) / n_proposed;
  }
};

// min(1, exp(log_ratio)): the Metropolis acceptance probability used by
// every random-walk update here.
double mh_accept_probability(double log_ratio);

// One random-walk Metropolis update of a scalar. Returns the new value and
// reports acceptance through the step's counters.
double rwm_update(double current, const std::function<double(double)>& log_density,
                  AdaptiveStep& step, Rng& rng);

// Sufficient statistics of one cluster's response conditional in theta.
// Gaussian: count and sum of residuals y_i - w_i.beta - u_i over members.
// Poisson: sum of counts and sum of E_i exp(w_i.beta + u_i).
struct ThetaSuffStats {
  double count = 0.0;
  double sum_resid = 0.0;
  double sum_y = 0.0;
  double sum_scaled_offset = 0.0;
};

double theta_cond_log_lik(double theta, ResponseKind kind, const ThetaSuffStats& stats,
                          double sigmaY2);

// Full-conditional update of a cluster intercept: t prior times the member
// likelihood via random-walk Metropolis; empty clusters refresh from the
// prior.
double sample_theta(double theta, ResponseKind kind, const ThetaSuffStats& stats,
                    bool empty, double sigmaY2, const Hyperparameters& hyper,
                    AdaptiveStep& step, Rng& rng);

// Componentwise random-walk Metropolis sweep over beta with t priors.
// `resid` holds y_i - lambda_i for Gaussian (updated in place); `mu` holds
// E_i exp(lambda_i) for Poisson (updated in place).
void sample_beta(std::vector<double>& beta, ResponseKind kind, const Dataset& data,
                 std::vector<double>& resid, std::vector<double>& mu, double sigmaY2,
                 const Hyperparameters& hyper, std::vector<AdaptiveStep>& steps,
                 Rng& rng);

// Conjugate Gibbs draw of tauY given Gaussian residuals.
double sample_tauY(std::span<const double> residuals, double s_tauY, double r_tauY,
                   Rng& rng);

}  // namespace spr
