#include "spr/response_model.hpp"

#include <cmath>
#include <stdexcept>

#include "spr/dist.hpp"
#include "spr/errors.hpp"

namespace spr {

double linear_predictor(double theta, std::span<const double> beta,
                        std::span<const double> w, double u) {
  if (beta.size() != w.size())
    throw std::invalid_argument("linear_predictor: beta/w dimension mismatch");
  double lp = theta + u;
  for (std::size_t k = 0; k < beta.size(); ++k) lp += beta[k] * w[k];
  return lp;
}

double gaussian_log_likelihood(double y, double lambda, double sigmaY2) {
  if (!(sigmaY2 > 0.0))
    throw std::invalid_argument("gaussian_log_likelihood: sigmaY2 must be positive");
  return normal_log_pdf(y, lambda, sigmaY2);
}

double poisson_log_likelihood(double y, double offset, double lambda) {
  if (y < 0.0)
    throw std::invalid_argument("poisson_log_likelihood: negative count");
  return y * (std::log(offset) + lambda) - offset * std::exp(lambda) -
         std::lgamma(y + 1.0);
}

void AdaptiveStep::record(bool accepted) {
  ++n_proposed;
  if (accepted) ++n_accepted;
  if (!frozen) {
    const double gain = std::pow(static_cast<double>(n_proposed), -0.6);
    log_step += gain * ((accepted ? 1.0 : 0.0) - 0.44);
  }
}

double mh_accept_probability(double log_ratio) {
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double rwm_update(double current, const std::function<double(double)>& log_density,
                  AdaptiveStep& step, Rng& rng) {
  const double proposal = current + step.step() * rng.normal();
  const double log_ratio = log_density(proposal) - log_density(current);
  const bool accept = rng.uniform() < mh_accept_probability(log_ratio);
  step.record(accept);
  return accept ? proposal : current;
}

double theta_cond_log_lik(double theta, ResponseKind kind, const ThetaSuffStats& stats,
                          double sigmaY2) {
  if (kind == ResponseKind::gaussian)
    return -(stats.count * theta * theta - 2.0 * theta * stats.sum_resid) /
           (2.0 * sigmaY2);
  return theta * stats.sum_y - std::exp(theta) * stats.sum_scaled_offset;
}

double sample_theta(double theta, ResponseKind kind, const ThetaSuffStats& stats,
                    bool empty, double sigmaY2, const Hyperparameters& hyper,
                    AdaptiveStep& step, Rng& rng) {
  if (empty) return rng.student_t(hyper.t_df, hyper.mu_theta, hyper.sigma_theta);
  auto log_density = [&](double t) {
    return t_log_pdf(t, hyper.mu_theta, hyper.sigma_theta, hyper.t_df) +
           theta_cond_log_lik(t, kind, stats, sigmaY2);
  };
  return rwm_update(theta, log_density, step, rng);
}

void sample_beta(std::vector<double>& beta, ResponseKind kind, const Dataset& data,
                 std::vector<double>& resid, std::vector<double>& mu, double sigmaY2,
                 const Hyperparameters& hyper, std::vector<AdaptiveStep>& steps,
                 Rng& rng) {
  const int p = static_cast<int>(beta.size());
  if (p == 0) return;
  const int n = data.n();
  for (int k = 0; k < p; ++k) {
    const double delta = steps[k].step() * rng.normal();
    const double proposal = beta[k] + delta;
    double log_ratio = t_log_pdf(proposal, hyper.mu_beta, hyper.sigma_beta, hyper.t_df) -
                       t_log_pdf(beta[k], hyper.mu_beta, hyper.sigma_beta, hyper.t_df);
    if (kind == ResponseKind::gaussian) {
      // ll(delta) - ll(0) = (2 delta B - delta^2 A) / (2 sigma^2)
      double A = 0.0, B = 0.0;
      for (int i = 0; i < n; ++i) {
        const double wik = data.w[i][k];
        A += wik * wik;
        B += wik * resid[i];
      }
      log_ratio += (2.0 * delta * B - delta * delta * A) / (2.0 * sigmaY2);
    } else {
      double lr = 0.0;
      for (int i = 0; i < n; ++i) {
        const double wik = data.w[i][k];
        lr += data.y[i] * wik * delta - mu[i] * std::expm1(wik * delta);
      }
      log_ratio += lr;
    }
    const bool accept = rng.uniform() < mh_accept_probability(log_ratio);
    steps[k].record(accept);
    if (accept) {
      beta[k] = proposal;
      if (kind == ResponseKind::gaussian) {
        for (int i = 0; i < n; ++i) resid[i] -= data.w[i][k] * delta;
      } else {
        for (int i = 0; i < n; ++i) mu[i] *= std::exp(data.w[i][k] * delta);
      }
    }
  }
}

double sample_tauY(std::span<const double> residuals, double s_tauY, double r_tauY,
                   Rng& rng) {
  double ss = 0.0;
  for (double r : residuals) ss += r * r;
  const double shape = s_tauY + 0.5 * static_cast<double>(residuals.size());
  const double rate = r_tauY + 0.5 * ss;
  return rng.gamma(shape, rate);
}

}  // namespace spr
