#include <doctest.h>

#include <cmath>

#include "spr/data.hpp"
#include "spr/dist.hpp"
#include "spr/graph.hpp"
#include "spr/response_model.hpp"
#include "spr/rng.hpp"
#include "test_support.hpp"

using namespace spr;
using test_support::ks_test_p;
using test_support::mean;
using test_support::variance;

TEST_CASE("linear predictor") {
  CHECK(linear_predictor(1.0, {}, {}, 0.0) == 1.0);
  const std::vector<double> b1 = {2.0}, w1 = {3.0};
  CHECK(linear_predictor(0.0, b1, w1, 0.0) == 6.0);
  const std::vector<double> b2 = {1.0, -1.0}, w2 = {2.0, 2.0};
  CHECK(linear_predictor(0.5, b2, w2, 0.25) == doctest::Approx(0.75));
  CHECK_THROWS(linear_predictor(0.0, b2, w1, 0.0));
}

TEST_CASE("gaussian log-likelihood closed forms") {
  CHECK(gaussian_log_likelihood(1.0, 1.0, 1.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));
  CHECK(gaussian_log_likelihood(2.0, 1.0, 1.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI) - 0.5).epsilon(1e-14));
  // independent long-double evaluation of the density formula
  const long double y = 2.3L, lambda = 1.1L, var = 0.25L;
  const long double oracle =
      -0.5L * std::log(2.0L * 3.14159265358979323846264338328L * var) -
      (y - lambda) * (y - lambda) / (2.0L * var);
  CHECK(gaussian_log_likelihood(2.3, 1.1, 0.25) ==
        doctest::Approx(static_cast<double>(oracle)).epsilon(1e-12));
}

TEST_CASE("poisson log-likelihood closed forms") {
  CHECK(poisson_log_likelihood(0.0, 1.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(poisson_log_likelihood(1.0, 1.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  // y=7, E=2.5, lambda=0.4 summed by hand with the exact factorial 5040
  const long double oracle = 7.0L * (std::log(2.5L) + 0.4L) -
                             2.5L * std::exp(0.4L) - std::log(5040.0L);
  CHECK(poisson_log_likelihood(7.0, 2.5, 0.4) ==
        doctest::Approx(static_cast<double>(oracle)).epsilon(1e-10));
  CHECK_THROWS(poisson_log_likelihood(-1.0, 1.0, 0.0));
}

TEST_CASE("gaussian density integrates to one on a fine grid") {
  const double var = 0.7, lambda = 0.3;
  const double lo = lambda - 12.0, hi = lambda + 12.0;
  const int G = 200000;
  const double h = (hi - lo) / G;
  double total = 0.0;
  for (int g = 0; g <= G; ++g) {
    const double w = (g == 0 || g == G) ? 0.5 : 1.0;
    total += w * std::exp(gaussian_log_likelihood(lo + g * h, lambda, var));
  }
  CHECK(total * h == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("poisson pmf sums to one for mu up to 20") {
  for (double lambda : {std::log(0.5), std::log(5.0), std::log(20.0)}) {
    double total = 0.0;
    for (int y = 0; y < 300; ++y)
      total += std::exp(poisson_log_likelihood(y, 1.0, lambda));
    CHECK(std::fabs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("empty cluster refreshes theta from the t prior") {
  Rng rng(31);
  Hyperparameters hyper;
  AdaptiveStep step;
  std::vector<double> draws(100000);
  for (auto& d : draws)
    d = sample_theta(0.0, ResponseKind::gaussian, {}, true, 1.0, hyper, step, rng);
  std::nth_element(draws.begin(), draws.begin() + draws.size() / 2, draws.end());
  const double median = draws[draws.size() / 2];
  CHECK(std::fabs(median - hyper.mu_theta) < 0.02 * hyper.sigma_theta);
  CHECK(step.n_proposed == 0);  // prior refresh, not a Metropolis move
}

TEST_CASE("theta chain concentrates at the sample mean and matches quadrature") {
  Rng rng(32);
  Hyperparameters hyper;
  // 1000 observations near 5 with sigma^2 = 1
  ThetaSuffStats stats;
  stats.count = 1000.0;
  std::vector<double> ys(1000);
  for (auto& y : ys) y = 5.0 + rng.normal();
  for (double y : ys) stats.sum_resid += y;

  AdaptiveStep step;
  double theta = 0.0;
  std::vector<double> chain;
  for (int it = 0; it < 30000; ++it) {
    theta = sample_theta(theta, ResponseKind::gaussian, stats, false, 1.0, hyper, step,
                         rng);
    if (it == 10000) step.frozen = true;
    if (it >= 10000) chain.push_back(theta);
  }
  const double chain_mean = mean(chain);
  CHECK(std::fabs(chain_mean - 5.0) < 0.1);

  // quadrature oracle for the 1-d conditional
  const double lo = 4.0, hi = 6.0;
  const int G = 20000;
  double num = 0.0, den = 0.0;
  for (int g = 0; g <= G; ++g) {
    const double t = lo + (hi - lo) * g / G;
    const double lp = t_log_pdf(t, hyper.mu_theta, hyper.sigma_theta, hyper.t_df) +
                      theta_cond_log_lik(t, ResponseKind::gaussian, stats, 1.0);
    const double w = std::exp(lp - 1000.0 * 12.5);  // stabilise
    num += w * t;
    den += w;
  }
  CHECK(chain_mean == doctest::Approx(num / den).epsilon(0.02));

  // tuning lands in a sane acceptance window
  CHECK(step.acceptance_rate() > 0.1);
  CHECK(step.acceptance_rate() < 0.9);
}

TEST_CASE("adaptation drives acceptance toward 0.44 on a symmetric target") {
  Rng rng(33);
  Hyperparameters hyper;
  ThetaSuffStats stats;
  stats.count = 50.0;
  stats.sum_resid = 0.0;  // data centred at the prior location
  AdaptiveStep step;
  double theta = 0.0;
  for (int it = 0; it < 20000; ++it)
    theta = sample_theta(theta, ResponseKind::gaussian, stats, false, 1.0, hyper, step,
                         rng);
  const long before_p = step.n_proposed, before_a = step.n_accepted;
  step.frozen = true;
  for (int it = 0; it < 20000; ++it)
    theta = sample_theta(theta, ResponseKind::gaussian, stats, false, 1.0, hyper, step,
                         rng);
  const double rate = static_cast<double>(step.n_accepted - before_a) /
                      static_cast<double>(step.n_proposed - before_p);
  CHECK(rate > 0.1);
  CHECK(rate < 0.9);
}

TEST_CASE("poisson theta conditional concentrates near log of the rate ratio") {
  Rng rng(34);
  Hyperparameters hyper;
  ThetaSuffStats stats;
  stats.sum_y = 900.0;             // 100 areas, mean count 9
  stats.sum_scaled_offset = 100.0; // E_i = 1 each
  AdaptiveStep step;
  double theta = 0.0;
  std::vector<double> chain;
  for (int it = 0; it < 30000; ++it) {
    theta = sample_theta(theta, ResponseKind::poisson, stats, false, 1.0, hyper, step,
                         rng);
    if (it >= 10000) chain.push_back(theta);
  }
  CHECK(mean(chain) == doctest::Approx(std::log(9.0)).epsilon(0.02));
}

TEST_CASE("sample_beta is a no-op without fixed effects") {
  Rng rng(35);
  Hyperparameters hyper;
  Dataset data;
  std::vector<double> beta, resid, mu;
  std::vector<AdaptiveStep> steps;
  CHECK_NOTHROW(sample_beta(beta, ResponseKind::gaussian, data, resid, mu, 1.0, hyper,
                            steps, rng));
  CHECK(beta.empty());
}

TEST_CASE("sample_beta recovers a strong binary effect") {
  Rng rng(36);
  Hyperparameters hyper;
  const int n = 1000;
  Dataset data;
  data.graph = path_graph(n);
  data.response_kind = ResponseKind::gaussian;
  data.y.resize(n);
  data.w.assign(n, std::vector<double>(1, 0.0));
  for (int i = 0; i < n; ++i) {
    data.w[i][0] = (i % 2 == 0) ? 1.0 : 0.0;
    data.y[i] = 2.0 * data.w[i][0] + rng.normal();
  }
  std::vector<double> beta = {0.0};
  std::vector<AdaptiveStep> steps(1);
  std::vector<double> resid(n), mu;
  for (int i = 0; i < n; ++i) resid[i] = data.y[i] - beta[0] * data.w[i][0];
  std::vector<double> chain;
  for (int it = 0; it < 30000; ++it) {
    sample_beta(beta, ResponseKind::gaussian, data, resid, mu, 1.0, hyper, steps, rng);
    if (it == 10000) steps[0].frozen = true;
    if (it >= 10000) chain.push_back(beta[0]);
  }
  CHECK(std::fabs(mean(chain) - 2.0) < 0.2);
  // the in-place residuals never drift from a fresh recomputation
  for (int i = 0; i < n; ++i)
    CHECK(resid[i] ==
          doctest::Approx(data.y[i] - beta[0] * data.w[i][0]).epsilon(1e-9));
}

TEST_CASE("with a flattened likelihood beta draws match the t prior moments") {
  Rng rng(37);
  Hyperparameters hyper;
  const int n = 50;
  Dataset data;
  data.graph = path_graph(n);
  data.response_kind = ResponseKind::gaussian;
  data.y.assign(n, 0.0);
  data.w.assign(n, std::vector<double>(1, 1.0));
  std::vector<double> beta = {0.0};
  std::vector<AdaptiveStep> steps(1);
  std::vector<double> resid(n, 0.0), mu;
  const double huge_var = 1e8;  // sigmaY^2 -> infinity surrogate
  std::vector<double> chain;
  for (int it = 0; it < 400000; ++it) {
    sample_beta(beta, ResponseKind::gaussian, data, resid, mu, huge_var, hyper, steps,
                rng);
    if (it == 20000) steps[0].frozen = true;
    if (it >= 20000) chain.push_back(beta[0]);
  }
  CHECK(std::fabs(mean(chain) - hyper.mu_beta) < 0.05);
  const double prior_var = hyper.sigma_beta * hyper.sigma_beta * 7.0 / 5.0;
  CHECK(variance(chain) == doctest::Approx(prior_var).epsilon(0.1));
}

TEST_CASE("tauY conjugate draw shapes") {
  Rng rng(38);
  Hyperparameters hyper;
  // all residuals zero, n=10 -> Gamma(s+5, r)
  std::vector<double> zero(10, 0.0);
  std::vector<double> draws(100000);
  for (auto& d : draws) d = sample_tauY(zero, 2.5, 2.5, rng);
  CHECK(mean(draws) == doctest::Approx(7.5 / 2.5).epsilon(0.01));

  // residuals (1,-1), s=r=2.5 -> Gamma(3.5, 3.5), mean 1
  const std::vector<double> resid = {1.0, -1.0};
  for (auto& d : draws) d = sample_tauY(resid, 2.5, 2.5, rng);
  CHECK(mean(draws) == doctest::Approx(1.0).epsilon(0.01));

  // empty subset -> prior
  for (auto& d : draws) d = sample_tauY({}, 2.0, 4.0, rng);
  CHECK(mean(draws) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("tauY draws pass a KS test against the analytic Gamma") {
  Rng rng(39);
  const std::vector<double> resid = {1.0, -1.0, 0.5};
  std::vector<double> draws(10000);
  for (auto& d : draws) d = sample_tauY(resid, 2.5, 2.5, rng);
  const double shape = 2.5 + 1.5, rate = 2.5 + 0.5 * 2.25;
  const double p =
      ks_test_p(draws, [=](double x) { return gamma_cdf(x, shape, rate); });
  CHECK(p > 0.01);
}

TEST_CASE("Metropolis acceptance rule satisfies detailed balance on a 3-point toy") {
  // target on {0,1,2}; symmetric nearest-neighbour proposal
  const double pi[3] = {0.2, 0.5, 0.3};
  double T[3][3] = {{0}};
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      if (std::abs(x - y) != 1) continue;
      const double q = 0.5;
      T[x][y] = q * mh_accept_probability(std::log(pi[y]) - std::log(pi[x]));
    }
    T[x][x] = 1.0 - T[x][(x + 1) % 3] - T[x][(x + 2) % 3];
  }
  // detailed balance and stationarity
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      CHECK(pi[x] * T[x][y] == doctest::Approx(pi[y] * T[y][x]).epsilon(1e-12));
  for (int y = 0; y < 3; ++y) {
    double total = 0.0;
    for (int x = 0; x < 3; ++x) total += pi[x] * T[x][y];
    CHECK(std::fabs(total - pi[y]) < 1e-3);
  }

  // the full random-walk kernel reaches the same stationary law on a
  // piecewise-constant version of the target
  Rng rng(40);
  auto log_density = [&](double v) {
    if (v < -0.5 || v >= 2.5) return -std::numeric_limits<double>::infinity();
    return std::log(pi[static_cast<int>(std::floor(v + 0.5))]);
  };
  AdaptiveStep step;
  step.frozen = true;
  double x = 1.0;
  std::vector<double> occupancy(3, 0.0);
  const int N = 2000000;
  for (int it = 0; it < N; ++it) {
    x = rwm_update(x, log_density, step, rng);
    ++occupancy[static_cast<int>(std::floor(x + 0.5))];
  }
  for (int c = 0; c < 3; ++c) CHECK(std::fabs(occupancy[c] / N - pi[c]) < 5e-3);
}
