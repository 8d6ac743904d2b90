#include <doctest.h>

#include <cmath>

#include "spr/covariate_model.hpp"
#include "spr/rng.hpp"
#include "test_support.hpp"

using namespace spr;
using test_support::ks_test_p;

TEST_CASE("uniform phi over 5 categories, 6 covariates") {
  ClusterCovariateParams params;
  params.phi.assign(6, std::vector<double>(5, 0.2));
  const std::vector<int> x(6, 3);
  CHECK(covariate_log_likelihood(x, params) ==
        doctest::Approx(-6.0 * std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("point mass at the observed code has log-likelihood 0") {
  ClusterCovariateParams params;
  params.phi = {{1.0, 0.0, 0.0, 0.0, 0.0}};
  const std::vector<int> x = {0};
  CHECK(covariate_log_likelihood(x, params) == 0.0);
}

TEST_CASE("J=2 product matches a loop oracle") {
  ClusterCovariateParams params;
  params.phi = {{0.2, 0.8}, {0.5, 0.5}};
  const std::vector<int> x = {1, 0};
  double oracle = 0.0;
  for (std::size_t j = 0; j < params.phi.size(); ++j)
    oracle += std::log(params.phi[j][x[j]]);
  CHECK(covariate_log_likelihood(x, params) == doctest::Approx(std::log(0.4)));
  CHECK(covariate_log_likelihood(x, params) == doctest::Approx(oracle));
}

TEST_CASE("zero probability at an observed code yields -inf") {
  ClusterCovariateParams params;
  params.phi = {{1.0, 0.0}};
  const std::vector<int> x = {1};
  CHECK(covariate_log_likelihood(x, params) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("out-of-range code throws") {
  ClusterCovariateParams params;
  params.phi = {{0.5, 0.5}};
  const std::vector<int> x = {2};
  CHECK_THROWS(covariate_log_likelihood(x, params));
}

TEST_CASE("reordering covariates together with parameters leaves the value unchanged") {
  Rng rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const int J = 2 + rng.uniform_int(5);
    ClusterCovariateParams params;
    std::vector<int> x(J);
    for (int j = 0; j < J; ++j) {
      const int K = 2 + rng.uniform_int(4);
      std::vector<double> conc(K, 1.0);
      params.phi.push_back(rng.dirichlet(conc));
      x[j] = rng.uniform_int(K);
    }
    std::vector<int> perm(J);
    for (int j = 0; j < J; ++j) perm[j] = j;
    for (int j = J - 1; j > 0; --j) std::swap(perm[j], perm[rng.uniform_int(j + 1)]);
    ClusterCovariateParams shuffled;
    std::vector<int> xs(J);
    for (int j = 0; j < J; ++j) {
      shuffled.phi.push_back(params.phi[perm[j]]);
      xs[j] = x[perm[j]];
    }
    CHECK(covariate_log_likelihood(x, params) ==
          doctest::Approx(covariate_log_likelihood(xs, shuffled)).epsilon(1e-12));
  }
}

TEST_CASE("sample_phi prior draw has uniform mean") {
  Rng rng(22);
  const std::vector<std::vector<double>> a = {std::vector<double>(5, 1.0)};
  const std::vector<int> K = {5};
  std::vector<double> m(5, 0.0);
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    const auto params = sample_phi({}, a, K, rng);
    for (int k = 0; k < 5; ++k) m[k] += params.phi[0][k];
  }
  for (int k = 0; k < 5; ++k) CHECK(std::fabs(m[k] / N - 0.2) < 0.01);
}

TEST_CASE("posterior mean after 100 observations of category 2 is 101/105") {
  Rng rng(23);
  std::vector<int> row = {2};
  std::vector<const std::vector<int>*> members(100, &row);
  const std::vector<std::vector<double>> a = {std::vector<double>(5, 1.0)};
  const std::vector<int> K = {5};
  double m = 0.0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) m += sample_phi(members, a, K, rng).phi[0][2];
  // Dirichlet mean: (1 + 100) / (5 + 100)
  CHECK(m / N == doctest::Approx(101.0 / 105.0).epsilon(0.002));
}

TEST_CASE("counts (3,1) with a=(1,1) give posterior Dirichlet(4,2)") {
  Rng rng(24);
  std::vector<int> r0 = {0}, r1 = {1};
  std::vector<const std::vector<int>*> members = {&r0, &r0, &r0, &r1};
  const std::vector<std::vector<double>> a = {{1.0, 1.0}};
  const std::vector<int> K = {2};
  double m = 0.0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) m += sample_phi(members, a, K, rng).phi[0][0];
  CHECK(m / N == doctest::Approx(2.0 / 3.0).epsilon(0.005));
}

TEST_CASE("sample_phi always lands on the simplex") {
  Rng rng(25);
  for (int rep = 0; rep < 100; ++rep) {
    const int J = 1 + rng.uniform_int(4);
    std::vector<std::vector<double>> a;
    std::vector<int> K;
    std::vector<std::vector<int>> rows(rng.uniform_int(6));
    for (int j = 0; j < J; ++j) {
      K.push_back(2 + rng.uniform_int(5));
      a.emplace_back(K.back(), 0.5 + rng.uniform());
    }
    for (auto& row : rows) {
      row.resize(J);
      for (int j = 0; j < J; ++j) row[j] = rng.uniform_int(K[j]);
    }
    std::vector<const std::vector<int>*> members;
    for (auto& row : rows) members.push_back(&row);
    const auto params = sample_phi(members, a, K, rng);
    for (int j = 0; j < J; ++j) {
      double sum = 0.0;
      for (double v : params.phi[j]) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("conjugacy: empirical phi matches the analytic Beta posterior (KS)") {
  // K=2, 3 observations: two in category 0, one in category 1, a=(1,1)
  Rng rng(26);
  std::vector<int> r0 = {0}, r1 = {1};
  std::vector<const std::vector<int>*> members = {&r0, &r0, &r1};
  const std::vector<std::vector<double>> a = {{1.0, 1.0}};
  const std::vector<int> K = {2};
  std::vector<double> draws(10000);
  for (auto& d : draws) d = sample_phi(members, a, K, rng).phi[0][0];
  const double p =
      ks_test_p(draws, [](double x) { return test_support::beta_inc(3.0, 2.0, x); });
  CHECK(p > 0.01);
}
