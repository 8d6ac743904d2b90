#include <doctest.h>

#include <cmath>

#include "spr/dist.hpp"
#include "spr/rng.hpp"
#include "test_support.hpp"

using namespace spr;
using test_support::ks_test_p;
using test_support::mean;
using test_support::variance;

TEST_CASE("uniform stays strictly inside (0,1)") {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("same seed reproduces the stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("normal moments") {
  Rng rng(1);
  std::vector<double> draws(200000);
  for (auto& d : draws) d = rng.normal();
  CHECK(std::fabs(mean(draws)) < 0.01);
  CHECK(std::fabs(variance(draws) - 1.0) < 0.02);
}

TEST_CASE("gamma draws match the analytic CDF") {
  Rng rng(2);
  for (const auto& [shape, rate] : {std::pair{0.5, 1.0}, {2.5, 2.5}, {11.0, 3.0}}) {
    std::vector<double> draws(10000);
    for (auto& d : draws) d = rng.gamma(shape, rate);
    const double p =
        ks_test_p(draws, [=](double x) { return gamma_cdf(x, shape, rate); });
    CHECK(p > 0.01);
  }
}

TEST_CASE("beta draws match the analytic CDF") {
  Rng rng(3);
  std::vector<double> draws(10000);
  for (auto& d : draws) d = rng.beta(1.0, 4.0);
  const double p =
      ks_test_p(draws, [](double x) { return test_support::beta_inc(1.0, 4.0, x); });
  CHECK(p > 0.01);
}

TEST_CASE("student t location-scale moments") {
  Rng rng(4);
  std::vector<double> draws(400000);
  for (auto& d : draws) d = rng.student_t(7.0, 1.5, 2.0);
  CHECK(std::fabs(mean(draws) - 1.5) < 0.02);
  // var = scale^2 * df/(df-2)
  CHECK(std::fabs(variance(draws) - 4.0 * 7.0 / 5.0) < 0.15);
}

TEST_CASE("poisson mean/variance incl. chunked large means") {
  Rng rng(5);
  for (double mu : {0.3, 4.0, 75.0}) {
    std::vector<double> draws(100000);
    for (auto& d : draws) d = static_cast<double>(rng.poisson(mu));
    CHECK(mean(draws) == doctest::Approx(mu).epsilon(0.02));
    CHECK(variance(draws) == doctest::Approx(mu).epsilon(0.05));
  }
}

TEST_CASE("dirichlet draws sit on the simplex with the right mean") {
  Rng rng(6);
  const std::vector<double> conc = {2.0, 1.0, 5.0};
  std::vector<double> m(3, 0.0);
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    const auto draw = rng.dirichlet(conc);
    double sum = 0.0;
    for (double v : draw) sum += v;
    REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) m[k] += draw[k];
  }
  for (int k = 0; k < 3; ++k)
    CHECK(m[k] / N == doctest::Approx(conc[k] / 8.0).epsilon(0.02));
}

TEST_CASE("categorical_logits matches weights") {
  Rng rng(8);
  const std::vector<double> logw = {std::log(0.2), std::log(0.5), std::log(0.3)};
  std::vector<int> counts(3, 0);
  const int N = 100000;
  for (int i = 0; i < N; ++i) ++counts[rng.categorical_logits(logw)];
  CHECK(counts[0] / double(N) == doctest::Approx(0.2).epsilon(0.05));
  CHECK(counts[1] / double(N) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(counts[2] / double(N) == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("derived seeds differ per stream") {
  CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(1, 1));
  CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(2, 0));
  CHECK(Rng::derive_seed(1, 5) == Rng::derive_seed(1, 5));
}
