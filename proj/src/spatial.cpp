#include "spr/spatial.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "spr/ars.hpp"
#include "spr/errors.hpp"

namespace spr {

double quadratic_form(std::span<const double> u, const NeighborhoodGraph& graph) {
  if (static_cast<int>(u.size()) != graph.n)
    throw std::invalid_argument("quadratic_form: length mismatch");
  double qf = 0.0;
  for (int i = 0; i < graph.n; ++i) {
    for (int j : graph.adjacency[i]) {
      if (j > i) {
        const double d = u[i] - u[j];
        qf += d * d;
      }
    }
  }
  return qf;
}

double neighbor_mean(int i, std::span<const double> u, const NeighborhoodGraph& graph) {
  const auto& adj = graph.adjacency[i];
  if (adj.empty())
    throw std::invalid_argument("neighbor_mean: node " + std::to_string(i) +
                                " has no neighbours");
  double s = 0.0;
  for (int j : adj) s += u[j];
  return s / static_cast<double>(adj.size());
}

UGaussianConditional u_gaussian_conditional(double resid, double sigmaY2, double tau,
                                            int n_i, double ubar) {
  if (!(sigmaY2 > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("u_gaussian_conditional: nonpositive variance or tau");
  const double prec = 1.0 / sigmaY2 + tau * n_i;
  const double variance = 1.0 / prec;
  const double mean = (resid / sigmaY2 + tau * n_i * ubar) * variance;
  return {mean, variance};
}

double sample_u_gaussian(int i, double resid, double sigmaY2,
                         std::span<const double> u, double tau,
                         const NeighborhoodGraph& graph, Rng& rng) {
  const double ubar = neighbor_mean(i, u, graph);
  const auto cond = u_gaussian_conditional(resid, sigmaY2, tau, graph.degree(i), ubar);
  return rng.normal(cond.mean, std::sqrt(cond.variance));
}

double sample_u_poisson(int i, double y, double scaled_offset,
                        std::span<const double> u, double tau,
                        const NeighborhoodGraph& graph, Rng& rng) {
  const double n_i = graph.degree(i);
  const double ubar = neighbor_mean(i, u, graph);
  const double prior_prec = tau * n_i;
  auto log_f = [=](double v) {
    const double d = v - ubar;
    return y * v - scaled_offset * std::exp(v) - 0.5 * prior_prec * d * d;
  };
  auto dlog_f = [=](double v) {
    return y - scaled_offset * std::exp(v) - prior_prec * (v - ubar);
  };
  auto d2log_f = [=](double v) { return -scaled_offset * std::exp(v) - prior_prec; };

  const std::string ctx = "u_poisson site " + std::to_string(i);
  const double mode = find_concave_mode(dlog_f, d2log_f, ubar, ctx.c_str());
  const double width = 1.0 / std::sqrt(-d2log_f(mode));
  ArsSampler sampler(log_f, dlog_f, mode - width, mode + width);
  return sampler.draw(rng);
}

GammaParams tau_posterior(std::span<const double> u, const NeighborhoodGraph& graph,
                          double a_tau, double b_tau) {
  const double shape = a_tau + 0.5 * graph.icar_rank();
  const double rate = b_tau + 0.5 * quadratic_form(u, graph);
  return {shape, rate};
}

double sample_tau(std::span<const double> u, const NeighborhoodGraph& graph,
                  double a_tau, double b_tau, Rng& rng) {
  const auto post = tau_posterior(u, graph, a_tau, b_tau);
  return rng.gamma(post.shape, post.rate);
}

double recenter(std::vector<double>& u, std::span<double> thetas) {
  if (u.empty()) return 0.0;
  double m = 0.0;
  for (double v : u) m += v;
  m /= static_cast<double>(u.size());
  for (double& v : u) v -= m;
  for (double& t : thetas) t += m;
  return m;
}

std::vector<double> sample_icar_constrained(const NeighborhoodGraph& graph, double tau,
                                            Rng& rng) {
  const int n = graph.n;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    P(i, i) = graph.degree(i);
    for (int j : graph.adjacency[i]) P(i, j) = -1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(P);
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  const double tol = 1e-9 * std::max(1.0, values(n - 1));
  for (int j = 0; j < n; ++j) {
    if (values(j) > tol) {
      const double sd = 1.0 / std::sqrt(tau * values(j));
      u += vectors.col(j) * (sd * rng.normal());
    }
  }
  return std::vector<double>(u.data(), u.data() + n);
}

}  // namespace spr
