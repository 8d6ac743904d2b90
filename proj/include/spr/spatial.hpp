#pragma once

#include <span>
#include <vector>

#include "spr/graph.hpp"
#include "spr/rng.hpp"

namespace spr {

// ICAR random field and its precision scalar. The field is kept
// sum-to-zero by recenter(); isolated nodes are never updated by the site
// sweep and contribute nothing to the quadratic form or the rank.
struct SpatialField {
  std::vector<double> u;
  double tau = 1.0;
};

// u^T P u via the pairwise-difference identity sum_edges (u_i - u_j)^2.
double quadratic_form(std::span<const double> u, const NeighborhoodGraph& graph);

// Mean of u over the neighbours of i; requires degree >= 1.
double neighbor_mean(int i, std::span<const double> u, const NeighborhoodGraph& graph);

// Analytic mean/variance of the Gaussian full conditional for u_i:
// sigma_i^2 = 1 / (1/sigmaY2 + tau * n_i),
// m_i = (resid/sigmaY2 + tau * n_i * ubar_i) * sigma_i^2,
// where resid = Y_i - theta_{z_i} - W_i.beta. The plus sign on the
// neighbour-mean term follows from completing the square.
struct UGaussianConditional {
  double mean;
  double variance;
};
UGaussianConditional u_gaussian_conditional(double resid, double sigmaY2, double tau,
                                            int n_i, double ubar);

double sample_u_gaussian(int i, double resid, double sigmaY2,
                         std::span<const double> u, double tau,
                         const NeighborhoodGraph& graph, Rng& rng);

// Exact draw from the Poisson-response conditional
//   log p(u_i) = y_i u_i - s_i exp(u_i) - tau n_i (u_i - ubar_i)^2 / 2
// with s_i = E_i exp(theta_{z_i} + W_i.beta), via tangent-envelope ARS
// started at the conditional mode.
double sample_u_poisson(int i, double y, double scaled_offset,
                        std::span<const double> u, double tau,
                        const NeighborhoodGraph& graph, Rng& rng);

// Gamma(a_tau + rank/2, b_tau + u^T P u / 2) with rank = n - #components.
struct GammaParams {
  double shape;
  double rate;
};
GammaParams tau_posterior(std::span<const double> u, const NeighborhoodGraph& graph,
                          double a_tau, double b_tau);

double sample_tau(std::span<const double> u, const NeighborhoodGraph& graph,
                  double a_tau, double b_tau, Rng& rng);

// Subtracts mean(u) from every component and adds it to every theta, so all
// linear predictors are unchanged. Returns the shift.
double recenter(std::vector<double>& u, std::span<double> thetas);

// Draw from the intrinsic prior restricted to its non-null eigenspace
// (sum-to-zero within each component). Dense eigendecomposition; intended
// for synthesis and simulator checks, not the chain.
std::vector<double> sample_icar_constrained(const NeighborhoodGraph& graph, double tau,
                                            Rng& rng);

}  // namespace spr
