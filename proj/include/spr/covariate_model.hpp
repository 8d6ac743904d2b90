#pragma once

#include <span>
#include <vector>

#include "spr/rng.hpp"

namespace spr {

// Per-cluster categorical probabilities, one simplex per covariate.
struct ClusterCovariateParams {
  std::vector<std::vector<double>> phi;  // phi[j][k]
};

// log prod_j phi[j][x_j]; -inf when a zero-probability category is observed.
double covariate_log_likelihood(std::span<const int> codes,
                                const ClusterCovariateParams& params);

// Conjugate Dirichlet draw: concentration a_j plus the category counts of
// the cluster members. An empty member set draws from the prior.
ClusterCovariateParams sample_phi(const std::vector<const std::vector<int>*>& member_rows,
                                  const std::vector<std::vector<double>>& a,
                                  const std::vector<int>& n_categories, Rng& rng);

// Category counts per covariate over the given member rows.
std::vector<std::vector<int>> category_counts(
    const std::vector<const std::vector<int>*>& member_rows,
    const std::vector<int>& n_categories);

}  // namespace spr
