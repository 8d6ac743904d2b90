#include "spr/covariate_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spr {

double covariate_log_likelihood(std::span<const int> codes,
                                const ClusterCovariateParams& params) {
  if (codes.size() != params.phi.size())
    throw std::invalid_argument("covariate_log_likelihood: dimension mismatch");
  double ll = 0.0;
  for (std::size_t j = 0; j < codes.size(); ++j) {
    const auto& phi_j = params.phi[j];
    const int k = codes[j];
    if (k < 0 || k >= static_cast<int>(phi_j.size()))
      throw std::out_of_range("covariate_log_likelihood: code out of range");
    if (phi_j[k] <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += std::log(phi_j[k]);
  }
  return ll;
}

std::vector<std::vector<int>> category_counts(
    const std::vector<const std::vector<int>*>& member_rows,
    const std::vector<int>& n_categories) {
  std::vector<std::vector<int>> counts;
  counts.reserve(n_categories.size());
  for (int k : n_categories) counts.emplace_back(k, 0);
  for (const auto* row : member_rows)
    for (std::size_t j = 0; j < n_categories.size(); ++j) ++counts[j][(*row)[j]];
  return counts;
}

ClusterCovariateParams sample_phi(const std::vector<const std::vector<int>*>& member_rows,
                                  const std::vector<std::vector<double>>& a,
                                  const std::vector<int>& n_categories, Rng& rng) {
  const auto counts = category_counts(member_rows, n_categories);
  ClusterCovariateParams out;
  out.phi.reserve(a.size());
  std::vector<double> conc;
  for (std::size_t j = 0; j < a.size(); ++j) {
    conc.assign(a[j].begin(), a[j].end());
    for (std::size_t k = 0; k < conc.size(); ++k) conc[k] += counts[j][k];
    out.phi.push_back(rng.dirichlet(conc));
  }
  return out;
}

}  // namespace spr
