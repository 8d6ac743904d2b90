#pragma once

#include <array>
#include <optional>
#include <vector>

#include "spr/data.hpp"
#include "spr/mcmc.hpp"
#include "spr/rng.hpp"

namespace spr {

// Posterior co-clustering probabilities.
struct SimilarityMatrix {
  int n = 0;
  std::vector<double> values;  // row-major n*n, symmetric, unit diagonal

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
};

SimilarityMatrix similarity(const std::vector<const std::vector<int>*>& allocations,
                            int n_areas);
SimilarityMatrix similarity(const SampleTrace& trace);

struct Partition {
  std::vector<int> labels;
  std::vector<int> medoids;
  int k = 0;
  bool degenerate = false;  // set when the dissimilarity was all-zero
};

// PAM (BUILD + SWAP) on D = 1 - S for a fixed medoid count.
struct PamResult {
  Partition partition;
  double objective = 0.0;        // sum of dissimilarities to assigned medoids
  double build_objective = 0.0;  // objective before the SWAP phase
  double avg_silhouette = 0.0;
};
PamResult pam_fixed_k(const SimilarityMatrix& S, int k);

// Runs PAM over each k in k_range and keeps the one with the highest
// average silhouette width (ties to the smaller k).
Partition pam(const SimilarityMatrix& S, const std::vector<int>& k_range);

double average_silhouette(const SimilarityMatrix& S, const std::vector<int>& labels,
                          int k);

// Renumbers partition labels by ascending observed response mean.
Partition relabel_by_response(const Partition& partition, const std::vector<double>& y);

struct ClusterSummary {
  int cluster = 0;
  int n_members = 0;
  double mean_y = 0.0;
  // phi_quantiles[j][k] = {2.5, 25, 50, 75, 97.5} percentiles of phi_{c,j,k}
  std::vector<std::vector<std::array<double, 5>>> phi_quantiles;
};

// Per representative cluster: observed response mean and posterior phi
// quantiles aggregated by maximum-overlap matching of each iteration's
// clusters to the representative ones. Rows ordered by mean_y.
std::vector<ClusterSummary> cluster_summaries(const Partition& partition,
                                              const SampleTrace& trace,
                                              const Dataset& data);

// Hypothetical covariate profile; missing codes marginalise over that
// covariate. expected_offset is the Poisson E for predictive draws.
struct PseudoProfile {
  std::vector<std::optional<int>> codes;
  std::vector<double> fixed_effects;  // empty means all-zero
  double spatial_offset = 0.0;
  double expected_offset = 1.0;
};

struct PredictionDraw {
  int profile = 0;
  int iteration = 0;
  int cluster = 0;
  double value = 0.0;
};

// One predictive draw per retained iteration per profile: cluster chosen
// with weight psi_c * prod_{fixed j} phi_{c,j,code_j}, then a response draw
// from that cluster's predictive law.
std::vector<PredictionDraw> predict(const std::vector<PseudoProfile>& profiles,
                                    const SampleTrace& trace, Rng& rng);

// Cluster-selection distribution for one profile averaged over the trace
// (indexed by trace cluster label).
std::vector<double> cluster_selection_probs(const PseudoProfile& profile,
                                            const SampleTrace& trace);

// Empirical quantile with linear interpolation between order statistics.
double quantile_type7(std::vector<double> values, double q);

}  // namespace spr
