#pragma once

#include <cstdint>
#include <vector>

#include "spr/data.hpp"
#include "spr/mcmc.hpp"
#include "spr/postprocess.hpp"
#include "spr/rng.hpp"

namespace spr {

enum class GraphKind { grid, path, random_planar };

GraphKind graph_kind_from_string(const std::string& s);

// Synthetic-data recipe: balanced clusters, covariate simplices concentrated
// around per-cluster modal categories, intercepts spaced by `separation`,
// and an ICAR field drawn on the graph's non-null eigenspace.
struct SynthSpec {
  int n_areas = 200;
  GraphKind graph_kind = GraphKind::grid;
  int k_true = 3;
  double separation = 2.0;
  double tau_true = 2.0;
  ResponseKind response_kind = ResponseKind::gaussian;
  std::uint64_t seed = 1;
  int n_covariates = 6;
  int n_categories = 5;
  double noise_sd = 1.0;      // Gaussian response noise
  double poisson_offset = 10.0;  // constant E_i for Poisson
};

struct SynthData {
  Dataset dataset;
  std::vector<int> true_labels;
  std::vector<double> true_u;
  std::vector<std::vector<std::vector<double>>> true_phi;  // [cluster][j][k]
  std::vector<double> true_theta;
};

SynthData generate(const SynthSpec& spec);

// Exact posterior over all set partitions of a tiny dataset (n <= 4,
// J <= 2, spatial term off): Dirichlet-multinomial covariate marginals in
// closed form, response and concentration parameters integrated on grids.
struct EnumeratedPosterior {
  std::vector<std::vector<int>> partitions;  // canonical membership labels
  std::vector<double> probabilities;
  SimilarityMatrix coclustering;
};

EnumeratedPosterior enumerate_posterior(const Dataset& data,
                                        const Hyperparameters& hyper);

// Joint-model simulators for the Geweke comparison.
// Draws a full parameter state from the model priors (u on the constrained
// ICAR subspace, allocations from the stick weights).
MCMCState prior_draw_state(const Dataset& data, const Hyperparameters& hyper,
                           bool spatial_enabled, Rng& rng);

// Redraws the data columns (y, x) from their likelihood given the state.
void regenerate_data(Dataset& data, const MCMCState& state, Rng& rng);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

// Plain k-means on standardized (y, one-hot x) with several restarts;
// a deliberately simple baseline used to confirm synthetic signal.
std::vector<int> baseline_kmeans(const Dataset& data, int k, int n_restarts, Rng& rng);

}  // namespace spr
