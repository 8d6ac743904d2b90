#pragma once

#include <string>
#include <vector>

#include "spr/config.hpp"
#include "spr/data.hpp"
#include "spr/mcmc.hpp"
#include "spr/postprocess.hpp"

namespace spr {

// Loads data CSV + adjacency file, applies optional quintile discretisation,
// validates, and expands the Dirichlet concentrations in config.hyper.
Dataset load_dataset(RunConfig& config);

// Runs n_chains chains with derived seeds and writes every output file.
void fit(const RunConfig& config);

// Writes data.csv, adjacency.txt and truth.csv for a synthetic spec.
void simulate(const SynthConfig& config);

// Reuses the persisted trace in config.output_dir to draw predictions for
// config.profiles; rewrites predictions.csv there.
void predict_from_dir(const RunConfig& config);

// Recomputes similarity, partition, summaries (and predictions if profiles
// were persisted) from the files in an existing output directory.
void summarize_dir(const std::string& output_dir, int k_min = 0, int k_max = 0);

// --- output file helpers (also used by tests) ---

std::string chain_suffix(int chain, int n_chains);

void write_trace_scalars(const std::string& path, const SampleTrace& trace);
void write_allocations(const std::string& path, const SampleTrace& trace);
void write_trace_clusters(const std::string& path, const SampleTrace& trace);
// Dense matrix up to dense_limit areas, `i,j,s` upper triangle beyond it
// (flagged in the header comment).
void write_similarity(const std::string& path, const SimilarityMatrix& S,
                      int dense_limit = 2000);
void write_partition(const std::string& path, const Partition& partition);
void write_cluster_summary(const std::string& path,
                           const std::vector<ClusterSummary>& summaries);
void write_spatial_u(const std::string& path, const std::vector<double>& u_mean);
void write_predictions(const std::string& path,
                       const std::vector<PredictionDraw>& draws);

std::vector<std::vector<int>> read_allocations(const std::string& path);
SimilarityMatrix read_similarity(const std::string& path);

// Rebuilds a pooled SampleTrace from persisted per-chain files.
SampleTrace load_trace(const std::string& output_dir, const RunConfig& persisted,
                       bool need_allocations);

// Potential scale reduction factor across chains of one scalar trace.
double potential_scale_reduction(const std::vector<std::vector<double>>& chains);

std::string fmt_double(double v);  // NaN -> "NA", 17 significant digits

}  // namespace spr
