#pragma once

#include <cstdint>
#include <vector>

#include "spr/covariate_model.hpp"
#include "spr/data.hpp"
#include "spr/response_model.hpp"
#include "spr/rng.hpp"
#include "spr/spatial.hpp"

namespace spr {

// Residual stick-breaking mass below which the truncation level is
// considered adequate.
inline constexpr double kStickResidualTol = 1e-8;

// Full parameter state of the truncated stick-breaking sampler. Cluster
// vectors all have size C_total(); psi is derived from V.
struct MCMCState {
  std::vector<int> z;
  std::vector<double> V;
  std::vector<double> psi;
  std::vector<double> theta;
  std::vector<ClusterCovariateParams> phi;
  ResponseGlobals globals;
  SpatialField spatial;
  double alpha = 1.0;

  int C_total() const { return static_cast<int>(V.size()); }
  int n_occupied() const;
  std::vector<int> occupancy() const;  // member count per cluster
  double residual_stick_mass() const;
};

struct Schedule {
  long n_iter = 10000;
  long burn_in = 5000;
  int thin = 1;
  int n_init_clusters = 50;
  std::uint64_t seed = 1;
  int u_thin = 10;  // record a u snapshot every u_thin-th retained iteration
};

// One retained iteration. Cluster-indexed vectors are relabelled by
// descending occupancy (ties by original label); the chain state itself is
// never relabelled.
struct IterationRecord {
  std::vector<int> z;
  double alpha = 0.0;
  double tau = 0.0;   // NaN when the spatial term is disabled
  double tauY = 0.0;  // NaN for Poisson response
  std::vector<double> beta;
  int n_occupied = 0;
  std::vector<double> psi;
  std::vector<double> theta;
  std::vector<ClusterCovariateParams> phi;
  std::vector<double> u;  // empty unless this is a u-snapshot record
};

struct SampleTrace {
  int n_areas = 0;
  ResponseKind response_kind = ResponseKind::gaussian;
  bool spatial_enabled = true;
  std::vector<IterationRecord> records;
  std::vector<double> u_mean;  // posterior mean over all retained iterations

  int n_retained() const { return static_cast<int>(records.size()); }
};

// Named components of the joint log density; used by the bookkeeping
// checks that compare incremental updates against a full recompute.
struct JointLogDensity {
  double response_lik = 0.0;
  double covariate_lik = 0.0;
  double z_given_psi = 0.0;
  double v_given_alpha = 0.0;
  double alpha_prior = 0.0;
  double phi_prior = 0.0;
  double theta_prior = 0.0;
  double beta_prior = 0.0;
  double tauY_prior = 0.0;
  double u_given_tau = 0.0;
  double tau_prior = 0.0;

  double total() const;
};

// Recomputes every component from scratch.
JointLogDensity joint_log_density(const MCMCState& state, const Dataset& data,
                                  const Hyperparameters& hyper, bool spatial_enabled);

// --- individual sampler blocks ---

MCMCState init_state(const Dataset& data, const Hyperparameters& hyper,
                     int n_init_clusters, bool spatial_enabled, Rng& rng);

// psi_c = V_c * prod_{l<c} (1 - V_l)
void recompute_weights(MCMCState& state);

struct AllocationSums {
  double covariate_ll = 0.0;
  double response_ll = 0.0;
  double z_given_psi = 0.0;
};

// Draws every z_i from its conditional; returns the log-density sums at the
// chosen allocations. Throws NumericalError if some area has zero weight
// everywhere.
AllocationSums sample_allocations(MCMCState& state, const Dataset& data, Rng& rng);

// Conjugate stick update plus truncation extension: appends prior-drawn
// sticks (and prior cluster parameters) until the residual mass drops below
// kStickResidualTol.
void sample_sticks(MCMCState& state, const Hyperparameters& hyper, Rng& rng);

double sample_alpha(const std::vector<double>& V, double s_alpha, double r_alpha,
                    Rng& rng);

// Metropolis swap of two cluster labels (parameters and allocations move
// together; stick positions stay). Accepts by the stick-weight ratio.
void label_swap_move(MCMCState& state, std::vector<AdaptiveStep>* theta_steps,
                     Rng& rng);

// Relabelling by descending occupancy for trace reporting.
std::vector<int> occupancy_relabel(const MCMCState& state);

// --- chain orchestration ---

class ProfileRegressionSampler {
 public:
  ProfileRegressionSampler(const Dataset& data, const Hyperparameters& hyper,
                           bool spatial_enabled, std::uint64_t seed,
                           int n_init_clusters);

  void sweep();
  void freeze_adaptation();

  SampleTrace run(const Schedule& schedule);

  const MCMCState& state() const { return state_; }
  MCMCState& state() { return state_; }
  Rng& rng() { return rng_; }
  long sweep_count() const { return sweep_count_; }

  // When enabled, incremental log-density bookkeeping runs during each
  // sweep and is validated against a full recompute at the end of it.
  void set_debug_checks(bool on);
  const JointLogDensity& tracked_components() const { return components_; }
  double max_bookkeeping_error() const { return max_bookkeeping_error_; }

  double theta_acceptance_rate() const;
  double beta_acceptance_rate() const;

 private:
  void resize_step_slots();
  void check_state_invariants() const;
  void refresh_bookkeeping_after(const char* block);

  const Dataset* data_;
  const Hyperparameters* hyper_;
  bool spatial_enabled_;
  Rng rng_;
  MCMCState state_;
  std::vector<AdaptiveStep> theta_steps_;
  std::vector<AdaptiveStep> beta_steps_;
  std::vector<double> lgamma_y_;  // cached lgamma(y_i + 1) for Poisson
  bool debug_checks_ = false;
  JointLogDensity components_;
  double max_bookkeeping_error_ = 0.0;
  long sweep_count_ = 0;
};

SampleTrace run_chain(const Dataset& data, const Hyperparameters& hyper,
                      const Schedule& schedule, bool spatial_enabled,
                      bool debug_checks = false);

}  // namespace spr
