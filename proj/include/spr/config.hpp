#pragma once

#include <string>
#include <vector>

#include "spr/data.hpp"
#include "spr/mcmc.hpp"
#include "spr/postprocess.hpp"
#include "spr/synth.hpp"

namespace spr {

// Batch-run configuration. Format: `key = value` lines grouped under
// bracketed sections, `#` comments. Unknown keys are errors.
struct RunConfig {
  std::string data_path;
  std::string adjacency_path;
  std::string output_dir;

  Schedule schedule;
  int n_chains = 1;

  ResponseKind response_kind = ResponseKind::gaussian;
  bool spatial_enabled = true;
  bool quintile_covariates = false;
  int declared_categories = 0;  // 0 = infer from data

  Hyperparameters hyper;   // `a` expanded against the dataset at load time
  double dirichlet_a = 1.0;

  int k_min = 2;
  int k_max = 10;

  std::vector<PseudoProfile> profiles;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& name);

// `profile = c1,c2,...` with NA for marginalised covariates, plus optional
// `@ offset=<real>` (spatial residual) and `@ E=<real>` (Poisson offset).
PseudoProfile parse_profile(const std::string& text);

struct SynthConfig {
  SynthSpec spec;
  std::string output_dir;
};

SynthConfig parse_synth_config(const std::string& path);

void write_resolved_config(const std::string& path, const RunConfig& config);

}  // namespace spr
