#pragma once

#include <string>
#include <vector>

#include "spr/graph.hpp"

namespace spr {

enum class ResponseKind { gaussian, poisson };

std::string to_string(ResponseKind kind);
ResponseKind response_kind_from_string(const std::string& s);

// Parsed input columns before validation. Covariate columns hold numeric
// values that must be integral category codes unless the caller discretizes
// them first (see quintile_discretize).
struct RawTable {
  std::vector<double> y;
  std::vector<std::vector<double>> x_cols;
  std::vector<std::string> x_names;
  std::vector<std::vector<double>> w_cols;
  std::vector<std::string> w_names;
  std::vector<double> offsets;  // empty when the column is absent
};

// Validated model inputs. Immutable after construction; safe to share
// read-only across chains.
struct Dataset {
  std::vector<double> y;                   // length n
  std::vector<std::vector<int>> x;         // n rows of J category codes
  std::vector<int> n_categories;           // K_j per covariate
  std::vector<std::vector<double>> w;      // n rows of p fixed effects (empty rows if p=0)
  std::vector<double> offsets;             // length n for Poisson, empty otherwise
  NeighborhoodGraph graph;
  ResponseKind response_kind = ResponseKind::gaussian;

  int n() const { return static_cast<int>(y.size()); }
  int n_covariates() const { return static_cast<int>(n_categories.size()); }
  int n_fixed_effects() const { return w.empty() ? 0 : static_cast<int>(w.front().size()); }
};

// All prior constants; the spatial precision prior defaults to Gamma(1,1).
struct Hyperparameters {
  double s_alpha = 2.0;
  double r_alpha = 1.0;
  std::vector<std::vector<double>> a;  // Dirichlet concentrations, one vector per covariate
  double mu_theta = 0.0;
  double sigma_theta = 2.5;
  double mu_beta = 0.0;
  double sigma_beta = 2.5;
  double t_df = 7.0;
  double s_tauY = 2.5;
  double r_tauY = 2.5;
  double a_tau = 1.0;
  double b_tau = 1.0;

  // Fills `a` with flat vectors of the given concentration, one per covariate.
  void expand_dirichlet(const std::vector<int>& n_categories, double concentration = 1.0);

  void validate() const;  // throws InputError
};

// Checks every Dataset invariant and infers K_j (max code + 1) when not
// declared. Throws InputError on dimension mismatches, out-of-range codes,
// or missing/nonpositive Poisson offsets.
Dataset validate_dataset(const RawTable& table, NeighborhoodGraph graph,
                         ResponseKind response_kind,
                         const std::vector<int>& declared_categories = {});

// Maps each value to its quintile index 0..4. Boundaries sit at the
// empirical 20/40/60/80 percentiles (linear interpolation); values equal to
// a boundary go to the lower quintile. Requires >= 5 finite values.
std::vector<int> quintile_discretize(const std::vector<double>& values);

}  // namespace spr
