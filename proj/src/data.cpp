#include "spr/data.hpp"

#include <algorithm>
#include <cmath>

#include "spr/errors.hpp"

namespace spr {

std::string to_string(ResponseKind kind) {
  return kind == ResponseKind::gaussian ? "gaussian" : "poisson";
}

ResponseKind response_kind_from_string(const std::string& s) {
  if (s == "gaussian") return ResponseKind::gaussian;
  if (s == "poisson") return ResponseKind::poisson;
  throw InputError("unknown response kind '" + s + "' (expected gaussian or poisson)");
}

void Hyperparameters::expand_dirichlet(const std::vector<int>& n_categories,
                                       double concentration) {
  a.clear();
  for (int k : n_categories) a.emplace_back(k, concentration);
}

void Hyperparameters::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw InputError(std::string("hyperparameter ") + name + " must be positive");
  };
  positive(s_alpha, "s_alpha");
  positive(r_alpha, "r_alpha");
  positive(sigma_theta, "sigma_theta");
  positive(sigma_beta, "sigma_beta");
  positive(t_df, "t_df");
  positive(s_tauY, "s_tauY");
  positive(r_tauY, "r_tauY");
  positive(a_tau, "a_tau");
  positive(b_tau, "b_tau");
  for (const auto& aj : a)
    for (double v : aj)
      if (!(v > 0.0)) throw InputError("Dirichlet concentrations must be positive");
}

Dataset validate_dataset(const RawTable& table, NeighborhoodGraph graph,
                         ResponseKind response_kind,
                         const std::vector<int>& declared_categories) {
  const int n = static_cast<int>(table.y.size());
  if (n == 0) throw InputError("validate_dataset: empty response column");
  if (n != graph.n)
    throw InputError("validate_dataset: row count " + std::to_string(n) +
                     " does not match graph n=" + std::to_string(graph.n));

  const int J = static_cast<int>(table.x_cols.size());
  if (!declared_categories.empty() &&
      static_cast<int>(declared_categories.size()) != J)
    throw InputError("validate_dataset: n_categories has " +
                     std::to_string(declared_categories.size()) + " entries for " +
                     std::to_string(J) + " covariates");

  for (double v : table.y)
    if (!std::isfinite(v)) throw InputError("validate_dataset: non-finite response value");

  Dataset ds;
  ds.y = table.y;
  ds.response_kind = response_kind;
  ds.graph = std::move(graph);

  ds.x.assign(n, std::vector<int>(J, 0));
  ds.n_categories.assign(J, 0);
  for (int j = 0; j < J; ++j) {
    const auto& col = table.x_cols[j];
    if (static_cast<int>(col.size()) != n)
      throw InputError("validate_dataset: covariate column " + std::to_string(j) +
                       " has " + std::to_string(col.size()) + " rows, expected " +
                       std::to_string(n));
    int max_code = -1;
    for (int i = 0; i < n; ++i) {
      const double v = col[i];
      if (!std::isfinite(v) || v != std::floor(v) || v < 0.0)
        throw InputError("validate_dataset: covariate " + std::to_string(j) +
                         " row " + std::to_string(i) +
                         " is not a nonnegative integer code");
      ds.x[i][j] = static_cast<int>(v);
      max_code = std::max(max_code, ds.x[i][j]);
    }
    const int k = declared_categories.empty() ? max_code + 1 : declared_categories[j];
    if (max_code >= k)
      throw InputError("validate_dataset: covariate " + std::to_string(j) + " code " +
                       std::to_string(max_code) + " out of range for K=" +
                       std::to_string(k));
    if (k < 1)
      throw InputError("validate_dataset: covariate " + std::to_string(j) +
                       " has no categories");
    ds.n_categories[j] = k;
  }

  const int p = static_cast<int>(table.w_cols.size());
  if (p > 0) {
    ds.w.assign(n, std::vector<double>(p, 0.0));
    for (int k = 0; k < p; ++k) {
      const auto& col = table.w_cols[k];
      if (static_cast<int>(col.size()) != n)
        throw InputError("validate_dataset: fixed-effect column " + std::to_string(k) +
                         " has wrong length");
      for (int i = 0; i < n; ++i) {
        if (!std::isfinite(col[i]))
          throw InputError("validate_dataset: non-finite fixed effect");
        ds.w[i][k] = col[i];
      }
    }
  }

  if (response_kind == ResponseKind::poisson) {
    if (static_cast<int>(table.offsets.size()) != n)
      throw InputError("validate_dataset: Poisson response requires an offset per row");
    for (int i = 0; i < n; ++i) {
      if (!(table.offsets[i] > 0.0))
        throw InputError("validate_dataset: offset at row " + std::to_string(i) +
                         " must be strictly positive");
      if (!(ds.y[i] >= 0.0) || ds.y[i] != std::floor(ds.y[i]))
        throw InputError("validate_dataset: Poisson response at row " +
                         std::to_string(i) + " is not a nonnegative integer");
    }
    ds.offsets = table.offsets;
  } else if (!table.offsets.empty()) {
    throw InputError("validate_dataset: offsets supplied for a Gaussian response");
  }

  return ds;
}

std::vector<int> quintile_discretize(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n < 5) throw InputError("quintile_discretize: need at least 5 values");
  for (double v : values)
    if (!std::isfinite(v)) throw InputError("quintile_discretize: non-finite value");

  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());

  // empirical percentile with linear interpolation between order statistics
  auto percentile = [&](double q) {
    const double h = q * (n - 1);
    const int lo = static_cast<int>(std::floor(h));
    const int hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
  };
  const double b[4] = {percentile(0.2), percentile(0.4), percentile(0.6), percentile(0.8)};

  std::vector<int> codes(n);
  for (int i = 0; i < n; ++i) {
    int code = 0;
    for (int k = 0; k < 4; ++k)
      if (values[i] > b[k]) code = k + 1;  // boundary-equal values stay low
    codes[i] = code;
  }
  return codes;
}

}  // namespace spr
