#include "spr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spr/dist.hpp"
#include "spr/errors.hpp"
#include "spr/response_model.hpp"
#include "spr/spatial.hpp"

namespace spr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

int categorical_probs(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u <= acc) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

double log_sum_exp(std::span<const double> values) {
  double m = -kInf;
  for (double v : values) m = std::max(m, v);
  if (!std::isfinite(m)) return -kInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

NeighborhoodGraph make_graph(GraphKind kind, int n, Rng& rng) {
  switch (kind) {
    case GraphKind::path:
      return path_graph(n);
    case GraphKind::grid: {
      int rows = static_cast<int>(std::sqrt(static_cast<double>(n)));
      while (rows > 1 && n % rows != 0) --rows;
      return grid_graph(rows, n / rows);
    }
    case GraphKind::random_planar: {
      // random points in the unit square: chain them left to right, then
      // add each node's two nearest points
      std::vector<std::pair<double, double>> pts(n);
      for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return pts[a].first < pts[b].first; });
      std::vector<std::pair<int, int>> edges;
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(order[i], order[i + 1]);
      for (int i = 0; i < n; ++i) {
        std::vector<std::pair<double, int>> dist;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          const double dx = pts[i].first - pts[j].first;
          const double dy = pts[i].second - pts[j].second;
          dist.emplace_back(dx * dx + dy * dy, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + std::min<std::size_t>(2, dist.size()),
                          dist.end());
        for (std::size_t t = 0; t < std::min<std::size_t>(2, dist.size()); ++t)
          edges.emplace_back(std::min(i, dist[t].second), std::max(i, dist[t].second));
      }
      return build_graph(n, edges);
    }
  }
  throw InputError("unknown graph kind");
}

}  // namespace

GraphKind graph_kind_from_string(const std::string& s) {
  if (s == "grid") return GraphKind::grid;
  if (s == "path") return GraphKind::path;
  if (s == "random-planar" || s == "random_planar") return GraphKind::random_planar;
  throw InputError("unknown graph kind '" + s + "'");
}

SynthData generate(const SynthSpec& spec) {
  if (spec.k_true < 1) throw InputError("generate: k_true must be >= 1");
  if (!(spec.tau_true > 0.0)) throw InputError("generate: tau_true must be positive");
  if (spec.separation < 0.0) throw InputError("generate: separation must be >= 0");
  Rng rng(spec.seed);
  const int n = spec.n_areas;
  const int J = spec.n_covariates;
  const int K = spec.n_categories;

  SynthData out;
  out.dataset.graph = make_graph(spec.graph_kind, n, rng);
  out.dataset.response_kind = spec.response_kind;
  out.dataset.n_categories.assign(J, K);

  // balanced allocations, shuffled
  out.true_labels.resize(n);
  for (int i = 0; i < n; ++i) out.true_labels[i] = i % spec.k_true;
  for (int i = n - 1; i > 0; --i)
    std::swap(out.true_labels[i], out.true_labels[rng.uniform_int(i + 1)]);

  // covariate simplices: uniform at separation 0, Dirichlet concentrated on
  // a per-cluster modal category otherwise
  std::vector<std::vector<std::vector<double>>> phi(spec.k_true);
  for (int c = 0; c < spec.k_true; ++c) {
    phi[c].resize(J);
    for (int j = 0; j < J; ++j) {
      if (spec.separation == 0.0) {
        phi[c][j].assign(K, 1.0 / K);
      } else {
        std::vector<double> conc(K, 1.0);
        conc[(c + j) % K] += 10.0 * spec.separation;
        phi[c][j] = rng.dirichlet(conc);
      }
    }
  }

  std::vector<double> theta(spec.k_true);
  for (int c = 0; c < spec.k_true; ++c)
    theta[c] = spec.separation * (c - 0.5 * (spec.k_true - 1));
  out.true_phi = phi;
  out.true_theta = theta;

  out.true_u = sample_icar_constrained(out.dataset.graph, spec.tau_true, rng);

  out.dataset.x.assign(n, std::vector<int>(J, 0));
  out.dataset.y.resize(n);
  if (spec.response_kind == ResponseKind::poisson)
    out.dataset.offsets.assign(n, spec.poisson_offset);
  for (int i = 0; i < n; ++i) {
    const int c = out.true_labels[i];
    for (int j = 0; j < J; ++j) out.dataset.x[i][j] = categorical_probs(phi[c][j], rng);
    const double lambda = theta[c] + out.true_u[i];
    if (spec.response_kind == ResponseKind::gaussian) {
      out.dataset.y[i] = lambda + spec.noise_sd * rng.normal();
    } else {
      out.dataset.y[i] =
          static_cast<double>(rng.poisson(spec.poisson_offset * std::exp(lambda)));
    }
  }
  return out;
}

EnumeratedPosterior enumerate_posterior(const Dataset& data,
                                        const Hyperparameters& hyper) {
  const int n = data.n();
  const int J = data.n_covariates();
  if (n > 4 || J > 2)
    throw InputError("enumerate_posterior: fixture too large (n <= 4, J <= 2)");
  if (data.n_fixed_effects() > 0)
    throw InputError("enumerate_posterior: fixed effects unsupported");

  // all set partitions via restricted growth strings
  std::vector<std::vector<int>> partitions;
  std::vector<int> labels(n, 0);
  auto recurse = [&](auto&& self, int i, int max_used) -> void {
    if (i == n) {
      partitions.push_back(labels);
      return;
    }
    for (int c = 0; c <= max_used + 1 && c < n; ++c) {
      labels[i] = c;
      self(self, i + 1, std::max(max_used, c));
    }
  };
  recurse(recurse, 0, -1);

  // prior over partitions: EPPF integrated over the Gamma prior on alpha
  std::vector<double> alpha_grid, alpha_logw;
  {
    const int G = 600;
    const double lo = std::log(1e-5), hi = std::log(hyper.s_alpha / hyper.r_alpha + 40.0 / hyper.r_alpha);
    for (int g = 0; g < G; ++g) {
      const double la = lo + (hi - lo) * g / (G - 1);
      const double a = std::exp(la);
      alpha_grid.push_back(a);
      // weight = density * alpha * dlog(alpha)
      alpha_logw.push_back(gamma_log_pdf(a, hyper.s_alpha, hyper.r_alpha) + la +
                           std::log((hi - lo) / (G - 1)));
    }
  }
  auto log_eppf_integrated = [&](const std::vector<int>& part) {
    int k = 0;
    std::vector<int> sizes(n, 0);
    for (int l : part) {
      if (sizes[l] == 0) ++k;
      ++sizes[l];
    }
    std::vector<double> terms;
    terms.reserve(alpha_grid.size());
    for (std::size_t g = 0; g < alpha_grid.size(); ++g) {
      const double a = alpha_grid[g];
      double lp = k * std::log(a);
      for (int s : sizes)
        if (s > 0) lp += std::lgamma(static_cast<double>(s));
      for (int t = 0; t < n; ++t) lp -= std::log(a + t);
      terms.push_back(alpha_logw[g] + lp);
    }
    return log_sum_exp(terms);
  };

  // closed-form Dirichlet-multinomial covariate marginal for one cluster
  auto log_cov_marginal = [&](const std::vector<int>& members) {
    double lp = 0.0;
    for (int j = 0; j < J; ++j) {
      const auto& aj = hyper.a[j];
      double asum = 0.0;
      for (double v : aj) asum += v;
      std::vector<int> counts(data.n_categories[j], 0);
      for (int i : members) ++counts[data.x[i][j]];
      lp += std::lgamma(asum) - std::lgamma(asum + members.size());
      for (int kk = 0; kk < data.n_categories[j]; ++kk)
        lp += std::lgamma(aj[kk] + counts[kk]) - std::lgamma(aj[kk]);
    }
    return lp;
  };

  // response marginal: theta integrated on a grid, tauY on a log grid
  const int TG = 1200;
  double ylo = *std::min_element(data.y.begin(), data.y.end());
  double yhi = *std::max_element(data.y.begin(), data.y.end());
  double tlo = std::min(hyper.mu_theta - 15.0 * hyper.sigma_theta, ylo - 10.0);
  double thi = std::max(hyper.mu_theta + 15.0 * hyper.sigma_theta, yhi + 10.0);
  if (data.response_kind == ResponseKind::poisson) {
    tlo = std::min(tlo, -20.0);
    thi = std::max(thi, std::log((yhi + 1.0) / data.offsets[0]) + 10.0);
  }
  const double dtheta = (thi - tlo) / (TG - 1);
  std::vector<double> theta_grid(TG), theta_logprior(TG);
  for (int g = 0; g < TG; ++g) {
    theta_grid[g] = tlo + g * dtheta;
    theta_logprior[g] = t_log_pdf(theta_grid[g], hyper.mu_theta, hyper.sigma_theta,
                                  hyper.t_df) + std::log(dtheta);
  }

  // enumerate nonempty subsets once; subset id = bitmask
  auto subset_members = [&](unsigned mask) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) members.push_back(i);
    return members;
  };

  const unsigned n_masks = 1u << n;
  std::vector<double> log_cov(n_masks, 0.0);
  for (unsigned mask = 1; mask < n_masks; ++mask)
    log_cov[mask] = log_cov_marginal(subset_members(mask));

  std::vector<double> log_resp_partition(partitions.size(), 0.0);
  if (data.response_kind == ResponseKind::gaussian) {
    const int TAUG = 400;
    const double llo = std::log(1e-4), lhi = std::log(std::max(
        200.0, 40.0 * hyper.s_tauY / hyper.r_tauY));
    std::vector<double> tau_grid(TAUG), tau_logw(TAUG);
    for (int g = 0; g < TAUG; ++g) {
      const double lt = llo + (lhi - llo) * g / (TAUG - 1);
      tau_grid[g] = std::exp(lt);
      tau_logw[g] = gamma_log_pdf(tau_grid[g], hyper.s_tauY, hyper.r_tauY) + lt +
                    std::log((lhi - llo) / (TAUG - 1));
    }
    // per (mask, tau) marginal over theta
    std::vector<std::vector<double>> log_m(n_masks, std::vector<double>(TAUG, 0.0));
    std::vector<double> terms(TG);
    for (unsigned mask = 1; mask < n_masks; ++mask) {
      const auto members = subset_members(mask);
      for (int g = 0; g < TAUG; ++g) {
        const double var = 1.0 / tau_grid[g];
        for (int t = 0; t < TG; ++t) {
          double ll = theta_logprior[t];
          for (int i : members) ll += normal_log_pdf(data.y[i], theta_grid[t], var);
          terms[t] = ll;
        }
        log_m[mask][g] = log_sum_exp(terms);
      }
    }
    for (std::size_t pi = 0; pi < partitions.size(); ++pi) {
      std::vector<unsigned> masks;
      std::vector<int> seen(n, 0);
      for (int l : partitions[pi]) {
        if (seen[l]) continue;
        seen[l] = 1;
        unsigned mask = 0;
        for (int i = 0; i < n; ++i)
          if (partitions[pi][i] == l) mask |= 1u << i;
        masks.push_back(mask);
      }
      std::vector<double> tau_terms(tau_grid.size());
      for (std::size_t g = 0; g < tau_grid.size(); ++g) {
        double lp = tau_logw[g];
        for (unsigned mask : masks) lp += log_m[mask][g];
        tau_terms[g] = lp;
      }
      log_resp_partition[pi] = log_sum_exp(tau_terms);
    }
  } else {
    std::vector<double> log_m(n_masks, 0.0);
    std::vector<double> terms(TG);
    for (unsigned mask = 1; mask < n_masks; ++mask) {
      const auto members = subset_members(mask);
      for (int t = 0; t < TG; ++t) {
        double ll = theta_logprior[t];
        for (int i : members)
          ll += poisson_log_likelihood(data.y[i], data.offsets[i], theta_grid[t]);
        terms[t] = ll;
      }
      log_m[mask] = log_sum_exp(terms);
    }
    for (std::size_t pi = 0; pi < partitions.size(); ++pi) {
      double lp = 0.0;
      std::vector<int> seen(n, 0);
      for (int l : partitions[pi]) {
        if (seen[l]) continue;
        seen[l] = 1;
        unsigned mask = 0;
        for (int i = 0; i < n; ++i)
          if (partitions[pi][i] == l) mask |= 1u << i;
        lp += log_m[mask];
      }
      log_resp_partition[pi] = lp;
    }
  }

  EnumeratedPosterior out;
  out.partitions = partitions;
  std::vector<double> log_post(partitions.size());
  for (std::size_t pi = 0; pi < partitions.size(); ++pi) {
    double lcov = 0.0;
    std::vector<int> seen(n, 0);
    for (int l : partitions[pi]) {
      if (seen[l]) continue;
      seen[l] = 1;
      unsigned mask = 0;
      for (int i = 0; i < n; ++i)
        if (partitions[pi][i] == l) mask |= 1u << i;
      lcov += log_cov[mask];
    }
    log_post[pi] = log_eppf_integrated(partitions[pi]) + lcov + log_resp_partition[pi];
  }
  const double norm = log_sum_exp(log_post);
  out.probabilities.resize(partitions.size());
  for (std::size_t pi = 0; pi < partitions.size(); ++pi)
    out.probabilities[pi] = std::exp(log_post[pi] - norm);

  out.coclustering.n = n;
  out.coclustering.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (std::size_t pi = 0; pi < partitions.size(); ++pi) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (partitions[pi][i] == partitions[pi][j])
          out.coclustering.at(i, j) += out.probabilities[pi];
  }
  return out;
}

MCMCState prior_draw_state(const Dataset& data, const Hyperparameters& hyper,
                           bool spatial_enabled, Rng& rng) {
  MCMCState state = init_state(data, hyper, 2, spatial_enabled, rng);
  std::vector<double> log_psi(state.psi.size());
  for (std::size_t c = 0; c < state.psi.size(); ++c)
    log_psi[c] = std::log(state.psi[c]);
  for (int i = 0; i < data.n(); ++i) state.z[i] = rng.categorical_logits(log_psi);
  if (spatial_enabled)
    state.spatial.u = sample_icar_constrained(data.graph, state.spatial.tau, rng);
  return state;
}

void regenerate_data(Dataset& data, const MCMCState& state, Rng& rng) {
  const int n = data.n();
  const int p = data.n_fixed_effects();
  for (int i = 0; i < n; ++i) {
    const int c = state.z[i];
    for (int j = 0; j < data.n_covariates(); ++j)
      data.x[i][j] = categorical_probs(state.phi[c].phi[j], rng);
    double lambda = state.theta[c] + state.spatial.u[i];
    for (int k = 0; k < p; ++k) lambda += state.globals.beta[k] * data.w[i][k];
    if (data.response_kind == ResponseKind::gaussian) {
      data.y[i] = lambda + std::sqrt(state.globals.sigmaY2) * rng.normal();
    } else {
      data.y[i] = static_cast<double>(rng.poisson(data.offsets[i] * std::exp(lambda)));
    }
  }
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw InputError("adjusted_rand_index: length mismatch");
  const int n = static_cast<int>(a.size());
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<std::vector<long>> table(ka, std::vector<long>(kb, 0));
  for (int i = 0; i < n; ++i) ++table[a[i]][b[i]];
  auto choose2 = [](long m) { return 0.5 * m * (m - 1); };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < ka; ++i) {
    long row = 0;
    for (int j = 0; j < kb; ++j) {
      sum_ij += choose2(table[i][j]);
      row += table[i][j];
    }
    sum_a += choose2(row);
  }
  for (int j = 0; j < kb; ++j) {
    long col = 0;
    for (int i = 0; i < ka; ++i) col += table[i][j];
    sum_b += choose2(col);
  }
  const double expected = sum_a * sum_b / choose2(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

std::vector<int> baseline_kmeans(const Dataset& data, int k, int n_restarts, Rng& rng) {
  const int n = data.n();
  const int J = data.n_covariates();
  int dim = 1;
  for (int j = 0; j < J; ++j) dim += data.n_categories[j];
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim, 0.0));
  double mean_y = 0.0, sd_y = 0.0;
  for (double v : data.y) mean_y += v;
  mean_y /= n;
  for (double v : data.y) sd_y += (v - mean_y) * (v - mean_y);
  sd_y = std::sqrt(sd_y / std::max(1, n - 1));
  if (sd_y == 0.0) sd_y = 1.0;
  for (int i = 0; i < n; ++i) {
    pts[i][0] = (data.y[i] - mean_y) / sd_y;
    int off = 1;
    for (int j = 0; j < J; ++j) {
      pts[i][off + data.x[i][j]] = 1.0;
      off += data.n_categories[j];
    }
  }
  std::vector<int> best_labels(n, 0);
  double best_wss = kInf;
  for (int r = 0; r < n_restarts; ++r) {
    std::vector<std::vector<double>> centers;
    std::vector<int> chosen;
    while (static_cast<int>(centers.size()) < k) {
      const int i = rng.uniform_int(n);
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      chosen.push_back(i);
      centers.push_back(pts[i]);
    }
    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        double best_d = kInf;
        int best_c = 0;
        for (int c = 0; c < k; ++c) {
          double d = 0.0;
          for (int t = 0; t < dim; ++t) {
            const double diff = pts[i][t] - centers[c][t];
            d += diff * diff;
          }
          if (d < best_d) {
            best_d = d;
            best_c = c;
          }
        }
        if (labels[i] != best_c) {
          labels[i] = best_c;
          changed = true;
        }
      }
      for (int c = 0; c < k; ++c) {
        std::fill(centers[c].begin(), centers[c].end(), 0.0);
        int count = 0;
        for (int i = 0; i < n; ++i) {
          if (labels[i] != c) continue;
          ++count;
          for (int t = 0; t < dim; ++t) centers[c][t] += pts[i][t];
        }
        if (count > 0)
          for (int t = 0; t < dim; ++t) centers[c][t] /= count;
      }
      if (!changed) break;
    }
    double wss = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < dim; ++t) {
        const double diff = pts[i][t] - centers[labels[i]][t];
        wss += diff * diff;
      }
    }
    if (wss < best_wss) {
      best_wss = wss;
      best_labels = labels;
    }
  }
  return best_labels;
}

}  // namespace spr
