#include "spr/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "spr/errors.hpp"

namespace spr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double dissim(const SimilarityMatrix& S, int i, int j) { return 1.0 - S.at(i, j); }
}  // namespace

SimilarityMatrix similarity(const std::vector<const std::vector<int>*>& allocations,
                            int n_areas) {
  if (allocations.empty()) throw InputError("similarity: empty allocation trace");
  SimilarityMatrix S;
  S.n = n_areas;
  S.values.assign(static_cast<std::size_t>(n_areas) * n_areas, 0.0);
  std::vector<std::vector<int>> groups;
  for (const auto* z : allocations) {
    if (static_cast<int>(z->size()) != n_areas)
      throw InputError("similarity: allocation snapshot has wrong length");
    int max_label = 0;
    for (int zi : *z) max_label = std::max(max_label, zi);
    groups.assign(max_label + 1, {});
    for (int i = 0; i < n_areas; ++i) groups[(*z)[i]].push_back(i);
    for (const auto& g : groups) {
      for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = a + 1; b < g.size(); ++b) {
          S.at(g[a], g[b]) += 1.0;
        }
    }
  }
  const double T = static_cast<double>(allocations.size());
  for (int i = 0; i < n_areas; ++i) {
    S.at(i, i) = 1.0;
    for (int j = i + 1; j < n_areas; ++j) {
      const double v = S.at(i, j) / T;
      S.at(i, j) = v;
      S.at(j, i) = v;
    }
  }
  return S;
}

SimilarityMatrix similarity(const SampleTrace& trace) {
  std::vector<const std::vector<int>*> allocations;
  allocations.reserve(trace.records.size());
  for (const auto& rec : trace.records) allocations.push_back(&rec.z);
  return similarity(allocations, trace.n_areas);
}

PamResult pam_fixed_k(const SimilarityMatrix& S, int k) {
  const int n = S.n;
  if (k < 1 || k > n) throw InputError("pam: k out of range");

  std::vector<int> medoids;
  std::vector<char> is_medoid(n, 0);

  // BUILD: first medoid minimises total dissimilarity, the rest greedily
  // maximise the decrease.
  {
    int best = 0;
    double best_total = kInf;
    for (int i = 0; i < n; ++i) {
      double total = 0.0;
      for (int j = 0; j < n; ++j) total += dissim(S, j, i);
      if (total < best_total) {
        best_total = total;
        best = i;
      }
    }
    medoids.push_back(best);
    is_medoid[best] = 1;
  }
  std::vector<double> nearest(n);
  for (int j = 0; j < n; ++j) nearest[j] = dissim(S, j, medoids[0]);
  while (static_cast<int>(medoids.size()) < k) {
    int best = -1;
    double best_gain = -kInf;
    for (int h = 0; h < n; ++h) {
      if (is_medoid[h]) continue;
      double gain = 0.0;
      for (int j = 0; j < n; ++j) gain += std::max(0.0, nearest[j] - dissim(S, j, h));
      if (gain > best_gain) {
        best_gain = gain;
        best = h;
      }
    }
    medoids.push_back(best);
    is_medoid[best] = 1;
    for (int j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], dissim(S, j, best));
  }

  // SWAP: exchange (medoid, non-medoid) pairs while the objective drops.
  auto recompute_nearest = [&](std::vector<double>& d1, std::vector<double>& d2,
                               std::vector<int>& who) {
    for (int j = 0; j < n; ++j) {
      d1[j] = kInf;
      d2[j] = kInf;
      who[j] = -1;
      for (std::size_t m = 0; m < medoids.size(); ++m) {
        const double d = dissim(S, j, medoids[m]);
        if (d < d1[j]) {
          d2[j] = d1[j];
          d1[j] = d;
          who[j] = static_cast<int>(m);
        } else if (d < d2[j]) {
          d2[j] = d;
        }
      }
    }
  };
  std::vector<double> d1(n), d2(n);
  std::vector<int> who(n);
  recompute_nearest(d1, d2, who);
  double build_objective = 0.0;
  for (int j = 0; j < n; ++j) build_objective += d1[j];
  for (int pass = 0; pass < 1000; ++pass) {
    double best_delta = -1e-12;
    int best_m = -1, best_h = -1;
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      for (int h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        double delta = 0.0;
        for (int j = 0; j < n; ++j) {
          const double djh = dissim(S, j, h);
          if (who[j] == static_cast<int>(m)) {
            delta += std::min(djh, d2[j]) - d1[j];
          } else {
            delta += std::min(0.0, djh - d1[j]);
          }
        }
        if (delta < best_delta) {
          best_delta = delta;
          best_m = static_cast<int>(m);
          best_h = h;
        }
      }
    }
    if (best_m < 0) break;
    is_medoid[medoids[best_m]] = 0;
    medoids[best_m] = best_h;
    is_medoid[best_h] = 1;
    recompute_nearest(d1, d2, who);
  }

  PamResult result;
  result.build_objective = build_objective;
  result.partition.k = k;
  result.partition.medoids = medoids;
  result.partition.labels.resize(n);
  result.objective = 0.0;
  for (int j = 0; j < n; ++j) {
    result.partition.labels[j] = who[j];
    result.objective += d1[j];
  }
  // medoids belong to their own cluster by construction (distance 0 may tie;
  // force it for determinism)
  for (std::size_t m = 0; m < medoids.size(); ++m)
    result.partition.labels[medoids[m]] = static_cast<int>(m);
  result.avg_silhouette = average_silhouette(S, result.partition.labels, k);
  return result;
}

double average_silhouette(const SimilarityMatrix& S, const std::vector<int>& labels,
                          int k) {
  const int n = S.n;
  std::vector<int> sizes(k, 0);
  for (int l : labels) ++sizes[l];
  double total = 0.0;
  std::vector<double> sum_d(k);
  for (int i = 0; i < n; ++i) {
    std::fill(sum_d.begin(), sum_d.end(), 0.0);
    for (int j = 0; j < n; ++j)
      if (j != i) sum_d[labels[j]] += dissim(S, i, j);
    const int own = labels[i];
    if (sizes[own] <= 1) continue;  // silhouette of a singleton is 0
    const double a = sum_d[own] / (sizes[own] - 1);
    double b = kInf;
    for (int c = 0; c < k; ++c) {
      if (c == own || sizes[c] == 0) continue;
      b = std::min(b, sum_d[c] / sizes[c]);
    }
    if (b == kInf) continue;
    total += (b - a) / std::max(a, b);
  }
  return total / n;
}

Partition pam(const SimilarityMatrix& S, const std::vector<int>& k_range) {
  bool all_zero = true;
  for (int i = 0; i < S.n && all_zero; ++i)
    for (int j = i + 1; j < S.n; ++j)
      if (dissim(S, i, j) > 0.0) {
        all_zero = false;
        break;
      }
  if (all_zero) {
    Partition p;
    p.k = 1;
    p.labels.assign(S.n, 0);
    p.medoids = {0};
    p.degenerate = true;
    return p;
  }
  Partition best;
  double best_sil = -kInf;
  for (int k : k_range) {
    if (k < 2 || k > S.n - 1)
      throw InputError("pam: k=" + std::to_string(k) + " outside [2, n-1]");
    PamResult r = pam_fixed_k(S, k);
    if (r.avg_silhouette > best_sil) {
      best_sil = r.avg_silhouette;
      best = r.partition;
    }
  }
  return best;
}

Partition relabel_by_response(const Partition& partition, const std::vector<double>& y) {
  const int k = partition.k;
  std::vector<double> sum(k, 0.0);
  std::vector<int> count(k, 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    sum[partition.labels[i]] += y[i];
    ++count[partition.labels[i]];
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = count[a] > 0 ? sum[a] / count[a] : kInf;
    const double mb = count[b] > 0 ? sum[b] / count[b] : kInf;
    return ma < mb;
  });
  std::vector<int> new_label(k);
  for (int r = 0; r < k; ++r) new_label[order[r]] = r;
  Partition out = partition;
  for (int& l : out.labels) l = new_label[l];
  out.medoids.assign(k, -1);
  for (int r = 0; r < k; ++r) out.medoids[new_label[r]] = partition.medoids[r];
  return out;
}

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const int n = static_cast<int>(values.size());
  const double h = q * (n - 1);
  const int lo = static_cast<int>(std::floor(h));
  const int hi = std::min(lo + 1, n - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

std::vector<ClusterSummary> cluster_summaries(const Partition& partition,
                                              const SampleTrace& trace,
                                              const Dataset& data) {
  const int n = data.n();
  const int k = partition.k;
  const int J = data.n_covariates();

  std::vector<ClusterSummary> out(k);
  for (int c = 0; c < k; ++c) {
    out[c].cluster = c;
    out[c].phi_quantiles.resize(J);
    for (int j = 0; j < J; ++j)
      out[c].phi_quantiles[j].resize(data.n_categories[j]);
  }
  for (int i = 0; i < n; ++i) {
    ++out[partition.labels[i]].n_members;
    out[partition.labels[i]].mean_y += data.y[i];
  }
  for (int c = 0; c < k; ++c)
    if (out[c].n_members > 0) out[c].mean_y /= out[c].n_members;

  // accumulate phi samples per representative cluster via maximum-overlap
  // matching of each iteration's occupied clusters
  std::vector<std::vector<std::vector<std::vector<double>>>> samples(k);
  for (int c = 0; c < k; ++c) {
    samples[c].resize(J);
    for (int j = 0; j < J; ++j)
      samples[c][j].resize(data.n_categories[j]);
  }
  std::vector<int> overlap(k);
  for (const auto& rec : trace.records) {
    const int C = static_cast<int>(rec.psi.size());
    std::vector<std::vector<int>> members(C);
    for (int i = 0; i < n; ++i) members[rec.z[i]].push_back(i);
    for (int t = 0; t < C; ++t) {
      if (members[t].empty()) continue;
      std::fill(overlap.begin(), overlap.end(), 0);
      for (int i : members[t]) ++overlap[partition.labels[i]];
      const int rep = static_cast<int>(
          std::max_element(overlap.begin(), overlap.end()) - overlap.begin());
      for (int j = 0; j < J; ++j)
        for (int kk = 0; kk < data.n_categories[j]; ++kk)
          samples[rep][j][kk].push_back(rec.phi[t].phi[j][kk]);
    }
  }
  constexpr double qs[5] = {0.025, 0.25, 0.5, 0.75, 0.975};
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < J; ++j) {
      for (int kk = 0; kk < data.n_categories[j]; ++kk) {
        auto& vals = samples[c][j][kk];
        for (int q = 0; q < 5; ++q)
          out[c].phi_quantiles[j][kk][q] =
              vals.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : quantile_type7(vals, qs[q]);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ClusterSummary& a, const ClusterSummary& b) {
                     return a.mean_y < b.mean_y;
                   });
  return out;
}

namespace {

std::vector<double> profile_log_weights(const PseudoProfile& profile,
                                        const IterationRecord& rec) {
  const int C = static_cast<int>(rec.psi.size());
  std::vector<double> logw(C);
  for (int c = 0; c < C; ++c) {
    double lw = std::log(rec.psi[c]);
    for (std::size_t j = 0; j < profile.codes.size(); ++j) {
      if (!profile.codes[j].has_value()) continue;
      const int code = *profile.codes[j];
      const auto& phi_j = rec.phi[c].phi[j];
      if (code < 0 || code >= static_cast<int>(phi_j.size()))
        throw InputError("predict: profile code out of range");
      lw += phi_j[code] > 0.0 ? std::log(phi_j[code]) : -kInf;
    }
    logw[c] = lw;
  }
  return logw;
}

}  // namespace

std::vector<PredictionDraw> predict(const std::vector<PseudoProfile>& profiles,
                                    const SampleTrace& trace, Rng& rng) {
  std::vector<PredictionDraw> out;
  out.reserve(profiles.size() * trace.records.size());
  for (std::size_t pr = 0; pr < profiles.size(); ++pr) {
    const auto& profile = profiles[pr];
    for (int it = 0; it < trace.n_retained(); ++it) {
      const auto& rec = trace.records[it];
      const auto logw = profile_log_weights(profile, rec);
      int c;
      try {
        c = rng.categorical_logits(logw);
      } catch (const std::runtime_error&) {
        throw NumericalError("predict: profile " + std::to_string(pr) +
                             " has zero weight in every cluster");
      }
      double beta_term = 0.0;
      for (std::size_t kk = 0; kk < profile.fixed_effects.size(); ++kk) {
        if (kk >= rec.beta.size())
          throw InputError("predict: profile fixed effects exceed model dimension");
        beta_term += rec.beta[kk] * profile.fixed_effects[kk];
      }
      const double lp = rec.theta[c] + beta_term + profile.spatial_offset;
      double value;
      if (trace.response_kind == ResponseKind::gaussian) {
        value = rng.normal(lp, std::sqrt(1.0 / rec.tauY));
      } else {
        value = static_cast<double>(rng.poisson(profile.expected_offset * std::exp(lp)));
      }
      out.push_back({static_cast<int>(pr), it, c, value});
    }
  }
  return out;
}

std::vector<double> cluster_selection_probs(const PseudoProfile& profile,
                                            const SampleTrace& trace) {
  std::size_t max_c = 0;
  for (const auto& rec : trace.records) max_c = std::max(max_c, rec.psi.size());
  std::vector<double> probs(max_c, 0.0);
  for (const auto& rec : trace.records) {
    const auto logw = profile_log_weights(profile, rec);
    double max_lw = -kInf;
    for (double lw : logw) max_lw = std::max(max_lw, lw);
    double total = 0.0;
    std::vector<double> w(logw.size());
    for (std::size_t c = 0; c < logw.size(); ++c) {
      w[c] = std::exp(logw[c] - max_lw);
      total += w[c];
    }
    for (std::size_t c = 0; c < logw.size(); ++c) probs[c] += w[c] / total;
  }
  for (double& p : probs) p /= static_cast<double>(trace.records.size());
  return probs;
}

}  // namespace spr
