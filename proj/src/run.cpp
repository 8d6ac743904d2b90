#include "spr/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "spr/csv.hpp"
#include "spr/errors.hpp"
#include "spr/synth.hpp"

namespace fs = std::filesystem;

namespace spr {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string chain_suffix(int chain, int n_chains) {
  return n_chains == 1 ? "" : "_chain" + std::to_string(chain);
}

Dataset load_dataset(RunConfig& config) {
  if (config.data_path.empty()) throw InputError("config: paths.data is required");
  if (config.adjacency_path.empty())
    throw InputError("config: paths.adjacency is required");
  RawTable raw = load_data_csv(config.data_path);
  if (config.quintile_covariates) {
    for (auto& col : raw.x_cols) {
      const auto codes = quintile_discretize(col);
      for (std::size_t i = 0; i < col.size(); ++i) col[i] = codes[i];
    }
  }
  const auto edges = load_edge_list(config.adjacency_path);
  auto graph = build_graph(static_cast<int>(raw.y.size()), edges);
  const auto isolated = graph.isolated_nodes();
  if (!isolated.empty())
    std::cerr << "warning: " << isolated.size()
              << " isolated area(s) in the adjacency graph; their spatial term is "
                 "pinned\n";
  std::vector<int> declared;
  if (config.declared_categories > 0)
    declared.assign(raw.x_cols.size(), config.declared_categories);
  Dataset data =
      validate_dataset(raw, std::move(graph), config.response_kind, declared);
  config.hyper.expand_dirichlet(data.n_categories, config.dirichlet_a);
  return data;
}

void write_trace_scalars(const std::string& path, const SampleTrace& trace) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  const int p = trace.records.empty() ? 0
                                      : static_cast<int>(trace.records[0].beta.size());
  out << "iteration,alpha,tau,tauY,n_clusters";
  for (int k = 0; k < p; ++k) out << ",beta_" << k;
  out << "\n";
  for (int it = 0; it < trace.n_retained(); ++it) {
    const auto& rec = trace.records[it];
    out << it << "," << fmt_double(rec.alpha) << "," << fmt_double(rec.tau) << ","
        << fmt_double(rec.tauY) << "," << rec.n_occupied;
    for (double b : rec.beta) out << "," << fmt_double(b);
    out << "\n";
  }
}

void write_allocations(const std::string& path, const SampleTrace& trace) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "iteration";
  for (int i = 0; i < trace.n_areas; ++i) out << ",area_" << i;
  out << "\n";
  for (int it = 0; it < trace.n_retained(); ++it) {
    out << it;
    for (int zi : trace.records[it].z) out << "," << zi;
    out << "\n";
  }
}

void write_trace_clusters(const std::string& path, const SampleTrace& trace) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "iteration,cluster,psi,theta";
  if (!trace.records.empty()) {
    const auto& phi0 = trace.records[0].phi[0].phi;
    for (std::size_t j = 0; j < phi0.size(); ++j)
      for (std::size_t k = 0; k < phi0[j].size(); ++k)
        out << ",phi_" << j << "_" << k;
  }
  out << "\n";
  for (int it = 0; it < trace.n_retained(); ++it) {
    const auto& rec = trace.records[it];
    for (std::size_t c = 0; c < rec.psi.size(); ++c) {
      out << it << "," << c << "," << fmt_double(rec.psi[c]) << ","
          << fmt_double(rec.theta[c]);
      for (const auto& phi_j : rec.phi[c].phi)
        for (double v : phi_j) out << "," << fmt_double(v);
      out << "\n";
    }
  }
}

void write_similarity(const std::string& path, const SimilarityMatrix& S,
                      int dense_limit) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  if (S.n <= dense_limit) {
    out << "# format=dense\n";
    for (int j = 0; j < S.n; ++j) out << (j == 0 ? "" : ",") << "area_" << j;
    out << "\n";
    for (int i = 0; i < S.n; ++i) {
      for (int j = 0; j < S.n; ++j) out << (j == 0 ? "" : ",") << fmt_double(S.at(i, j));
      out << "\n";
    }
  } else {
    out << "# format=upper_triangle\n";
    out << "i,j,s\n";
    for (int i = 0; i < S.n; ++i)
      for (int j = i; j < S.n; ++j)
        out << i << "," << j << "," << fmt_double(S.at(i, j)) << "\n";
  }
}

SimilarityMatrix read_similarity(const std::string& path) {
  const CsvTable table = read_csv(path);
  SimilarityMatrix S;
  if (table.header.size() == 3 && table.header[0] == "i") {
    int n = 0;
    for (const auto& row : table.rows)
      n = std::max(n, static_cast<int>(parse_double(row[1])) + 1);
    S.n = n;
    S.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto& row : table.rows) {
      const int i = static_cast<int>(parse_double(row[0]));
      const int j = static_cast<int>(parse_double(row[1]));
      const double v = parse_double(row[2]);
      S.at(i, j) = v;
      S.at(j, i) = v;
    }
  } else {
    const int n = static_cast<int>(table.header.size());
    S.n = n;
    S.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) S.at(i, j) = parse_double(table.rows[i][j]);
  }
  return S;
}

std::vector<std::vector<int>> read_allocations(const std::string& path) {
  const CsvTable table = read_csv(path);
  std::vector<std::vector<int>> out;
  out.reserve(table.rows.size());
  const int n = static_cast<int>(table.header.size()) - 1;
  for (const auto& row : table.rows) {
    std::vector<int> z(n);
    for (int i = 0; i < n; ++i) z[i] = static_cast<int>(parse_double(row[i + 1]));
    out.push_back(std::move(z));
  }
  return out;
}

void write_partition(const std::string& path, const Partition& partition) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "area,cluster\n";
  for (std::size_t i = 0; i < partition.labels.size(); ++i)
    out << i << "," << partition.labels[i] << "\n";
}

void write_cluster_summary(const std::string& path,
                           const std::vector<ClusterSummary>& summaries) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "cluster,n_members,mean_y,covariate,category,q025,q25,q50,q75,q975\n";
  for (const auto& s : summaries) {
    for (std::size_t j = 0; j < s.phi_quantiles.size(); ++j) {
      for (std::size_t k = 0; k < s.phi_quantiles[j].size(); ++k) {
        out << s.cluster << "," << s.n_members << "," << fmt_double(s.mean_y) << ","
            << j << "," << k;
        for (double q : s.phi_quantiles[j][k]) out << "," << fmt_double(q);
        out << "\n";
      }
    }
  }
}

void write_spatial_u(const std::string& path, const std::vector<double>& u_mean) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "area,u_mean\n";
  for (std::size_t i = 0; i < u_mean.size(); ++i)
    out << i << "," << fmt_double(u_mean[i]) << "\n";
}

void write_predictions(const std::string& path,
                       const std::vector<PredictionDraw>& draws) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "profile,iteration,draw\n";
  for (const auto& d : draws)
    out << d.profile << "," << d.iteration << "," << fmt_double(d.value) << "\n";
}

double potential_scale_reduction(const std::vector<std::vector<double>>& chains) {
  const int m = static_cast<int>(chains.size());
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t T = chains[0].size();
  double grand = 0.0;
  std::vector<double> mean(m, 0.0), var(m, 0.0);
  for (int c = 0; c < m; ++c) {
    for (double v : chains[c]) mean[c] += v;
    mean[c] /= static_cast<double>(T);
    for (double v : chains[c]) var[c] += (v - mean[c]) * (v - mean[c]);
    var[c] /= static_cast<double>(T - 1);
    grand += mean[c];
  }
  grand /= m;
  double B = 0.0, W = 0.0;
  for (int c = 0; c < m; ++c) {
    B += (mean[c] - grand) * (mean[c] - grand);
    W += var[c];
  }
  B *= static_cast<double>(T) / (m - 1);
  W /= m;
  if (W <= 0.0) return 1.0;
  const double Td = static_cast<double>(T);
  return std::sqrt(((Td - 1.0) / Td * W + B / Td) / W);
}

namespace {

SampleTrace pool_traces(const std::vector<SampleTrace>& traces) {
  SampleTrace pooled;
  pooled.n_areas = traces[0].n_areas;
  pooled.response_kind = traces[0].response_kind;
  pooled.spatial_enabled = traces[0].spatial_enabled;
  pooled.u_mean.assign(pooled.n_areas, 0.0);
  for (const auto& t : traces) {
    for (const auto& rec : t.records) pooled.records.push_back(rec);
    for (int i = 0; i < pooled.n_areas; ++i) pooled.u_mean[i] += t.u_mean[i];
  }
  for (double& v : pooled.u_mean) v /= static_cast<double>(traces.size());
  return pooled;
}

void write_diagnostics(const std::string& path, const std::vector<SampleTrace>& traces,
                       const std::vector<PredictionDraw>& draws, int n_profiles) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "name,value\n";
  const int m = static_cast<int>(traces.size());
  std::vector<std::vector<double>> alpha(m), tau(m), tauY(m);
  for (int c = 0; c < m; ++c) {
    double occ = 0.0;
    for (const auto& rec : traces[c].records) {
      occ += rec.n_occupied;
      alpha[c].push_back(rec.alpha);
      tau[c].push_back(rec.tau);
      tauY[c].push_back(rec.tauY);
    }
    occ /= std::max(1, traces[c].n_retained());
    out << "mean_occupied_chain" << c << "," << fmt_double(occ) << "\n";
  }
  if (m >= 2) {
    out << "psrf_alpha," << fmt_double(potential_scale_reduction(alpha)) << "\n";
    if (traces[0].spatial_enabled)
      out << "psrf_tau," << fmt_double(potential_scale_reduction(tau)) << "\n";
    if (traces[0].response_kind == ResponseKind::gaussian)
      out << "psrf_tauY," << fmt_double(potential_scale_reduction(tauY)) << "\n";
  }
  for (int pr = 0; pr < n_profiles; ++pr) {
    double mean = 0.0;
    long count = 0;
    for (const auto& d : draws)
      if (d.profile == pr) {
        mean += d.value;
        ++count;
      }
    if (count > 0)
      out << "predictive_mean_profile" << pr << "," << fmt_double(mean / count) << "\n";
  }
}

void run_postprocess(const RunConfig& config, const Dataset& data,
                     const std::vector<SampleTrace>& traces) {
  const fs::path dir(config.output_dir);
  const SampleTrace pooled = pool_traces(traces);

  const SimilarityMatrix S = similarity(pooled);
  write_similarity((dir / "similarity.csv").string(), S);

  std::vector<int> k_range;
  for (int k = config.k_min; k <= std::min(config.k_max, S.n - 1); ++k)
    k_range.push_back(k);
  Partition partition = pam(S, k_range);
  if (partition.degenerate)
    std::cerr << "warning: degenerate similarity matrix, single cluster reported\n";
  partition = relabel_by_response(partition, data.y);
  write_partition((dir / "partition.csv").string(), partition);

  const auto summaries = cluster_summaries(partition, pooled, data);
  write_cluster_summary((dir / "cluster_summary.csv").string(), summaries);

  write_spatial_u((dir / "spatial_u.csv").string(), pooled.u_mean);

  std::vector<PredictionDraw> draws;
  if (!config.profiles.empty()) {
    Rng rng(Rng::derive_seed(config.schedule.seed, 0x70726564));  // "pred" stream
    draws = predict(config.profiles, pooled, rng);
    write_predictions((dir / "predictions.csv").string(), draws);
  }
  write_diagnostics((dir / "diagnostics.csv").string(), traces, draws,
                    static_cast<int>(config.profiles.size()));
}

}  // namespace

void fit(const RunConfig& config_in) {
  RunConfig config = config_in;
  Dataset data = load_dataset(config);
  if (config.output_dir.empty())
    throw InputError("config: paths.output_dir is required");
  fs::create_directories(config.output_dir);
  {
    RunConfig resolved = config;
    resolved.data_path = fs::absolute(config.data_path).string();
    resolved.adjacency_path = fs::absolute(config.adjacency_path).string();
    resolved.output_dir = fs::absolute(config.output_dir).string();
    write_resolved_config((fs::path(config.output_dir) / "run_config.ini").string(),
                          resolved);
  }

  std::vector<SampleTrace> traces(config.n_chains);
  std::vector<std::exception_ptr> failures(config.n_chains);
  auto run_one = [&](int c) {
    try {
      Schedule schedule = config.schedule;
      schedule.seed = Rng::derive_seed(config.schedule.seed, static_cast<std::uint64_t>(c));
      traces[c] = run_chain(data, config.hyper, schedule, config.spatial_enabled);
    } catch (...) {
      failures[c] = std::current_exception();
    }
  };
  if (config.n_chains == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(config.n_chains);
    for (int c = 0; c < config.n_chains; ++c) workers.emplace_back(run_one, c);
    for (auto& w : workers) w.join();
  }
  for (int c = 0; c < config.n_chains; ++c)
    if (failures[c]) std::rethrow_exception(failures[c]);

  const fs::path dir(config.output_dir);
  for (int c = 0; c < config.n_chains; ++c) {
    const std::string suffix = chain_suffix(c, config.n_chains);
    write_trace_scalars((dir / ("trace_scalars" + suffix + ".csv")).string(), traces[c]);
    write_allocations((dir / ("allocations" + suffix + ".csv")).string(), traces[c]);
    write_trace_clusters((dir / ("trace_clusters" + suffix + ".csv")).string(),
                         traces[c]);
  }
  run_postprocess(config, data, traces);
}

void simulate(const SynthConfig& config) {
  const SynthData synth = generate(config.spec);
  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);
  write_data_csv((dir / "data.csv").string(), synth.dataset);
  write_edge_list((dir / "adjacency.txt").string(), synth.dataset.graph);
  std::ofstream truth(dir / "truth.csv");
  if (!truth) throw InputError("cannot write truth.csv");
  truth << "area,true_label,true_u\n";
  for (int i = 0; i < synth.dataset.n(); ++i)
    truth << i << "," << synth.true_labels[i] << "," << fmt_double(synth.true_u[i])
          << "\n";
}

SampleTrace load_trace(const std::string& output_dir, const RunConfig& persisted,
                       bool need_allocations) {
  const fs::path dir(output_dir);
  SampleTrace trace;
  trace.response_kind = persisted.response_kind;
  trace.spatial_enabled = persisted.spatial_enabled;
  for (int c = 0; c < persisted.n_chains; ++c) {
    const std::string suffix = chain_suffix(c, persisted.n_chains);
    const CsvTable scalars =
        read_csv((dir / ("trace_scalars" + suffix + ".csv")).string());
    const CsvTable clusters =
        read_csv((dir / ("trace_clusters" + suffix + ".csv")).string());
    std::vector<std::vector<int>> allocations;
    if (need_allocations)
      allocations = read_allocations((dir / ("allocations" + suffix + ".csv")).string());

    const int base = static_cast<int>(trace.records.size());
    const int T = scalars.n_rows();
    std::vector<int> beta_cols;
    for (std::size_t col = 0; col < scalars.header.size(); ++col)
      if (scalars.header[col].rfind("beta_", 0) == 0)
        beta_cols.push_back(static_cast<int>(col));
    for (int it = 0; it < T; ++it) {
      IterationRecord rec;
      rec.alpha = parse_double(scalars.rows[it][1]);
      rec.tau = parse_double(scalars.rows[it][2]);
      rec.tauY = parse_double(scalars.rows[it][3]);
      rec.n_occupied = static_cast<int>(parse_double(scalars.rows[it][4]));
      for (int col : beta_cols) rec.beta.push_back(parse_double(scalars.rows[it][col]));
      if (need_allocations) rec.z = allocations[it];
      trace.records.push_back(std::move(rec));
    }
    // phi layout from the header: phi_<j>_<k>
    std::vector<int> categories;
    for (std::size_t col = 4; col < clusters.header.size(); ++col) {
      const auto& name = clusters.header[col];
      const auto second = name.rfind('_');
      const int j = std::stoi(name.substr(4, second - 4));
      const int k = std::stoi(name.substr(second + 1));
      if (j >= static_cast<int>(categories.size())) categories.resize(j + 1, 0);
      categories[j] = std::max(categories[j], k + 1);
    }
    for (const auto& row : clusters.rows) {
      const int it = base + static_cast<int>(parse_double(row[0]));
      IterationRecord& rec = trace.records[it];
      rec.psi.push_back(parse_double(row[2]));
      rec.theta.push_back(parse_double(row[3]));
      ClusterCovariateParams params;
      std::size_t col = 4;
      for (int k_j : categories) {
        std::vector<double> phi_j(k_j);
        for (int k = 0; k < k_j; ++k) phi_j[k] = parse_double(row[col++]);
        params.phi.push_back(std::move(phi_j));
      }
      rec.phi.push_back(std::move(params));
    }
  }
  trace.n_areas = trace.records.empty() || trace.records[0].z.empty()
                      ? 0
                      : static_cast<int>(trace.records[0].z.size());
  return trace;
}

void predict_from_dir(const RunConfig& config) {
  if (config.output_dir.empty())
    throw InputError("predict: paths.output_dir is required");
  if (config.profiles.empty())
    throw InputError("predict: no [predict] profile entries in config");
  const fs::path dir(config.output_dir);
  const RunConfig persisted =
      parse_config((dir / "run_config.ini").string());
  SampleTrace trace = load_trace(config.output_dir, persisted, false);
  Rng rng(Rng::derive_seed(persisted.schedule.seed, 0x70726564));
  const auto draws = predict(config.profiles, trace, rng);
  write_predictions((dir / "predictions.csv").string(), draws);
}

void summarize_dir(const std::string& output_dir, int k_min, int k_max) {
  const fs::path dir(output_dir);
  RunConfig persisted = parse_config((dir / "run_config.ini").string());
  if (k_min > 0) persisted.k_min = k_min;
  if (k_max > 0) persisted.k_max = k_max;
  Dataset data = load_dataset(persisted);
  SampleTrace trace = load_trace(output_dir, persisted, true);
  {
    // keep the persisted posterior-mean spatial field
    const CsvTable spatial = read_csv((dir / "spatial_u.csv").string());
    trace.u_mean.resize(spatial.n_rows());
    for (int i = 0; i < spatial.n_rows(); ++i)
      trace.u_mean[i] = parse_double(spatial.rows[i][1]);
  }
  std::vector<SampleTrace> traces = {trace};
  RunConfig local = persisted;
  local.output_dir = output_dir;
  local.profiles.clear();  // predictions are refreshed by `predict`, not here
  run_postprocess(local, data, traces);
}

}  // namespace spr
