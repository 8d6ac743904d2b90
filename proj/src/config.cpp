#include "spr/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "spr/csv.hpp"
#include "spr/errors.hpp"

namespace spr {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct ConfigEntry {
  std::string value;
  int line = 0;
};

struct ParsedFile {
  std::string name;
  std::map<std::string, ConfigEntry> entries;        // "section.key" -> value
  std::vector<std::pair<std::string, int>> profiles; // repeated [predict] profile keys

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = entries.find(key);
    const int line = it == entries.end() ? 0 : it->second.line;
    throw InputError(name + ":" + std::to_string(line) + ": " + msg);
  }

  bool has(const std::string& key) const { return entries.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second.value;
  }

  double get_real(const std::string& key, double fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    try {
      return parse_double(it->second.value);
    } catch (const InputError&) {
      fail(key, "expected a number for '" + key + "', got '" + it->second.value + "'");
    }
  }

  long get_int(const std::string& key, long fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    const std::string& v = it->second.value;
    long value{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc{} || ptr != v.data() + v.size())
      fail(key, "expected an integer for '" + key + "', got '" + v + "'");
    return value;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    const std::string& v = it->second.value;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, "expected true/false for '" + key + "', got '" + v + "'");
  }
};

ParsedFile parse_key_values(const std::string& text, const std::string& name,
                            const std::vector<std::string>& known_keys) {
  ParsedFile out;
  out.name = name;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (const auto pos = t.find('#'); pos != std::string::npos) t = trim(t.substr(0, pos));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw InputError(name + ":" + std::to_string(line_no) + ": malformed section");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError(name + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    if (full == "predict.profile") {
      out.profiles.emplace_back(value, line_no);
      continue;
    }
    bool known = false;
    for (const auto& k : known_keys)
      if (k == full) {
        known = true;
        break;
      }
    if (!known)
      throw InputError(name + ":" + std::to_string(line_no) + ": unknown key '" + full +
                       "'");
    out.entries[full] = {value, line_no};
  }
  return out;
}

const std::vector<std::string> kRunKeys = {
    "paths.data", "paths.adjacency", "paths.output_dir",
    "schedule.n_iter", "schedule.burn_in", "schedule.thin",
    "schedule.n_init_clusters", "schedule.seed", "schedule.n_chains",
    "schedule.u_thin",
    "model.response", "model.spatial", "model.quintile_covariates",
    "model.n_categories",
    "hyper.s_alpha", "hyper.r_alpha", "hyper.dirichlet_a", "hyper.mu_theta",
    "hyper.sigma_theta", "hyper.mu_beta", "hyper.sigma_beta", "hyper.s_tauY",
    "hyper.r_tauY", "hyper.a_tau", "hyper.b_tau", "hyper.t_df",
    "postprocess.k_min", "postprocess.k_max"};

}  // namespace

PseudoProfile parse_profile(const std::string& text) {
  PseudoProfile profile;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '@')) parts.push_back(trim(part));
  if (parts.empty()) throw InputError("empty pseudo-profile");
  std::stringstream codes(parts[0]);
  std::string cell;
  while (std::getline(codes, cell, ',')) {
    cell = trim(cell);
    if (cell == "NA") {
      profile.codes.push_back(std::nullopt);
    } else {
      long code{};
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), code);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || code < 0)
        throw InputError("pseudo-profile code '" + cell + "' is not NA or a code");
      profile.codes.push_back(static_cast<int>(code));
    }
  }
  if (profile.codes.empty()) throw InputError("pseudo-profile has no entries");
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos)
      throw InputError("pseudo-profile modifier '" + parts[i] + "' is not key=value");
    const std::string key = trim(parts[i].substr(0, eq));
    const double value = parse_double(trim(parts[i].substr(eq + 1)));
    if (key == "offset") {
      profile.spatial_offset = value;
    } else if (key == "E") {
      if (!(value > 0.0)) throw InputError("pseudo-profile E must be positive");
      profile.expected_offset = value;
    } else {
      throw InputError("unknown pseudo-profile modifier '" + key + "'");
    }
  }
  return profile;
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  const auto parsed = parse_key_values(text, name, kRunKeys);
  RunConfig config;
  config.data_path = parsed.get_string("paths.data", "");
  config.adjacency_path = parsed.get_string("paths.adjacency", "");
  config.output_dir = parsed.get_string("paths.output_dir", "");

  config.schedule.n_iter = parsed.get_int("schedule.n_iter", 10000);
  config.schedule.burn_in = parsed.get_int("schedule.burn_in", 5000);
  config.schedule.thin = static_cast<int>(parsed.get_int("schedule.thin", 1));
  config.schedule.n_init_clusters =
      static_cast<int>(parsed.get_int("schedule.n_init_clusters", 50));
  config.schedule.seed = static_cast<std::uint64_t>(parsed.get_int("schedule.seed", 1));
  config.schedule.u_thin = static_cast<int>(parsed.get_int("schedule.u_thin", 10));
  config.n_chains = static_cast<int>(parsed.get_int("schedule.n_chains", 1));

  config.response_kind =
      response_kind_from_string(parsed.get_string("model.response", "gaussian"));
  config.spatial_enabled = parsed.get_bool("model.spatial", true);
  config.quintile_covariates = parsed.get_bool("model.quintile_covariates", false);
  config.declared_categories =
      static_cast<int>(parsed.get_int("model.n_categories", 0));

  config.hyper.s_alpha = parsed.get_real("hyper.s_alpha", 2.0);
  config.hyper.r_alpha = parsed.get_real("hyper.r_alpha", 1.0);
  config.dirichlet_a = parsed.get_real("hyper.dirichlet_a", 1.0);
  config.hyper.mu_theta = parsed.get_real("hyper.mu_theta", 0.0);
  config.hyper.sigma_theta = parsed.get_real("hyper.sigma_theta", 2.5);
  config.hyper.mu_beta = parsed.get_real("hyper.mu_beta", 0.0);
  config.hyper.sigma_beta = parsed.get_real("hyper.sigma_beta", 2.5);
  config.hyper.s_tauY = parsed.get_real("hyper.s_tauY", 2.5);
  config.hyper.r_tauY = parsed.get_real("hyper.r_tauY", 2.5);
  config.hyper.a_tau = parsed.get_real("hyper.a_tau", 1.0);
  config.hyper.b_tau = parsed.get_real("hyper.b_tau", 1.0);
  config.hyper.t_df = parsed.get_real("hyper.t_df", 7.0);

  config.k_min = static_cast<int>(parsed.get_int("postprocess.k_min", 2));
  config.k_max = static_cast<int>(parsed.get_int("postprocess.k_max", 10));

  for (const auto& [value, line] : parsed.profiles) {
    try {
      config.profiles.push_back(parse_profile(value));
    } catch (const InputError& err) {
      throw InputError(name + ":" + std::to_string(line) + ": " + err.what());
    }
  }

  // cross-key invariants, reported against the offending key's line
  if (config.schedule.burn_in >= config.schedule.n_iter)
    parsed.fail(parsed.has("schedule.burn_in") ? "schedule.burn_in" : "schedule.n_iter",
                "burn_in must be smaller than n_iter");
  if (config.schedule.thin < 1) parsed.fail("schedule.thin", "thin must be >= 1");
  if (config.n_chains < 1) parsed.fail("schedule.n_chains", "n_chains must be >= 1");
  if (config.schedule.n_init_clusters < 2)
    parsed.fail("schedule.n_init_clusters", "n_init_clusters must be >= 2");
  if (config.schedule.u_thin < 1) parsed.fail("schedule.u_thin", "u_thin must be >= 1");
  if (!(config.dirichlet_a > 0.0))
    parsed.fail("hyper.dirichlet_a", "dirichlet_a must be positive");
  if (config.k_min < 2) parsed.fail("postprocess.k_min", "k_min must be >= 2");
  if (config.k_max < config.k_min)
    parsed.fail("postprocess.k_max", "k_max must be >= k_min");
  try {
    config.hyper.validate();
  } catch (const InputError& err) {
    throw InputError(name + ": " + err.what());
  }
  return config;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

SynthConfig parse_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::vector<std::string> keys = {
      "synth.n_areas", "synth.graph", "synth.k_true", "synth.separation",
      "synth.tau_true", "synth.response", "synth.seed", "synth.n_covariates",
      "synth.n_categories", "synth.noise_sd", "synth.poisson_offset",
      "paths.output_dir"};
  const auto parsed = parse_key_values(buffer.str(), path, keys);
  SynthConfig config;
  config.spec.n_areas = static_cast<int>(parsed.get_int("synth.n_areas", 200));
  config.spec.graph_kind =
      graph_kind_from_string(parsed.get_string("synth.graph", "grid"));
  config.spec.k_true = static_cast<int>(parsed.get_int("synth.k_true", 3));
  config.spec.separation = parsed.get_real("synth.separation", 2.0);
  config.spec.tau_true = parsed.get_real("synth.tau_true", 2.0);
  config.spec.response_kind =
      response_kind_from_string(parsed.get_string("synth.response", "gaussian"));
  config.spec.seed = static_cast<std::uint64_t>(parsed.get_int("synth.seed", 1));
  config.spec.n_covariates =
      static_cast<int>(parsed.get_int("synth.n_covariates", 6));
  config.spec.n_categories =
      static_cast<int>(parsed.get_int("synth.n_categories", 5));
  config.spec.noise_sd = parsed.get_real("synth.noise_sd", 1.0);
  config.spec.poisson_offset = parsed.get_real("synth.poisson_offset", 10.0);
  config.output_dir = parsed.get_string("paths.output_dir", "");
  if (config.output_dir.empty())
    throw InputError(path + ": paths.output_dir is required");
  return config;
}

void write_resolved_config(const std::string& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write config copy: " + path);
  out << "[paths]\n"
      << "data = " << config.data_path << "\n"
      << "adjacency = " << config.adjacency_path << "\n"
      << "output_dir = " << config.output_dir << "\n\n";
  out << "[schedule]\n"
      << "n_iter = " << config.schedule.n_iter << "\n"
      << "burn_in = " << config.schedule.burn_in << "\n"
      << "thin = " << config.schedule.thin << "\n"
      << "n_init_clusters = " << config.schedule.n_init_clusters << "\n"
      << "seed = " << config.schedule.seed << "\n"
      << "u_thin = " << config.schedule.u_thin << "\n"
      << "n_chains = " << config.n_chains << "\n\n";
  out << "[model]\n"
      << "response = " << to_string(config.response_kind) << "\n"
      << "spatial = " << (config.spatial_enabled ? "true" : "false") << "\n"
      << "quintile_covariates = " << (config.quintile_covariates ? "true" : "false")
      << "\n";
  if (config.declared_categories > 0)
    out << "n_categories = " << config.declared_categories << "\n";
  out << "\n[hyper]\n";
  out.precision(17);
  out << "s_alpha = " << config.hyper.s_alpha << "\n"
      << "r_alpha = " << config.hyper.r_alpha << "\n"
      << "dirichlet_a = " << config.dirichlet_a << "\n"
      << "mu_theta = " << config.hyper.mu_theta << "\n"
      << "sigma_theta = " << config.hyper.sigma_theta << "\n"
      << "mu_beta = " << config.hyper.mu_beta << "\n"
      << "sigma_beta = " << config.hyper.sigma_beta << "\n"
      << "s_tauY = " << config.hyper.s_tauY << "\n"
      << "r_tauY = " << config.hyper.r_tauY << "\n"
      << "a_tau = " << config.hyper.a_tau << "\n"
      << "b_tau = " << config.hyper.b_tau << "\n"
      << "t_df = " << config.hyper.t_df << "\n\n";
  out << "[postprocess]\n"
      << "k_min = " << config.k_min << "\n"
      << "k_max = " << config.k_max << "\n";
  if (!config.profiles.empty()) {
    out << "\n[predict]\n";
    for (const auto& profile : config.profiles) {
      out << "profile = ";
      for (std::size_t j = 0; j < profile.codes.size(); ++j) {
        if (j > 0) out << ",";
        if (profile.codes[j].has_value())
          out << *profile.codes[j];
        else
          out << "NA";
      }
      if (profile.spatial_offset != 0.0) out << " @ offset=" << profile.spatial_offset;
      if (profile.expected_offset != 1.0) out << " @ E=" << profile.expected_offset;
      out << "\n";
    }
  }
}

}  // namespace spr
