#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spr/config.hpp"
#include "spr/errors.hpp"
#include "spr/run.hpp"

namespace {

// single-line JSON error record on stderr, so batch drivers can parse
// failures without scraping free text
int report_failure(const std::string& kind, int code, const std::string& message) {
  nlohmann::json record;
  record["error"] = message;
  record["kind"] = kind;
  record["exit_code"] = code;
  std::cerr << record.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatial profile regression: joint clustering of a spatially "
               "correlated response and categorical covariate profiles"};
  app.require_subcommand(1);

  std::string fit_config, sim_config, pred_config, out_dir;
  int k_min = 0, k_max = 0;

  auto* fit_cmd = app.add_subcommand("fit", "run the MCMC and write all outputs");
  fit_cmd->add_option("config", fit_config, "run configuration file")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic dataset");
  sim_cmd->add_option("config", sim_config, "synthetic spec configuration file")
      ->required();

  auto* pred_cmd =
      app.add_subcommand("predict", "draw pseudo-profile predictions from a fit");
  pred_cmd->add_option("config", pred_config, "configuration with [predict] profiles")
      ->required();

  auto* sum_cmd =
      app.add_subcommand("summarize", "recompute post-processing for an output dir");
  sum_cmd->add_option("output_dir", out_dir, "directory written by fit")->required();
  sum_cmd->add_option("--k-min", k_min, "smallest cluster count to try");
  sum_cmd->add_option("--k-max", k_max, "largest cluster count to try");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) {
      spr::fit(spr::parse_config(fit_config));
    } else if (sim_cmd->parsed()) {
      spr::simulate(spr::parse_synth_config(sim_config));
    } else if (pred_cmd->parsed()) {
      spr::predict_from_dir(spr::parse_config(pred_config));
    } else if (sum_cmd->parsed()) {
      spr::summarize_dir(out_dir, k_min, k_max);
    }
  } catch (const spr::InputError& err) {
    return report_failure("input", 1, err.what());
  } catch (const spr::NumericalError& err) {
    return report_failure("numerical", 2, err.what());
  } catch (const std::exception& err) {
    return report_failure("input", 1, err.what());
  }
  return 0;
}
