// Copyright 2026 The pamevo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pamevo/config.h"
#include "pamevo/csv.h"
#include "pamevo/experiment.h"

namespace {

using pamevo::ExperimentConfig;

struct ConfigFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> strategy;
  std::optional<std::string> task;
  std::optional<double> oracle_accuracy;
  std::optional<bool> fec;
  std::optional<std::string> predictor_mode;
  std::optional<std::int64_t> samples;
  std::optional<std::int64_t> checkpoint_every;

  void Register(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file")
        ->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "experiment seed");
    app->add_option("--out-dir", out_dir, "output directory");
    app->add_option("--strategy", strategy,
                    "vanilla | pam | pam-rt | max-pairwise");
    app->add_option("--task", task,
                    "nguyen2 | nguyen3 | nguyen5 | nguyen7 | nguyen12");
    app->add_option("--oracle-accuracy", oracle_accuracy,
                    "noisy oracle accuracy in [0.5, 1]; implies "
                    "--predictor-mode noisy-oracle unless given");
    app->add_option("--fec", fec, "functional equivalence caching (true|false)");
    app->add_option("--predictor-mode", predictor_mode,
                    "learned | noisy-oracle | perfect-oracle");
    app->add_option("--samples", samples, "total child samples");
    app->add_option("--checkpoint-every", checkpoint_every,
                    "checkpoint period in samples (0: end only)");
  }

  ExperimentConfig Build() const {
    ExperimentConfig c;
    bool samples_given = false;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      const nlohmann::json j = nlohmann::json::parse(in);
      c = pamevo::ConfigFromJson(j);
      samples_given = j.contains("total_samples");
    }
    if (seed) c.seed = *seed;
    if (out_dir) c.out_dir = *out_dir;
    if (strategy) c.strategy.kind = pamevo::ParseStrategyName(*strategy);
    if (task) c.task = *task;
    if (oracle_accuracy) {
      c.oracle_accuracy = *oracle_accuracy;
      if (!predictor_mode) c.predictor_mode = pamevo::PredictorMode::kNoisyOracle;
    }
    if (fec) c.fec = *fec;
    if (predictor_mode) c.predictor_mode = pamevo::ParsePredictorMode(*predictor_mode);
    if (samples) c.total_samples = *samples;
    if (checkpoint_every) c.checkpoint_every = *checkpoint_every;
    if (!samples && !samples_given) {
      c.total_samples = pamevo::DefaultTotalSamples(pamevo::ParseTaskName(c.task));
    }
    if (auto err = pamevo::ValidateExperimentConfig(c)) {
      throw std::invalid_argument("invalid config: " + *err);
    }
    return c;
  }
};

int Main(int argc, char** argv) {
  CLI::App app{"Predictor-guided regularized evolution on symbolic regression"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  bool resume = false;
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  run_flags.Register(run);
  run->add_flag("--resume", resume, "continue from the run's checkpoint");

  std::vector<std::string> run_dirs;
  std::vector<std::int64_t> checkpoints = {1000, 5000, 10000, 20000};
  std::vector<double> thresholds = {0.9, 0.95, 0.99};
  std::string agg_out = "aggregate";
  CLI::App* agg = app.add_subcommand("aggregate", "summarize runs across seeds");
  agg->add_option("runs", run_dirs, "run directories")->required();
  agg->add_option("--checkpoints", checkpoints, "sample indices")->delimiter(',');
  agg->add_option("--thresholds", thresholds, "fitness thresholds")->delimiter(',');
  agg->add_option("--out-dir", agg_out, "output directory");

  ConfigFlags ablate_flags;
  pamevo::AblationOptions ablation;
  CLI::App* ablate = app.add_subcommand(
      "ablate-predictor", "binary vs regression heads on a fixed dataset");
  ablate_flags.Register(ablate);
  ablate->add_option("--dataset-size", ablation.dataset_size);
  ablate->add_option("--epochs", ablation.epochs);
  ablate->add_option("--training-seeds", ablation.training_seeds)->delimiter(',');

  ConfigFlags sweep_flags;
  std::vector<double> accuracies = {1.0, 0.8, 0.6};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  CLI::App* sweep = app.add_subcommand(
      "oracle-sweep", "PAM-RT with noisy oracles over an accuracy grid");
  sweep_flags.Register(sweep);
  sweep->add_option("--accuracies", accuracies)->delimiter(',');
  sweep->add_option("--seeds", seeds)->delimiter(',');

  std::vector<double> qs = {0.05, 0.1, 0.3, 0.5};
  std::vector<double> as = {0.6, 0.8, 1.0};
  std::int64_t max_attempts = 10000;
  std::int64_t trials = 1000000;
  std::uint64_t hc_seed = 0;
  std::string hc_out = "hillclimb";
  CLI::App* hc = app.add_subcommand(
      "hillclimb-check", "closed-form vs simulated modified hill-climb rate");
  hc->add_option("--q", qs, "natural rates")->delimiter(',');
  hc->add_option("--a", as, "model accuracies")->delimiter(',');
  hc->add_option("--max-attempts", max_attempts);
  hc->add_option("--trials", trials);
  hc->add_option("--seed", hc_seed);
  hc->add_option("--out-dir", hc_out);

  ConfigFlags cf_flags;
  int fan_out = 64;
  CLI::App* cf = app.add_subcommand(
      "counterfactual", "score unused children of a vanilla run");
  cf_flags.Register(cf);
  cf->add_option("--fan-out", fan_out);

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    const pamevo::RunSummary s = pamevo::RunExperiment(run_flags.Build(), resume);
    std::cout << "samples " << s.samples << " best_fitness "
              << pamevo::FormatDouble(s.final_best_fitness) << "\n";
  } else if (*agg) {
    const pamevo::AggregateResult r =
        pamevo::AggregateRuns(run_dirs, checkpoints, thresholds);
    std::filesystem::create_directories(agg_out);
    pamevo::WriteAggregateCsv(r, agg_out + "/aggregate.csv");
    pamevo::WriteThresholdStatsCsv(r, agg_out + "/samples_to_threshold.csv");
  } else if (*ablate) {
    for (const auto& row : pamevo::AblatePredictor(ablate_flags.Build(), ablation)) {
      std::cout << "seed " << row.seed << " binary "
                << pamevo::FormatDouble(row.binary_accuracy) << " regression "
                << pamevo::FormatDouble(row.regression_accuracy) << "\n";
    }
  } else if (*sweep) {
    pamevo::OracleSweep(sweep_flags.Build(), accuracies, seeds);
  } else if (*hc) {
    std::filesystem::create_directories(hc_out);
    pamevo::WriteHillClimbCsv(
        pamevo::HillClimbGrid(qs, as, max_attempts, trials, hc_seed),
        hc_out + "/hillclimb.csv");
  } else if (*cf) {
    const pamevo::CounterfactualResult r =
        pamevo::RunCounterfactual(cf_flags.Build(), fan_out);
    std::cout << "scores " << r.num_scores << " positives " << r.num_positives
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "pamevo: " << e.what() << "\n";
    return 2;
  }
}
