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

#ifndef PAMEVO_EXPERIMENT_H_
#define PAMEVO_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pamevo/analysis.h"
#include "pamevo/config.h"
#include "pamevo/dag.h"

namespace pamevo {

// Version of the CSV column sets written by this library.
inline constexpr int kCsvSchemaVersion = 1;

struct RunSummary {
  std::int64_t samples = 0;
  double final_best_fitness = 0.0;
  ProgramGraph best_graph;
  std::int64_t evaluations = 0;
  std::int64_t fec_hits = 0;
  std::int64_t training_triggers = 0;
  std::int64_t predictor_queries = 0;
  double hill_climb_rate = 0.0;
  // best_fitness after the initial population (index 0) and each child.
  std::vector<double> best_curve;
};

// Runs one experiment and writes config.json, run_log.csv, best.graph,
// population.txt, summary.json and checkpoint/ under config.out_dir. With
// resume set, continues from checkpoint/ when one exists.
// stop_after >= 0 halts after that many samples (checkpoint included), as an
// interrupted run would.
RunSummary RunExperiment(const ExperimentConfig& config, bool resume = false,
                         std::int64_t stop_after = -1);

// First index whose value reaches threshold, or nullopt.
std::optional<std::int64_t> SamplesToThreshold(const std::vector<double>& curve,
                                               double threshold);

// Reads the best_fitness column of a run_log.csv, indexed by sample.
std::vector<double> ReadBestCurve(const std::string& run_log_path);

struct CheckpointStats {
  std::int64_t checkpoint = 0;
  int n = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double lower = 0.0;  // mean - 2 SE
  double upper = 0.0;  // mean + 2 SE
};

struct ThresholdStats {
  double threshold = 0.0;
  int n = 0;
  int reached = 0;
  // Median samples to reach the threshold; -1 with censored set when the
  // median run never reached it.
  double median_samples = -1.0;
  bool censored = true;
};

struct AggregateResult {
  std::vector<CheckpointStats> checkpoints;
  std::vector<ThresholdStats> thresholds;
};

// Mean and standard error (sample std / sqrt(n)); SE is 0 for n < 2.
void MeanAndStandardError(const std::vector<double>& values, double& mean,
                          double& se);

AggregateResult AggregateCurves(const std::vector<std::vector<double>>& curves,
                                const std::vector<std::int64_t>& checkpoints,
                                const std::vector<double>& thresholds);

// Aggregates run directories. Throws std::invalid_argument when fewer than
// two runs are given or their configs differ beyond seed and out_dir.
AggregateResult AggregateRuns(const std::vector<std::string>& run_dirs,
                              const std::vector<std::int64_t>& checkpoints,
                              const std::vector<double>& thresholds);

void WriteAggregateCsv(const AggregateResult& result, const std::string& path);
void WriteThresholdStatsCsv(const AggregateResult& result,
                            const std::string& path);

struct AblationRow {
  std::uint64_t seed = 0;
  double binary_accuracy = 0.0;
  double regression_accuracy = 0.0;
};

struct AblationOptions {
  std::int64_t dataset_size = 10000;
  double train_fraction = 0.8;
  int epochs = 1000;
  std::vector<std::uint64_t> training_seeds = {0, 1, 2};
};

// Dataset of vanilla-evolution children (graph, fitness).
std::vector<ReplayRecord> CollectVanillaDataset(const ExperimentConfig& config,
                                                std::int64_t size);

// Trains a binary and a regression head per seed on the same split and
// reports held-out pair accuracy. Writes ablation.csv into config.out_dir.
std::vector<AblationRow> AblatePredictor(const ExperimentConfig& config,
                                         const AblationOptions& options);

struct SweepRow {
  std::string arm;  // "vanilla" or "a=<accuracy>"
  double accuracy = 0.0;
  std::uint64_t seed = 0;
  double final_best_fitness = 0.0;
};

// PAM-RT with noisy oracles for each accuracy plus a vanilla baseline, one
// run directory per arm and seed under config.out_dir.
std::vector<SweepRow> OracleSweep(const ExperimentConfig& config,
                                  const std::vector<double>& accuracies,
                                  const std::vector<std::uint64_t>& seeds);

struct HillClimbRow {
  double q = 0.0;
  double a = 0.0;
  double p_accept = 0.0;
  double closed_form = 0.0;
  double monte_carlo = 0.0;
};

std::vector<HillClimbRow> HillClimbGrid(const std::vector<double>& qs,
                                        const std::vector<double>& as,
                                        std::int64_t max_attempts,
                                        std::int64_t trials,
                                        std::uint64_t seed);
void WriteHillClimbCsv(const std::vector<HillClimbRow>& rows,
                       const std::string& path);

// Runs the counterfactual experiment and writes counterfactual.csv,
// threshold_curve.csv and score_histogram.csv into config.out_dir.
CounterfactualResult RunCounterfactual(const ExperimentConfig& config,
                                       int fan_out = 64);

}  // namespace pamevo

#endif  // PAMEVO_EXPERIMENT_H_
