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

#include "pamevo/experiment.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pamevo/csv.h"
#include "pamevo/online.h"

namespace pamevo {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kRunLogColumns = {
    "schema_version", "sample_index",     "child_fitness",
    "parent_fitness", "best_fitness",     "attempts_used",
    "predictor_queries", "fec_hit",       "improved",
    "cumulative_hill_climb_rate", "structural_hash", "strategy_used",
    "trained"};

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void WriteStep(CsvWriter& csv, const StepRecord& r) {
  csv << kCsvSchemaVersion << r.sample_index << r.child_fitness
      << r.parent_fitness << r.best_fitness << r.attempts_used
      << r.predictor_queries << r.fec_hit << r.improved
      << r.cumulative_hill_climb_rate << r.structural_hash
      << StrategyName(r.strategy_used) << r.trained;
  csv.EndRow();
}

// Row 0 summarizes the initial population.
void WriteInitialRow(CsvWriter& csv, const OnlineExperiment& exp) {
  const double best = exp.best().fitness;
  csv << kCsvSchemaVersion << std::int64_t{0} << best << best << best << 0
      << std::int64_t{0} << false << false << 0.0
      << StructuralHash(exp.best().graph) << "initial" << false;
  csv.EndRow();
}

// Rewrites run_log.csv keeping rows up to and including sample `samples`.
void TruncateRunLog(const fs::path& path, std::int64_t samples) {
  const CsvTable table = ParseCsv(ReadFile(path));
  if (table.empty() || table[0] != kRunLogColumns) {
    throw std::runtime_error("unexpected run log header in " + path.string());
  }
  std::ostringstream out;
  CsvWriter csv(out);
  for (size_t i = 0; i < table.size(); ++i) {
    if (i > 0 && std::stoll(table[i][1]) > samples) break;
    csv.Row(table[i]);
  }
  WriteFile(path, out.str());
}

void WriteArtifacts(const OnlineExperiment& exp, const fs::path& dir) {
  WriteFile(dir / "best.graph", Serialize(exp.best().graph));
  std::ostringstream pop;
  for (const Candidate& c : exp.population().members()) {
    pop << "# fitness " << FormatDouble(c.fitness) << " sample "
        << c.sample_index << " expr " << ToExpression(c.graph) << "\n"
        << Serialize(c.graph);
  }
  WriteFile(dir / "population.txt", pop.str());
}

RunSummary Summarize(const OnlineExperiment& exp) {
  RunSummary s;
  s.samples = exp.samples();
  s.final_best_fitness = exp.best().fitness;
  s.best_graph = exp.best().graph;
  s.evaluations = exp.evaluations();
  s.fec_hits = exp.fec_hits();
  s.training_triggers = exp.training_triggers();
  s.predictor_queries = exp.total_predictor_queries();
  s.hill_climb_rate =
      s.samples ? static_cast<double>(exp.improvements()) / s.samples : 0.0;
  return s;
}

json SummaryJson(const RunSummary& s) {
  json j;
  j["samples"] = s.samples;
  j["final_best_fitness"] = s.final_best_fitness;
  j["best_expression"] = ToExpression(s.best_graph);
  j["evaluations"] = s.evaluations;
  j["fec_hits"] = s.fec_hits;
  j["training_triggers"] = s.training_triggers;
  j["predictor_queries"] = s.predictor_queries;
  j["hill_climb_rate"] = s.hill_climb_rate;
  return j;
}

ExperimentConfig WithOutDir(ExperimentConfig c, const fs::path& dir) {
  c.out_dir = dir.string();
  return c;
}

}  // namespace

RunSummary RunExperiment(const ExperimentConfig& config, bool resume,
                         std::int64_t stop_after) {
  if (auto err = ValidateExperimentConfig(config)) {
    throw std::invalid_argument(*err);
  }
  const fs::path dir(config.out_dir);
  const fs::path ckpt = dir / "checkpoint";
  const fs::path log_path = dir / "run_log.csv";
  fs::create_directories(dir);

  std::unique_ptr<OnlineExperiment> exp;
  if (resume && fs::exists(ckpt / "state.json") && fs::exists(log_path)) {
    exp = OnlineExperiment::LoadCheckpoint(ckpt.string());
    if (!SameExperiment(exp->config(), config) ||
        exp->config().seed != config.seed) {
      throw std::invalid_argument("checkpoint in " + ckpt.string() +
                                  " belongs to a different experiment");
    }
    TruncateRunLog(log_path, exp->samples());
  } else {
    exp = std::make_unique<OnlineExperiment>(config);
    WriteFile(dir / "config.json", ToJson(config).dump(2) + "\n");
    std::ofstream out(log_path, std::ios::binary | std::ios::trunc);
    CsvWriter csv(out);
    csv.Row(kRunLogColumns);
    WriteInitialRow(csv, *exp);
  }

  std::ofstream out(log_path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + log_path.string());
  CsvWriter csv(out);
  while (!exp->Done()) {
    if (stop_after >= 0 && exp->samples() >= stop_after) break;
    WriteStep(csv, exp->Step());
    if (config.checkpoint_every > 0 &&
        exp->samples() % config.checkpoint_every == 0) {
      out.flush();
      exp->SaveCheckpoint(ckpt.string());
    }
  }
  out.flush();
  exp->SaveCheckpoint(ckpt.string());
  WriteArtifacts(*exp, dir);

  RunSummary summary = Summarize(*exp);
  WriteFile(dir / "summary.json", SummaryJson(summary).dump(2) + "\n");
  out.close();
  summary.best_curve = ReadBestCurve(log_path.string());
  return summary;
}

std::optional<std::int64_t> SamplesToThreshold(const std::vector<double>& curve,
                                               double threshold) {
  for (size_t i = 0; i < curve.size(); ++i) {
    if (curve[i] >= threshold) return static_cast<std::int64_t>(i);
  }
  return std::nullopt;
}

std::vector<double> ReadBestCurve(const std::string& run_log_path) {
  const CsvTable table = ParseCsv(ReadFile(run_log_path));
  if (table.empty()) throw std::runtime_error("empty run log " + run_log_path);
  const auto& header = table[0];
  const auto best_col = std::find(header.begin(), header.end(), "best_fitness");
  const auto index_col = std::find(header.begin(), header.end(), "sample_index");
  if (best_col == header.end() || index_col == header.end()) {
    throw std::runtime_error("run log lacks best_fitness: " + run_log_path);
  }
  const size_t b = best_col - header.begin();
  const size_t k = index_col - header.begin();
  std::vector<double> curve;
  for (size_t i = 1; i < table.size(); ++i) {
    if (std::stoll(table[i].at(k)) != static_cast<std::int64_t>(curve.size())) {
      throw std::runtime_error("non-sequential sample_index in " + run_log_path);
    }
    curve.push_back(std::stod(table[i].at(b)));
  }
  return curve;
}

void MeanAndStandardError(const std::vector<double>& values, double& mean,
                          double& se) {
  mean = 0.0;
  se = 0.0;
  if (values.empty()) return;
  const double n = static_cast<double>(values.size());
  mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

AggregateResult AggregateCurves(const std::vector<std::vector<double>>& curves,
                                const std::vector<std::int64_t>& checkpoints,
                                const std::vector<double>& thresholds) {
  AggregateResult result;
  for (std::int64_t c : checkpoints) {
    if (c < 0) throw std::invalid_argument("negative checkpoint");
    std::vector<double> values;
    for (const auto& curve : curves) {
      if (curve.empty()) throw std::invalid_argument("empty curve");
      const size_t i = std::min(static_cast<size_t>(c), curve.size() - 1);
      values.push_back(curve[i]);
    }
    CheckpointStats s;
    s.checkpoint = c;
    s.n = static_cast<int>(values.size());
    MeanAndStandardError(values, s.mean, s.standard_error);
    s.lower = s.mean - 2.0 * s.standard_error;
    s.upper = s.mean + 2.0 * s.standard_error;
    result.checkpoints.push_back(s);
  }
  for (double t : thresholds) {
    ThresholdStats s;
    s.threshold = t;
    s.n = static_cast<int>(curves.size());
    // Censored runs sort last as +inf.
    std::vector<double> hits;
    for (const auto& curve : curves) {
      const auto hit = SamplesToThreshold(curve, t);
      if (hit) ++s.reached;
      hits.push_back(hit ? static_cast<double>(*hit)
                         : std::numeric_limits<double>::infinity());
    }
    std::sort(hits.begin(), hits.end());
    if (!hits.empty()) {
      const size_t mid = hits.size() / 2;
      const double median = hits.size() % 2
                                ? hits[mid]
                                : 0.5 * (hits[mid - 1] + hits[mid]);
      if (std::isfinite(median)) {
        s.median_samples = median;
        s.censored = false;
      }
    }
    result.thresholds.push_back(s);
  }
  return result;
}

AggregateResult AggregateRuns(const std::vector<std::string>& run_dirs,
                              const std::vector<std::int64_t>& checkpoints,
                              const std::vector<double>& thresholds) {
  if (run_dirs.size() < 2) {
    throw std::invalid_argument("aggregate needs at least two runs");
  }
  std::optional<ExperimentConfig> reference;
  std::vector<std::vector<double>> curves;
  for (const std::string& d : run_dirs) {
    const fs::path dir(d);
    const ExperimentConfig c = LoadConfigFile((dir / "config.json").string());
    if (!reference) {
      reference = c;
    } else if (!SameExperiment(*reference, c)) {
      throw std::invalid_argument("config of " + d + " differs from " +
                                  run_dirs.front() +
                                  " beyond seed and out_dir");
    }
    curves.push_back(ReadBestCurve((dir / "run_log.csv").string()));
  }
  return AggregateCurves(curves, checkpoints, thresholds);
}

void WriteAggregateCsv(const AggregateResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  CsvWriter csv(out);
  csv.Row({"schema_version", "checkpoint", "n", "mean_best_fitness",
           "standard_error", "band_lower", "band_upper"});
  for (const CheckpointStats& s : result.checkpoints) {
    csv << kCsvSchemaVersion << s.checkpoint << s.n << s.mean
        << s.standard_error << s.lower << s.upper;
    csv.EndRow();
  }
}

void WriteThresholdStatsCsv(const AggregateResult& result,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  CsvWriter csv(out);
  csv.Row({"schema_version", "threshold", "n", "reached",
           "median_samples_to_threshold", "censored"});
  for (const ThresholdStats& s : result.thresholds) {
    csv << kCsvSchemaVersion << s.threshold << s.n << s.reached
        << s.median_samples << s.censored;
    csv.EndRow();
  }
}

std::vector<ReplayRecord> CollectVanillaDataset(const ExperimentConfig& config,
                                                std::int64_t size) {
  ExperimentConfig c = config;
  c.strategy.kind = StrategyKind::kVanilla;
  c.predictor_mode = PredictorMode::kPerfectOracle;
  c.total_samples = size;
  OnlineExperiment exp(c);
  std::vector<ReplayRecord> data;
  data.reserve(static_cast<size_t>(size));
  while (!exp.Done()) {
    const StepRecord r = exp.Step();
    data.push_back({exp.last_outcome().child, r.child_fitness});
  }
  return data;
}

std::vector<AblationRow> AblatePredictor(const ExperimentConfig& config,
                                         const AblationOptions& options) {
  if (auto err = ValidateExperimentConfig(config)) {
    throw std::invalid_argument(*err);
  }
  if (options.train_fraction <= 0.0 || options.train_fraction >= 1.0) {
    throw std::invalid_argument("train_fraction must be in (0, 1)");
  }
  std::vector<ReplayRecord> data =
      CollectVanillaDataset(config, options.dataset_size);
  Rng split_rng(DeriveSeed(config.seed, 31));
  std::shuffle(data.begin(), data.end(), split_rng);
  const size_t n_train =
      static_cast<size_t>(options.train_fraction * data.size());
  const std::span<const ReplayRecord> train(data.data(), n_train);
  const std::span<const ReplayRecord> test(data.data() + n_train,
                                           data.size() - n_train);
  const std::vector<LabeledPair> test_pairs = MakeEpochPairs(test, split_rng);

  std::vector<AblationRow> rows;
  for (std::uint64_t seed : options.training_seeds) {
    AblationRow row;
    row.seed = seed;
    for (HeadKind head : {HeadKind::kBinary, HeadKind::kRegression}) {
      Rng rng(DeriveSeed(seed, 3));
      PredictorModel model = PredictorModel::Initialized(config.encoder, head, rng);
      AdamState adam;
      if (head == HeadKind::kBinary) {
        TrainBinaryEpochs(model, adam, config.optimizer, train, options.epochs,
                          config.schedule.batch_size, rng);
        row.binary_accuracy = PairAccuracy(model, test_pairs);
      } else {
        TrainRegressionEpochs(model, adam, config.optimizer, train,
                              options.epochs, config.schedule.batch_size, rng);
        row.regression_accuracy = PairAccuracy(model, test_pairs);
      }
    }
    rows.push_back(row);
  }

  fs::create_directories(config.out_dir);
  std::ofstream out(fs::path(config.out_dir) / "ablation.csv",
                    std::ios::binary | std::ios::trunc);
  CsvWriter csv(out);
  csv.Row({"schema_version", "training_seed", "binary_pair_accuracy",
           "regression_pair_accuracy", "train_size", "test_pairs"});
  for (const AblationRow& r : rows) {
    csv << kCsvSchemaVersion << r.seed << r.binary_accuracy
        << r.regression_accuracy << static_cast<std::int64_t>(train.size())
        << static_cast<std::int64_t>(test_pairs.size());
    csv.EndRow();
  }
  return rows;
}

std::vector<SweepRow> OracleSweep(const ExperimentConfig& config,
                                  const std::vector<double>& accuracies,
                                  const std::vector<std::uint64_t>& seeds) {
  const fs::path root(config.out_dir);
  std::vector<SweepRow> rows;
  auto run_arm = [&](const std::string& arm, ExperimentConfig c, double a) {
    for (std::uint64_t seed : seeds) {
      c.seed = seed;
      const RunSummary s = RunExperiment(
          WithOutDir(c, root / arm / ("seed_" + std::to_string(seed))));
      rows.push_back({arm, a, seed, s.final_best_fitness});
    }
  };
  ExperimentConfig base = config;
  base.strategy.kind = StrategyKind::kVanilla;
  base.predictor_mode = PredictorMode::kPerfectOracle;
  run_arm("vanilla", base, 0.0);
  for (double a : accuracies) {
    ExperimentConfig c = config;
    c.strategy.kind = StrategyKind::kPamRt;
    c.predictor_mode = PredictorMode::kNoisyOracle;
    c.oracle_accuracy = a;
    run_arm("a=" + FormatDouble(a), c, a);
  }

  std::ofstream out(root / "oracle_sweep.csv", std::ios::binary | std::ios::trunc);
  CsvWriter csv(out);
  csv.Row({"schema_version", "arm", "oracle_accuracy", "seed",
           "final_best_fitness"});
  for (const SweepRow& r : rows) {
    csv << kCsvSchemaVersion << r.arm << r.accuracy << r.seed
        << r.final_best_fitness;
    csv.EndRow();
  }
  return rows;
}

std::vector<HillClimbRow> HillClimbGrid(const std::vector<double>& qs,
                                        const std::vector<double>& as,
                                        std::int64_t max_attempts,
                                        std::int64_t trials,
                                        std::uint64_t seed) {
  std::vector<HillClimbRow> rows;
  std::uint64_t cell = 0;
  for (double q : qs) {
    for (double a : as) {
      const HillClimbParams hp{q, a};
      Rng rng(DeriveSeed(seed, cell++));
      rows.push_back({q, a, AcceptProbability(hp), ModifiedRate(hp),
                      SimulateModifiedRate(hp, max_attempts, trials, rng)});
    }
  }
  return rows;
}

void WriteHillClimbCsv(const std::vector<HillClimbRow>& rows,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  CsvWriter csv(out);
  csv.Row({"schema_version", "q", "a", "p_accept", "modified_rate",
           "simulated_rate", "abs_error"});
  for (const HillClimbRow& r : rows) {
    csv << kCsvSchemaVersion << r.q << r.a << r.p_accept << r.closed_form
        << r.monte_carlo << std::abs(r.monte_carlo - r.closed_form);
    csv.EndRow();
  }
}

CounterfactualResult RunCounterfactual(const ExperimentConfig& config,
                                       int fan_out) {
  if (auto err = ValidateExperimentConfig(config)) {
    throw std::invalid_argument(*err);
  }
  CounterfactualResult result = CounterfactualRun(config, fan_out);
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "counterfactual.csv", std::ios::binary | std::ios::trunc);
    CsvWriter csv(out);
    csv.Row({"schema_version", "step", "candidate", "score", "fitness",
             "parent_fitness"});
    for (const CounterfactualRecord& r : result.records) {
      for (size_t i = 0; i < r.candidate_scores.size(); ++i) {
        csv << kCsvSchemaVersion << r.step << static_cast<std::int64_t>(i)
            << r.candidate_scores[i] << r.candidate_fitnesses[i]
            << r.parent_fitness;
        csv.EndRow();
      }
    }
  }
  std::ofstream curve(dir / "threshold_curve.csv", std::ios::binary | std::ios::trunc);
  WriteThresholdCsv(result.curve, curve);
  std::ofstream hist(dir / "score_histogram.csv", std::ios::binary | std::ios::trunc);
  WriteHistogramCsv(result.histogram, hist);
  return result;
}

}  // namespace pamevo
