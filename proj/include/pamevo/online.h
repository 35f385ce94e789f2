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

#ifndef PAMEVO_ONLINE_H_
#define PAMEVO_ONLINE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pamevo/config.h"
#include "pamevo/evolution.h"
#include "pamevo/predictor.h"
#include "pamevo/strategies.h"
#include "pamevo/symreg.h"
#include "pamevo/trainer.h"

namespace pamevo {

struct StepRecord {
  std::int64_t sample_index = 0;  // 1-based child count
  double child_fitness = 0.0;
  double parent_fitness = 0.0;
  double best_fitness = 0.0;
  int attempts_used = 0;
  std::int64_t predictor_queries = 0;
  bool fec_hit = false;
  bool improved = false;  // child strictly fitter than its parent
  bool accepted_by_model = false;
  double cumulative_hill_climb_rate = 0.0;
  std::uint64_t structural_hash = 0;
  StrategyKind strategy_used = StrategyKind::kVanilla;
  bool trained = false;  // a training trigger fired during this step
};

// Single-process online loop: regularized evolution whose mutations may be
// steered by a predictor that is retrained every `frequency` samples on a
// replay buffer of evaluated candidates.
//
// Random streams are split by role (evolution, strategy gate, training,
// oracle noise), so a run that never consults the predictor reproduces the
// plain regularized-evolution trajectory for the same seed.
class OnlineExperiment {
 public:
  explicit OnlineExperiment(const ExperimentConfig& config);
  OnlineExperiment(const OnlineExperiment&) = delete;
  OnlineExperiment& operator=(const OnlineExperiment&) = delete;

  const ExperimentConfig& config() const { return config_; }
  const SymRegTask& task() const { return *task_; }

  bool Done() const { return samples_ >= config_.total_samples; }
  StepRecord Step();

  std::int64_t samples() const { return samples_; }
  // Fitness computations that were not served by the cache.
  std::int64_t evaluations() const { return evaluations_; }
  std::int64_t fec_hits() const { return fec_hits_; }
  std::int64_t training_triggers() const { return training_triggers_; }
  std::int64_t skipped_train_steps() const { return skipped_train_steps_; }
  std::int64_t total_predictor_queries() const { return total_queries_; }
  std::int64_t improvements() const { return improvements_; }

  const PopulationBuffer& population() const { return population_; }
  const ReplayBuffer& replay() const { return replay_; }
  const FecCache& fec() const { return fec_; }
  const Candidate& best() const { return best_; }
  const PredictorModel& model() const { return model_; }
  const ModelSnapshot& snapshot() const { return *snapshot_; }
  // Structural hashes of the initial population in insertion order.
  const std::vector<std::uint64_t>& initial_hashes() const {
    return initial_hashes_;
  }
  // Outcome of the most recent Step().
  const StrategyOutcome& last_outcome() const { return last_outcome_; }

  // Directory with state.json, model.bin, adam_m.bin, adam_v.bin.
  void SaveCheckpoint(const std::string& dir) const;
  static std::unique_ptr<OnlineExperiment> LoadCheckpoint(
      const std::string& dir);

 private:
  void Train();
  void Record(const Candidate& c);
  PairScorer* scorer() const { return scorer_.get(); }

  ExperimentConfig config_;
  std::unique_ptr<SymRegTask> task_;
  Rng evo_rng_, gate_rng_, train_rng_;
  PopulationBuffer population_;
  ReplayBuffer replay_;
  FecCache fec_;
  PredictorModel model_;
  AdamState adam_;
  std::unique_ptr<ModelSnapshot> snapshot_;
  std::unique_ptr<PairScorer> scorer_;
  NoisyOracleScorer* oracle_ = nullptr;  // owned by scorer_ when in use
  std::map<StrategyKind, MutationStrategy> strategies_;
  Candidate best_;
  std::vector<std::uint64_t> initial_hashes_;
  StrategyOutcome last_outcome_;

  std::int64_t samples_ = 0;
  std::int64_t evaluations_ = 0;
  std::int64_t fec_hits_ = 0;
  std::int64_t training_triggers_ = 0;
  std::int64_t skipped_train_steps_ = 0;
  std::int64_t total_queries_ = 0;
  std::int64_t improvements_ = 0;
};

struct ExperimentLog {
  std::vector<std::uint64_t> initial_hashes;
  std::vector<double> initial_fitnesses;
  std::vector<StepRecord> steps;
  std::int64_t evaluations = 0;
  std::int64_t fec_hits = 0;
  std::int64_t training_triggers = 0;
};

// Runs a full experiment in memory.
ExperimentLog OnlineLoop(const ExperimentConfig& config);

}  // namespace pamevo

#endif  // PAMEVO_ONLINE_H_
