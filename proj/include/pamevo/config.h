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

#ifndef PAMEVO_CONFIG_H_
#define PAMEVO_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pamevo/predictor.h"
#include "pamevo/strategies.h"
#include "pamevo/symreg.h"
#include "pamevo/trainer.h"

namespace pamevo {

enum class PredictorMode { kLearned, kNoisyOracle, kPerfectOracle };

std::string_view PredictorModeName(PredictorMode mode);
PredictorMode ParsePredictorMode(std::string_view name);

// Everything needed to reproduce one run. Defaults follow the Nguyen
// column of the reference hyperparameters.
struct ExperimentConfig {
  std::string task = "nguyen5";
  StrategyConfig strategy;
  int population_size = 100;
  int tournament_size = 25;
  std::int64_t total_samples = 20000;
  std::uint64_t seed = 0;
  bool fec = true;
  PredictorMode predictor_mode = PredictorMode::kLearned;
  double oracle_accuracy = 1.0;  // noisy oracle only
  EncoderConfig encoder;
  TrainSchedule schedule;
  AdamConfig optimizer;
  int replay_capacity = 10000;
  // 0 writes a checkpoint only at the end of the run.
  std::int64_t checkpoint_every = 0;
  std::string out_dir = "run";
};

// Default budget per task: 100k samples for the two-variable task, 20k
// otherwise.
std::int64_t DefaultTotalSamples(TaskId task);

std::optional<std::string> ValidateExperimentConfig(const ExperimentConfig& c);

nlohmann::json ToJson(const ExperimentConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig ConfigFromJson(const nlohmann::json& j);
ExperimentConfig LoadConfigFile(const std::string& path);

// True when the configs match on everything except seed and out_dir.
bool SameExperiment(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace pamevo

#endif  // PAMEVO_CONFIG_H_
