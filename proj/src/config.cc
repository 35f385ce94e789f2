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

#include "pamevo/config.h"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pamevo {

using nlohmann::json;

std::string_view PredictorModeName(PredictorMode mode) {
  switch (mode) {
    case PredictorMode::kLearned: return "learned";
    case PredictorMode::kNoisyOracle: return "noisy-oracle";
    case PredictorMode::kPerfectOracle: return "perfect-oracle";
  }
  return "unknown";
}

PredictorMode ParsePredictorMode(std::string_view name) {
  std::string key(name);
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  for (PredictorMode m : {PredictorMode::kLearned, PredictorMode::kNoisyOracle,
                          PredictorMode::kPerfectOracle}) {
    if (key == PredictorModeName(m)) return m;
  }
  throw std::invalid_argument("unknown predictor mode \"" + std::string(name) +
                              "\"");
}

std::int64_t DefaultTotalSamples(TaskId task) {
  return task == TaskId::kNguyen12 ? 100000 : 20000;
}

std::optional<std::string> ValidateExperimentConfig(const ExperimentConfig& c) {
  try {
    ParseTaskName(c.task);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  if (auto err = ValidateStrategyConfig(c.strategy)) return err;
  if (c.population_size < 1) return "population_size must be >= 1";
  if (c.tournament_size < 1) return "tournament_size must be >= 1";
  if (c.total_samples < 0) return "total_samples must be >= 0";
  if (!(c.oracle_accuracy >= 0.5 && c.oracle_accuracy <= 1.0)) {
    return "oracle_accuracy must be in [0.5, 1]";
  }
  if (auto err = ValidateConfig(c.encoder)) return err;
  if (c.schedule.frequency < 1) return "schedule.frequency must be >= 1";
  if (c.schedule.epochs_per_trigger < 1) return "schedule.epochs must be >= 1";
  if (c.schedule.min_data < 0) return "schedule.min_data must be >= 0";
  if (c.schedule.batch_size < 1) return "schedule.batch_size must be >= 1";
  if (c.replay_capacity < 1) return "replay_capacity must be >= 1";
  if (!(c.optimizer.learning_rate > 0.0)) return "learning_rate must be > 0";
  if (c.checkpoint_every < 0) return "checkpoint_every must be >= 0";
  if (c.out_dir.empty()) return "out_dir must be set";
  return std::nullopt;
}

json ToJson(const ExperimentConfig& c) {
  json j;
  j["task"] = c.task;
  j["strategy"] = {
      {"kind", std::string(StrategyName(c.strategy.kind))},
      {"max_attempts", c.strategy.max_attempts},
      {"epsilon", c.strategy.epsilon},
      {"pairwise_list_size", c.strategy.pairwise_list_size},
  };
  j["population_size"] = c.population_size;
  j["tournament_size"] = c.tournament_size;
  j["total_samples"] = c.total_samples;
  j["seed"] = c.seed;
  j["fec"] = c.fec;
  j["predictor_mode"] = std::string(PredictorModeName(c.predictor_mode));
  j["oracle_accuracy"] = c.oracle_accuracy;
  j["encoder"] = {
      {"node_embed_dim", c.encoder.node_embed_dim},
      {"edge_embed_dim", c.encoder.edge_embed_dim},
      {"hidden_dim", c.encoder.hidden_dim},
      {"num_layers", c.encoder.num_layers},
      {"graph_dim", c.encoder.graph_dim},
  };
  j["schedule"] = {
      {"frequency", c.schedule.frequency},
      {"epochs_per_trigger", c.schedule.epochs_per_trigger},
      {"min_data", c.schedule.min_data},
      {"batch_size", c.schedule.batch_size},
  };
  j["optimizer"] = {
      {"learning_rate", c.optimizer.learning_rate},
      {"beta1", c.optimizer.beta1},
      {"beta2", c.optimizer.beta2},
      {"epsilon", c.optimizer.epsilon},
      {"weight_decay", c.optimizer.weight_decay},
  };
  j["replay_capacity"] = c.replay_capacity;
  j["checkpoint_every"] = c.checkpoint_every;
  j["out_dir"] = c.out_dir;
  return j;
}

namespace {

void RejectUnknown(const json& j, const std::set<std::string>& known,
                   const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw std::invalid_argument("unknown config key \"" + where + it.key() +
                                  "\"");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ConfigFromJson(const json& j) {
  ExperimentConfig c;
  RejectUnknown(j,
                {"task", "strategy", "population_size", "tournament_size",
                 "total_samples", "seed", "fec", "predictor_mode",
                 "oracle_accuracy", "encoder", "schedule", "optimizer",
                 "replay_capacity", "checkpoint_every", "out_dir"},
                "");
  Read(j, "task", c.task);
  if (j.contains("strategy")) {
    const json& s = j.at("strategy");
    RejectUnknown(s, {"kind", "max_attempts", "epsilon", "pairwise_list_size"},
                  "strategy.");
    if (s.contains("kind")) {
      c.strategy.kind = ParseStrategyName(s.at("kind").get<std::string>());
    }
    Read(s, "max_attempts", c.strategy.max_attempts);
    Read(s, "epsilon", c.strategy.epsilon);
    Read(s, "pairwise_list_size", c.strategy.pairwise_list_size);
  }
  Read(j, "population_size", c.population_size);
  Read(j, "tournament_size", c.tournament_size);
  Read(j, "total_samples", c.total_samples);
  Read(j, "seed", c.seed);
  Read(j, "fec", c.fec);
  if (j.contains("predictor_mode")) {
    c.predictor_mode =
        ParsePredictorMode(j.at("predictor_mode").get<std::string>());
  }
  Read(j, "oracle_accuracy", c.oracle_accuracy);
  if (j.contains("encoder")) {
    const json& e = j.at("encoder");
    RejectUnknown(e, {"node_embed_dim", "edge_embed_dim", "hidden_dim",
                      "num_layers", "graph_dim"},
                  "encoder.");
    Read(e, "node_embed_dim", c.encoder.node_embed_dim);
    Read(e, "edge_embed_dim", c.encoder.edge_embed_dim);
    Read(e, "hidden_dim", c.encoder.hidden_dim);
    Read(e, "num_layers", c.encoder.num_layers);
    Read(e, "graph_dim", c.encoder.graph_dim);
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    RejectUnknown(s, {"frequency", "epochs_per_trigger", "min_data", "batch_size"},
                  "schedule.");
    Read(s, "frequency", c.schedule.frequency);
    Read(s, "epochs_per_trigger", c.schedule.epochs_per_trigger);
    Read(s, "min_data", c.schedule.min_data);
    Read(s, "batch_size", c.schedule.batch_size);
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    RejectUnknown(o, {"learning_rate", "beta1", "beta2", "epsilon", "weight_decay"},
                  "optimizer.");
    Read(o, "learning_rate", c.optimizer.learning_rate);
    Read(o, "beta1", c.optimizer.beta1);
    Read(o, "beta2", c.optimizer.beta2);
    Read(o, "epsilon", c.optimizer.epsilon);
    Read(o, "weight_decay", c.optimizer.weight_decay);
  }
  Read(j, "replay_capacity", c.replay_capacity);
  Read(j, "checkpoint_every", c.checkpoint_every);
  Read(j, "out_dir", c.out_dir);
  return c;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  return ConfigFromJson(json::parse(in));
}

bool SameExperiment(const ExperimentConfig& a, const ExperimentConfig& b) {
  json ja = ToJson(a), jb = ToJson(b);
  for (json* j : {&ja, &jb}) {
    j->erase("seed");
    j->erase("out_dir");
  }
  return ja == jb;
}

}  // namespace pamevo
