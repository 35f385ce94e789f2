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

#include "pamevo/online.h"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace pamevo {

namespace {

using nlohmann::json;

enum RngStream : std::uint64_t {
  kEvolutionStream = 1,
  kGateStream = 2,
  kTrainStream = 3,
  kOracleStream = 4,
};

json CandidateToJson(const Candidate& c) {
  json j;
  j["graph"] = Serialize(c.graph);
  j["fitness"] = c.fitness;
  j["parent_fitness"] = c.parent_fitness ? json(*c.parent_fitness) : json(nullptr);
  j["sample_index"] = c.sample_index;
  j["attempts_used"] = c.attempts_used;
  j["fec_hit"] = c.fec_hit;
  j["functional_hash"] = c.functional_hash;
  return j;
}

Candidate CandidateFromJson(const json& j) {
  Candidate c;
  c.graph = Deserialize(j.at("graph").get<std::string>());
  c.fitness = j.at("fitness").get<double>();
  if (!j.at("parent_fitness").is_null()) {
    c.parent_fitness = j.at("parent_fitness").get<double>();
  }
  c.sample_index = j.at("sample_index").get<std::int64_t>();
  c.attempts_used = j.at("attempts_used").get<int>();
  c.fec_hit = j.at("fec_hit").get<bool>();
  c.functional_hash = j.at("functional_hash").get<std::uint64_t>();
  return c;
}

void WriteVectorFile(const Eigen::VectorXd& v, const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  SaveVector(v, out);
}

Eigen::VectorXd ReadVectorFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return LoadVector(in);
}

ExperimentConfig Validated(const ExperimentConfig& config) {
  if (auto err = ValidateExperimentConfig(config)) {
    throw std::invalid_argument("invalid config: " + *err);
  }
  return config;
}

}  // namespace

OnlineExperiment::OnlineExperiment(const ExperimentConfig& config)
    : config_(Validated(config)),
      task_(std::make_unique<SymRegTask>(ParseTaskName(config.task),
                                         config.seed)),
      evo_rng_(DeriveSeed(config.seed, kEvolutionStream)),
      gate_rng_(DeriveSeed(config.seed, kGateStream)),
      train_rng_(DeriveSeed(config.seed, kTrainStream)),
      population_(config.population_size),
      replay_(config.replay_capacity),
      model_(PredictorModel::Initialized(config.encoder, HeadKind::kBinary,
                                         train_rng_)),
      snapshot_(std::make_unique<ModelSnapshot>()) {
  snapshot_->Publish(model_);

  const SymRegTask* task = task_.get();
  auto truth = [task](const ProgramGraph& g) { return Fitness(g, *task).fitness; };
  switch (config_.predictor_mode) {
    case PredictorMode::kLearned:
      scorer_ = std::make_unique<LearnedScorer>(snapshot_.get());
      break;
    case PredictorMode::kNoisyOracle:
    case PredictorMode::kPerfectOracle: {
      const double a = config_.predictor_mode == PredictorMode::kPerfectOracle
                           ? 1.0
                           : config_.oracle_accuracy;
      auto oracle = std::make_unique<NoisyOracleScorer>(
          truth, a, DeriveSeed(config_.seed, kOracleStream));
      oracle_ = oracle.get();
      scorer_ = std::move(oracle);
      break;
    }
  }

  for (StrategyKind kind : {StrategyKind::kVanilla, StrategyKind::kPam,
                            StrategyKind::kPamRt, StrategyKind::kMaxPairwise}) {
    strategies_[kind] = BindStrategy(kind, config_.strategy, scorer_.get(),
                                     MutateGraph, config_.tournament_size);
  }

  FecCache* fec = config_.fec ? &fec_ : nullptr;
  for (int i = 0; i < config_.population_size; ++i) {
    Candidate c = EvaluateCandidate(RandomGraph(*task_, evo_rng_), *task_, fec);
    Record(c);
    initial_hashes_.push_back(StructuralHash(c.graph));
    replay_.Push({c.graph, c.fitness});
    population_.Push(std::move(c));
  }
}

void OnlineExperiment::Record(const Candidate& c) {
  if (c.fec_hit) {
    ++fec_hits_;
  } else {
    ++evaluations_;
  }
  if (evaluations_ + fec_hits_ == 1 || c.fitness > best_.fitness) best_ = c;
}

void OnlineExperiment::Train() {
  ++training_triggers_;
  const TrainStats stats = TrainBinaryEpochs(
      model_, adam_, config_.optimizer, replay_,
      config_.schedule.epochs_per_trigger, config_.schedule.batch_size,
      train_rng_);
  skipped_train_steps_ += stats.skipped_steps;
  snapshot_->Publish(model_);
}

StepRecord OnlineExperiment::Step() {
  if (Done()) throw std::logic_error("experiment already finished");
  StepRecord rec;
  rec.strategy_used = SelectStrategy(config_.strategy, samples_,
                                     config_.schedule.min_data, gate_rng_);
  last_outcome_ = strategies_.at(rec.strategy_used)(population_, evo_rng_);

  Candidate child = EvaluateCandidate(last_outcome_.child, *task_,
                                      config_.fec ? &fec_ : nullptr);
  child.parent_fitness = last_outcome_.parent_fitness;
  child.attempts_used = last_outcome_.attempts_used;
  child.sample_index = samples_ + 1;

  if (config_.predictor_mode == PredictorMode::kLearned &&
      samples_ % config_.schedule.frequency == 0) {
    Train();
    rec.trained = true;
  }

  replay_.Push({child.graph, child.fitness});
  population_.Push(child);
  ++samples_;
  Record(child);

  rec.sample_index = child.sample_index;
  rec.child_fitness = child.fitness;
  rec.parent_fitness = last_outcome_.parent_fitness;
  rec.best_fitness = best_.fitness;
  rec.attempts_used = last_outcome_.attempts_used;
  rec.predictor_queries = last_outcome_.predictor_queries;
  rec.fec_hit = child.fec_hit;
  rec.improved = child.fitness > last_outcome_.parent_fitness;
  rec.accepted_by_model = last_outcome_.accepted_by_model;
  rec.structural_hash = StructuralHash(child.graph);
  total_queries_ += rec.predictor_queries;
  if (rec.improved) ++improvements_;
  rec.cumulative_hill_climb_rate =
      static_cast<double>(improvements_) / static_cast<double>(samples_);
  return rec;
}

void OnlineExperiment::SaveCheckpoint(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json j;
  j["version"] = 1;
  j["config"] = ToJson(config_);
  j["samples"] = samples_;
  j["evaluations"] = evaluations_;
  j["fec_hits"] = fec_hits_;
  j["training_triggers"] = training_triggers_;
  j["skipped_train_steps"] = skipped_train_steps_;
  j["total_queries"] = total_queries_;
  j["improvements"] = improvements_;
  j["rng"] = {
      {"evolution", SerializeRng(evo_rng_)},
      {"gate", SerializeRng(gate_rng_)},
      {"train", SerializeRng(train_rng_)},
      {"oracle", oracle_ ? json(SerializeRng(oracle_->rng())) : json(nullptr)},
  };
  j["best"] = CandidateToJson(best_);
  j["initial_hashes"] = initial_hashes_;
  json pop = json::array();
  for (const Candidate& c : population_.members()) pop.push_back(CandidateToJson(c));
  j["population"] = std::move(pop);
  json replay = json::array();
  for (const ReplayRecord& r : replay_.records()) {
    replay.push_back({{"graph", Serialize(r.graph)}, {"fitness", r.fitness}});
  }
  j["replay"] = std::move(replay);
  std::vector<std::pair<std::uint64_t, double>> table(fec_.table().begin(),
                                                      fec_.table().end());
  std::sort(table.begin(), table.end());
  j["fec"] = {{"hits", fec_.hits()}, {"misses", fec_.misses()}, {"table", table}};
  j["adam_step"] = adam_.step;

  const fs::path root(dir);
  // Write to a temporary name first so an interrupted save never leaves a
  // truncated state.json behind.
  {
    std::ofstream out(root / "state.json.tmp");
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("cannot write checkpoint state");
  }
  SaveModel(model_, (root / "model.bin").string());
  WriteVectorFile(adam_.m, root / "adam_m.bin");
  WriteVectorFile(adam_.v, root / "adam_v.bin");
  fs::rename(root / "state.json.tmp", root / "state.json");
}

std::unique_ptr<OnlineExperiment> OnlineExperiment::LoadCheckpoint(
    const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::ifstream in(root / "state.json");
  if (!in) throw std::runtime_error("no checkpoint in " + dir);
  const json j = json::parse(in);
  if (j.at("version").get<int>() != 1) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  auto exp = std::make_unique<OnlineExperiment>(ConfigFromJson(j.at("config")));
  OnlineExperiment& e = *exp;
  e.samples_ = j.at("samples").get<std::int64_t>();
  e.evaluations_ = j.at("evaluations").get<std::int64_t>();
  e.fec_hits_ = j.at("fec_hits").get<std::int64_t>();
  e.training_triggers_ = j.at("training_triggers").get<std::int64_t>();
  e.skipped_train_steps_ = j.at("skipped_train_steps").get<std::int64_t>();
  e.total_queries_ = j.at("total_queries").get<std::int64_t>();
  e.improvements_ = j.at("improvements").get<std::int64_t>();
  const json& rng = j.at("rng");
  e.evo_rng_ = DeserializeRng(rng.at("evolution").get<std::string>());
  e.gate_rng_ = DeserializeRng(rng.at("gate").get<std::string>());
  e.train_rng_ = DeserializeRng(rng.at("train").get<std::string>());
  if (e.oracle_ && !rng.at("oracle").is_null()) {
    e.oracle_->rng() = DeserializeRng(rng.at("oracle").get<std::string>());
  }
  e.best_ = CandidateFromJson(j.at("best"));
  e.initial_hashes_ = j.at("initial_hashes").get<std::vector<std::uint64_t>>();

  e.population_ = PopulationBuffer(e.config_.population_size);
  for (const json& c : j.at("population")) e.population_.Push(CandidateFromJson(c));
  e.replay_ = ReplayBuffer(e.config_.replay_capacity);
  for (const json& r : j.at("replay")) {
    e.replay_.Push({Deserialize(r.at("graph").get<std::string>()),
                    r.at("fitness").get<double>()});
  }
  const json& fec = j.at("fec");
  std::unordered_map<std::uint64_t, double> table;
  for (const auto& [key, fitness] :
       fec.at("table").get<std::vector<std::pair<std::uint64_t, double>>>()) {
    table.emplace(key, fitness);
  }
  e.fec_.Restore(std::move(table), fec.at("hits").get<std::int64_t>(),
                 fec.at("misses").get<std::int64_t>());

  PredictorModel model = LoadModel((root / "model.bin").string());
  if (!(model.config() == e.config_.encoder)) {
    throw std::runtime_error("checkpoint model does not match its config");
  }
  e.model_.set_params(model.params());
  e.adam_.m = ReadVectorFile(root / "adam_m.bin");
  e.adam_.v = ReadVectorFile(root / "adam_v.bin");
  e.adam_.step = j.at("adam_step").get<std::int64_t>();
  e.snapshot_->Publish(e.model_);
  return exp;
}

ExperimentLog OnlineLoop(const ExperimentConfig& config) {
  OnlineExperiment exp(config);
  ExperimentLog log;
  log.initial_hashes = exp.initial_hashes();
  for (const Candidate& c : exp.population().members()) {
    log.initial_fitnesses.push_back(c.fitness);
  }
  log.steps.reserve(static_cast<size_t>(config.total_samples));
  while (!exp.Done()) log.steps.push_back(exp.Step());
  log.evaluations = exp.evaluations();
  log.fec_hits = exp.fec_hits();
  log.training_triggers = exp.training_triggers();
  return log;
}

}  // namespace pamevo
