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

#include "pamevo/strategies.h"

#include <stdexcept>

namespace pamevo {

std::string_view StrategyName(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kVanilla: return "vanilla";
    case StrategyKind::kPam: return "pam";
    case StrategyKind::kPamRt: return "pam-rt";
    case StrategyKind::kMaxPairwise: return "max-pairwise";
  }
  return "unknown";
}

StrategyKind ParseStrategyName(std::string_view name) {
  std::string key(name);
  for (char& c : key) {
    if (c == '_') c = '-';
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  for (StrategyKind k : {StrategyKind::kVanilla, StrategyKind::kPam,
                         StrategyKind::kPamRt, StrategyKind::kMaxPairwise}) {
    if (key == StrategyName(k)) return k;
  }
  if (key == "pamrt") return StrategyKind::kPamRt;
  if (key == "maxpairwise") return StrategyKind::kMaxPairwise;
  throw std::invalid_argument("unknown strategy \"" + std::string(name) + "\"");
}

std::optional<std::string> ValidateStrategyConfig(const StrategyConfig& c) {
  if (c.max_attempts < 1) return "max_attempts must be >= 1";
  if (!(c.epsilon >= 0.0 && c.epsilon <= 1.0)) return "epsilon must be in [0, 1]";
  if (c.pairwise_list_size < 2) return "pairwise_list_size must be >= 2";
  return std::nullopt;
}

StrategyOutcome VanillaMutation(const PopulationBuffer& pop,
                                const Mutator& mutate, int tournament_size,
                                Rng& rng) {
  const Candidate& parent = TournamentSelect(pop, tournament_size, rng);
  StrategyOutcome out;
  out.child = mutate(parent.graph, rng);
  out.parent = parent.graph;
  out.parent_fitness = parent.fitness;
  out.attempts_used = 1;
  return out;
}

StrategyOutcome PamMutation(const PopulationBuffer& pop, PairScorer& scorer,
                            const Mutator& mutate, int tournament_size,
                            int max_attempts, Rng& rng) {
  const Candidate& parent = TournamentSelect(pop, tournament_size, rng);
  StrategyOutcome out;
  out.parent = parent.graph;
  out.parent_fitness = parent.fitness;
  out.attempts_used = 0;
  while (!out.accepted_by_model && out.attempts_used < max_attempts) {
    out.child = mutate(parent.graph, rng);
    out.accepted_by_model = scorer.Compare(out.child, parent.graph).Accepts();
    ++out.predictor_queries;
    ++out.attempts_used;
  }
  return out;
}

StrategyOutcome PamRtMutation(const PopulationBuffer& pop, PairScorer& scorer,
                              const Mutator& mutate, int tournament_size,
                              int max_attempts, Rng& rng) {
  StrategyOutcome out;
  out.attempts_used = 0;
  while (!out.accepted_by_model && out.attempts_used < max_attempts) {
    const Candidate& parent = TournamentSelect(pop, tournament_size, rng);
    out.child = mutate(parent.graph, rng);
    out.parent = parent.graph;
    out.parent_fitness = parent.fitness;
    out.accepted_by_model = scorer.Compare(out.child, parent.graph).Accepts();
    ++out.predictor_queries;
    ++out.attempts_used;
  }
  return out;
}

std::vector<int> PairwiseScores(
    const std::vector<std::vector<BinaryScore>>& table) {
  const size_t n = table.size();
  std::vector<int> score(n, 0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i != j) score[i] += table[i][j].Vote();
    }
  }
  return score;
}

StrategyOutcome MaxPairwiseMutation(const PopulationBuffer& pop,
                                    PairScorer& scorer, const Mutator& mutate,
                                    int tournament_size, int list_size,
                                    Rng& rng) {
  const Candidate& parent = TournamentSelect(pop, tournament_size, rng);
  std::vector<ProgramGraph> children;
  children.reserve(list_size);
  for (int i = 0; i < list_size; ++i) children.push_back(mutate(parent.graph, rng));

  const std::vector<int> score = PairwiseScores(scorer.CompareAll(children));
  size_t best = 0;
  for (size_t i = 1; i < score.size(); ++i) {
    if (score[i] > score[best]) best = i;
  }
  StrategyOutcome out;
  out.child = std::move(children[best]);
  out.parent = parent.graph;
  out.parent_fitness = parent.fitness;
  out.attempts_used = 1;
  out.accepted_by_model = true;
  out.predictor_queries =
      static_cast<std::int64_t>(list_size) * (list_size - 1);
  return out;
}

StrategyKind SelectStrategy(const StrategyConfig& config, std::int64_t samples,
                            std::int64_t min_data, Rng& gate_rng) {
  const bool explore = Bernoulli(gate_rng, config.epsilon);
  if (explore || samples < min_data) return StrategyKind::kVanilla;
  return config.kind;
}

MutationStrategy BindStrategy(StrategyKind kind, const StrategyConfig& config,
                              PairScorer* scorer, Mutator mutate,
                              int tournament_size) {
  if (kind != StrategyKind::kVanilla && scorer == nullptr) {
    throw std::invalid_argument("predictor strategy without a scorer");
  }
  switch (kind) {
    case StrategyKind::kVanilla:
      return [mutate, tournament_size](const PopulationBuffer& pop, Rng& rng) {
        return VanillaMutation(pop, mutate, tournament_size, rng);
      };
    case StrategyKind::kPam:
      return [=](const PopulationBuffer& pop, Rng& rng) {
        return PamMutation(pop, *scorer, mutate, tournament_size,
                           config.max_attempts, rng);
      };
    case StrategyKind::kPamRt:
      return [=](const PopulationBuffer& pop, Rng& rng) {
        return PamRtMutation(pop, *scorer, mutate, tournament_size,
                             config.max_attempts, rng);
      };
    case StrategyKind::kMaxPairwise:
      return [=](const PopulationBuffer& pop, Rng& rng) {
        return MaxPairwiseMutation(pop, *scorer, mutate, tournament_size,
                                   config.pairwise_list_size, rng);
      };
  }
  throw std::invalid_argument("unknown strategy kind");
}

}  // namespace pamevo
