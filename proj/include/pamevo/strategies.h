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

#ifndef PAMEVO_STRATEGIES_H_
#define PAMEVO_STRATEGIES_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "pamevo/evolution.h"
#include "pamevo/predictor.h"

namespace pamevo {

enum class StrategyKind { kVanilla, kPam, kPamRt, kMaxPairwise };

std::string_view StrategyName(StrategyKind kind);
// Accepts "vanilla", "pam", "pam-rt"/"pam_rt", "max-pairwise"/"max_pairwise".
StrategyKind ParseStrategyName(std::string_view name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kPamRt;
  int max_attempts = 64;
  double epsilon = 0.0;
  int pairwise_list_size = 64;
};

std::optional<std::string> ValidateStrategyConfig(const StrategyConfig& config);

using Mutator = std::function<ProgramGraph(const ProgramGraph&, Rng&)>;

// Tournament, one mutation, no predictor.
StrategyOutcome VanillaMutation(const PopulationBuffer& pop,
                                const Mutator& mutate, int tournament_size,
                                Rng& rng);

// Retries mutations of a single tournament winner until the scorer prefers
// the child over the parent or `max_attempts` is spent. The last child is
// returned either way.
StrategyOutcome PamMutation(const PopulationBuffer& pop, PairScorer& scorer,
                            const Mutator& mutate, int tournament_size,
                            int max_attempts, Rng& rng);

// As PamMutation, but every attempt runs a fresh tournament.
StrategyOutcome PamRtMutation(const PopulationBuffer& pop, PairScorer& scorer,
                              const Mutator& mutate, int tournament_size,
                              int max_attempts, Rng& rng);

// Generates `list_size` children of one tournament winner and returns the one
// with the most +1 votes against its siblings (lowest index on ties).
StrategyOutcome MaxPairwiseMutation(const PopulationBuffer& pop,
                                    PairScorer& scorer, const Mutator& mutate,
                                    int tournament_size, int list_size,
                                    Rng& rng);

// Vote tallies used by MaxPairwiseMutation: score[i] = sum_{j != i} vote(i, j).
std::vector<int> PairwiseScores(
    const std::vector<std::vector<BinaryScore>>& table);

// Vanilla with probability epsilon (one draw from `gate_rng` per call) or
// while fewer than `min_data` samples exist; the configured kind otherwise.
StrategyKind SelectStrategy(const StrategyConfig& config, std::int64_t samples,
                            std::int64_t min_data, Rng& gate_rng);

// Binds a strategy kind to its collaborators. `scorer` may be null for
// vanilla.
MutationStrategy BindStrategy(StrategyKind kind, const StrategyConfig& config,
                              PairScorer* scorer, Mutator mutate,
                              int tournament_size);

}  // namespace pamevo

#endif  // PAMEVO_STRATEGIES_H_
