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

#ifndef PAMEVO_EVOLUTION_H_
#define PAMEVO_EVOLUTION_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <unordered_map>

#include "pamevo/dag.h"
#include "pamevo/random.h"
#include "pamevo/symreg.h"

namespace pamevo {

struct Candidate {
  ProgramGraph graph;
  double fitness = 0.0;
  std::optional<double> parent_fitness;
  std::int64_t sample_index = 0;
  int attempts_used = 0;
  bool fec_hit = false;
  std::uint64_t functional_hash = 0;
};

// Bounded FIFO population. Pushing onto a full buffer evicts the oldest
// member, which is what gives regularized evolution its aging.
class PopulationBuffer {
 public:
  explicit PopulationBuffer(int capacity);

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool full() const { return size() == capacity_; }

  // Index 0 is the oldest member.
  const Candidate& at(int i) const { return members_.at(i); }
  const std::deque<Candidate>& members() const { return members_; }

  // Returns the evicted member, if any.
  std::optional<Candidate> Push(Candidate c);

  const Candidate& Best() const;

 private:
  int capacity_;
  std::deque<Candidate> members_;
};

// Draws `tournament_size` members uniformly with replacement and returns the
// index of the fittest; ties go to the most recently inserted. Throws
// std::invalid_argument on an empty population or a non-positive size.
int TournamentSelectIndex(const PopulationBuffer& pop, int tournament_size,
                          Rng& rng);
const Candidate& TournamentSelect(const PopulationBuffer& pop,
                                  int tournament_size, Rng& rng);

class FecCache {
 public:
  std::optional<double> Lookup(std::uint64_t key);
  void Insert(std::uint64_t key, double fitness);

  std::int64_t hits() const { return hits_; }
  std::int64_t misses() const { return misses_; }
  size_t size() const { return table_.size(); }
  const std::unordered_map<std::uint64_t, double>& table() const {
    return table_;
  }
  void Restore(std::unordered_map<std::uint64_t, double> table,
               std::int64_t hits, std::int64_t misses);

 private:
  std::unordered_map<std::uint64_t, double> table_;
  std::int64_t hits_ = 0;
  std::int64_t misses_ = 0;
};

// Computes (or, with a cache, reuses) the child's fitness. The output vector
// is always computed because it is the cache key; a hit skips the error
// reduction and reports fec_hit.
Candidate EvaluateCandidate(const ProgramGraph& child, const SymRegTask& task,
                            FecCache* fec);

// Random graphs, evaluated and pushed in generation order.
PopulationBuffer InitPopulation(const SymRegTask& task, int population_size,
                                Rng& rng, FecCache* fec = nullptr);

// What a mutation strategy hands back to the step loop.
struct StrategyOutcome {
  ProgramGraph child;
  ProgramGraph parent;  // the parent of the returned child
  double parent_fitness = 0.0;
  int attempts_used = 1;
  bool accepted_by_model = false;
  std::int64_t predictor_queries = 0;
};

using MutationStrategy =
    std::function<StrategyOutcome(const PopulationBuffer&, Rng&)>;

// One regularized-evolution cycle: propose, evaluate, enqueue (evicting the
// oldest). Returns the evaluated child.
Candidate RegEvoStep(PopulationBuffer& pop, const SymRegTask& task,
                     const MutationStrategy& strategy, Rng& rng,
                     FecCache* fec = nullptr, std::int64_t sample_index = 0);

}  // namespace pamevo

#endif  // PAMEVO_EVOLUTION_H_
