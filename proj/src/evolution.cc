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

#include "pamevo/evolution.h"

#include <stdexcept>

namespace pamevo {

PopulationBuffer::PopulationBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("population capacity < 1");
}

std::optional<Candidate> PopulationBuffer::Push(Candidate c) {
  members_.push_back(std::move(c));
  if (size() <= capacity_) return std::nullopt;
  Candidate oldest = std::move(members_.front());
  members_.pop_front();
  return oldest;
}

const Candidate& PopulationBuffer::Best() const {
  if (members_.empty()) throw std::invalid_argument("empty population");
  int best = 0;
  for (int i = 1; i < size(); ++i) {
    if (members_[i].fitness >= members_[best].fitness) best = i;
  }
  return members_[best];
}

int TournamentSelectIndex(const PopulationBuffer& pop, int tournament_size,
                          Rng& rng) {
  if (pop.empty()) throw std::invalid_argument("tournament on empty population");
  if (tournament_size < 1) throw std::invalid_argument("tournament size < 1");
  int best = -1;
  for (int t = 0; t < tournament_size; ++t) {
    const int i = UniformInt(rng, 0, pop.size() - 1);
    if (best < 0 || pop.at(i).fitness > pop.at(best).fitness ||
        (pop.at(i).fitness == pop.at(best).fitness && i > best)) {
      best = i;
    }
  }
  return best;
}

const Candidate& TournamentSelect(const PopulationBuffer& pop,
                                  int tournament_size, Rng& rng) {
  return pop.at(TournamentSelectIndex(pop, tournament_size, rng));
}

std::optional<double> FecCache::Lookup(std::uint64_t key) {
  auto it = table_.find(key);
  if (it == table_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void FecCache::Insert(std::uint64_t key, double fitness) {
  table_.emplace(key, fitness);
}

void FecCache::Restore(std::unordered_map<std::uint64_t, double> table,
                       std::int64_t hits, std::int64_t misses) {
  table_ = std::move(table);
  hits_ = hits;
  misses_ = misses;
}

Candidate EvaluateCandidate(const ProgramGraph& child, const SymRegTask& task,
                            FecCache* fec) {
  Candidate c;
  c.graph = child;
  const SampleArray outputs = EvaluateOutputs(child, task);
  c.functional_hash = FunctionalHash(outputs);
  if (fec != nullptr) {
    if (auto cached = fec->Lookup(c.functional_hash)) {
      c.fitness = *cached;
      c.fec_hit = true;
      return c;
    }
  }
  c.fitness = FitnessFromOutputs(outputs, task).fitness;
  if (fec != nullptr) fec->Insert(c.functional_hash, c.fitness);
  return c;
}

PopulationBuffer InitPopulation(const SymRegTask& task, int population_size,
                                Rng& rng, FecCache* fec) {
  PopulationBuffer pop(population_size);
  for (int i = 0; i < population_size; ++i) {
    pop.Push(EvaluateCandidate(RandomGraph(task, rng), task, fec));
  }
  return pop;
}

Candidate RegEvoStep(PopulationBuffer& pop, const SymRegTask& task,
                     const MutationStrategy& strategy, Rng& rng, FecCache* fec,
                     std::int64_t sample_index) {
  StrategyOutcome outcome = strategy(pop, rng);
  Candidate child = EvaluateCandidate(outcome.child, task, fec);
  child.parent_fitness = outcome.parent_fitness;
  child.attempts_used = outcome.attempts_used;
  child.sample_index = sample_index;
  pop.Push(child);
  return child;
}

}  // namespace pamevo
