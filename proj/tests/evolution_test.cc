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

#include <cmath>
#include <set>

#include "doctest.h"
#include "pamevo/evolution.h"
#include "pamevo/strategies.h"

using namespace pamevo;

namespace {

Candidate WithFitness(double f, std::int64_t index = 0) {
  Candidate c;
  c.graph = MakeInputGraph(1);
  c.fitness = f;
  c.sample_index = index;
  return c;
}

MutationStrategy Vanilla(int t) {
  return [t](const PopulationBuffer& pop, Rng& rng) {
    return VanillaMutation(pop, MutateGraph, t, rng);
  };
}

}  // namespace

TEST_CASE("population buffer ages out the oldest") {
  PopulationBuffer pop(3);
  CHECK(pop.empty());
  for (int i = 0; i < 3; ++i) CHECK_FALSE(pop.Push(WithFitness(0.1 * i, i)).has_value());
  CHECK(pop.full());
  const auto evicted = pop.Push(WithFitness(0.9, 3));
  REQUIRE(evicted.has_value());
  CHECK(evicted->sample_index == 0);
  CHECK(pop.size() == 3);
  CHECK(pop.at(0).sample_index == 1);
  CHECK(pop.at(2).sample_index == 3);
  CHECK(pop.Best().fitness == 0.9);
  CHECK_THROWS_AS(PopulationBuffer(0), std::invalid_argument);
}

TEST_CASE("tournament selection") {
  Rng rng(1);
  PopulationBuffer empty(4);
  CHECK_THROWS_AS(TournamentSelectIndex(empty, 2, rng), std::invalid_argument);

  PopulationBuffer pop(100);
  for (int i = 0; i < 100; ++i) pop.Push(WithFitness(((i * 37) % 100) / 100.0, i));
  CHECK_THROWS_AS(TournamentSelectIndex(pop, 0, rng), std::invalid_argument);

  SUBCASE("T = 1 is uniform") {
    std::vector<int> counts(100, 0);
    const int n = 200000;
    for (int i = 0; i < n; ++i) ++counts[TournamentSelectIndex(pop, 1, rng)];
    const double p = 0.01, sigma = std::sqrt(n * p * (1 - p));
    for (int c : counts) CHECK(std::abs(c - n * p) < 4.5 * sigma);
  }
  SUBCASE("best member is picked at the inclusion rate") {
    int best = 0;
    for (int i = 0; i < 100; ++i) {
      if (pop.at(i).fitness == 0.99) best = i;
    }
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += TournamentSelectIndex(pop, 25, rng) == best;
    const double p = 1.0 - std::pow(0.99, 25);
    CHECK(p == doctest::Approx(0.2222).epsilon(1e-3));
    CHECK(std::abs(static_cast<double>(hits) / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
  }
  SUBCASE("selection frequency is nondecreasing in fitness rank") {
    // A small population keeps every rank's expected count well above noise.
    PopulationBuffer ten(10);
    for (int i = 0; i < 10; ++i) ten.Push(WithFitness(((i * 3) % 10) / 10.0, i));
    for (int t : {2, 3, 5}) {
      std::vector<int> by_rank(10, 0);
      for (int i = 0; i < 100000; ++i) {
        const int k = TournamentSelectIndex(ten, t, rng);
        ++by_rank[static_cast<int>(std::lround(ten.at(k).fitness * 10))];
      }
      for (int r = 1; r < 10; ++r) CHECK(by_rank[r] >= by_rank[r - 1]);
    }
  }
  SUBCASE("ties go to the newest drawn member") {
    PopulationBuffer flat(10);
    for (int i = 0; i < 10; ++i) flat.Push(WithFitness(0.5, i));
    CHECK(TournamentSelectIndex(flat, 1000, rng) == 9);
    // With two draws the result is the larger index of the two.
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) {
      const int first = UniformInt(b, 0, 9);
      const int second = UniformInt(b, 0, 9);
      CHECK(TournamentSelectIndex(flat, 2, a) == std::max(first, second));
    }
  }
}

TEST_CASE("fec cache") {
  const SymRegTask task(TaskId::kNguyen2, 0);
  FecCache fec;
  ProgramGraph x = MakeInputGraph(1);
  ProgramGraph g = MakeInputGraph(1);
  const int one = AddNode(g, OpKind::kDiv, 0, 0);
  g.output_slot = AddNode(g, OpKind::kMul, 0, one);
  for (int i = 0; i < kNumSamplePoints; ++i) REQUIRE(task.xs()[i] != 0.0);
  CHECK((EvaluateOutputs(g, task) == EvaluateOutputs(x, task)).all());

  const Candidate a = EvaluateCandidate(x, task, &fec);
  CHECK_FALSE(a.fec_hit);
  const Candidate b = EvaluateCandidate(g, task, &fec);
  CHECK(b.fec_hit);
  CHECK(b.fitness == a.fitness);
  CHECK(a.functional_hash == b.functional_hash);
  CHECK(fec.hits() == 1);
  CHECK(fec.misses() == 1);
  CHECK(fec.size() == 1);

  const Candidate c = EvaluateCandidate(x, task, nullptr);
  const Candidate d = EvaluateCandidate(x, task, nullptr);
  CHECK_FALSE(c.fec_hit);
  CHECK(c.fitness == d.fitness);
}

TEST_CASE("init population") {
  const SymRegTask task(TaskId::kNguyen5, 2);
  Rng a(5), b(5);
  const PopulationBuffer p1 = InitPopulation(task, 100, a);
  const PopulationBuffer p2 = InitPopulation(task, 100, b);
  CHECK(p1.size() == 100);
  CHECK(p1.full());
  for (int i = 0; i < 100; ++i) {
    CHECK(p1.at(i).graph == p2.at(i).graph);
    CHECK(p1.at(i).fitness == p2.at(i).fitness);
    CHECK(p1.at(i).fitness >= 0.0);
    CHECK(p1.at(i).fitness <= 1.0);
  }
  CHECK_THROWS_AS(InitPopulation(task, 0, a), std::invalid_argument);
}

TEST_CASE("regularized evolution steps") {
  const SymRegTask task(TaskId::kNguyen2, 1);
  Rng rng(9);
  PopulationBuffer pop = InitPopulation(task, 100, rng);
  std::set<std::int64_t> initial;
  for (const Candidate& c : pop.members()) initial.insert(c.sample_index);
  double best = pop.Best().fitness;
  const MutationStrategy strategy = Vanilla(25);
  for (int i = 1; i <= 10000; ++i) {
    const Candidate child = RegEvoStep(pop, task, strategy, rng, nullptr, i);
    CHECK(pop.size() == 100);
    CHECK(child.sample_index == i);
    CHECK(child.parent_fitness.has_value());
    CHECK(pop.at(99).sample_index == i);
    const double now = std::max(best, child.fitness);
    CHECK(now >= best);
    best = now;
  }
  for (const Candidate& c : pop.members()) CHECK(c.sample_index > 9900);
}

TEST_CASE("regularized evolution is reproducible") {
  const SymRegTask task(TaskId::kNguyen7, 3);
  Rng r1(4), r2(4);
  PopulationBuffer p1 = InitPopulation(task, 50, r1);
  PopulationBuffer p2 = InitPopulation(task, 50, r2);
  for (int i = 0; i < 500; ++i) {
    const Candidate a = RegEvoStep(p1, task, Vanilla(10), r1);
    const Candidate b = RegEvoStep(p2, task, Vanilla(10), r2);
    REQUIRE(a.graph == b.graph);
    REQUIRE(a.fitness == b.fitness);
  }
}

TEST_CASE("fec on and off see the same sequence") {
  const SymRegTask task(TaskId::kNguyen5, 0);
  Rng r1(11), r2(11);
  FecCache fec;
  PopulationBuffer on = InitPopulation(task, 100, r1, &fec);
  PopulationBuffer off = InitPopulation(task, 100, r2, nullptr);
  int hits = 0;
  for (int i = 0; i < 3000; ++i) {
    const Candidate a = RegEvoStep(on, task, Vanilla(25), r1, &fec);
    const Candidate b = RegEvoStep(off, task, Vanilla(25), r2, nullptr);
    REQUIRE(a.graph == b.graph);
    REQUIRE(a.fitness == b.fitness);
    hits += a.fec_hit;
    CHECK_FALSE(b.fec_hit);
  }
  CHECK(hits > 0);
  CHECK(fec.hits() >= hits);
}
