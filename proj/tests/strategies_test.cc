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
#include <map>

#include "doctest.h"
#include "pamevo/analysis.h"
#include "pamevo/strategies.h"

using namespace pamevo;

namespace {

class FixedScorer : public PairScorer {
 public:
  explicit FixedScorer(double logit) : logit_(logit) {}
  BinaryScore Compare(const ProgramGraph&, const ProgramGraph&) override {
    ++calls;
    return BinaryScore::FromLogit(logit_);
  }
  int calls = 0;

 private:
  double logit_;
};

// Population whose members are told apart by max_slots.
PopulationBuffer TaggedPopulation(int n) {
  PopulationBuffer pop(n);
  for (int i = 0; i < n; ++i) {
    Candidate c;
    c.graph = MakeInputGraph(1, 100 + i);
    c.fitness = i / static_cast<double>(n);
    pop.Push(c);
  }
  return pop;
}

// Children carry a fresh tag; fitness of a tag is looked up in `truth`.
struct TaggingMutator {
  std::vector<int>* parents;
  int* next_tag;
  ProgramGraph operator()(const ProgramGraph& p, Rng&) const {
    parents->push_back(p.max_slots);
    ProgramGraph c = MakeInputGraph(1, (*next_tag)++);
    return c;
  }
};

}  // namespace

TEST_CASE("strategy names and config validation") {
  for (StrategyKind k : {StrategyKind::kVanilla, StrategyKind::kPam,
                         StrategyKind::kPamRt, StrategyKind::kMaxPairwise}) {
    CHECK(ParseStrategyName(StrategyName(k)) == k);
  }
  CHECK(ParseStrategyName("PAM_RT") == StrategyKind::kPamRt);
  CHECK_THROWS_AS(ParseStrategyName("greedy"), std::invalid_argument);
  StrategyConfig c;
  CHECK(c.max_attempts == 64);
  CHECK(c.pairwise_list_size == 64);
  CHECK(c.epsilon == 0.0);
  CHECK_FALSE(ValidateStrategyConfig(c).has_value());
  c.max_attempts = 0;
  CHECK(ValidateStrategyConfig(c).has_value());
  c = StrategyConfig{};
  c.pairwise_list_size = 1;
  CHECK(ValidateStrategyConfig(c).has_value());
  c = StrategyConfig{};
  c.epsilon = 1.5;
  CHECK(ValidateStrategyConfig(c).has_value());
}

TEST_CASE("vanilla issues no queries") {
  const PopulationBuffer pop = TaggedPopulation(10);
  Rng rng(1);
  std::vector<int> parents;
  int tag = 1000;
  const StrategyOutcome out = VanillaMutation(pop, TaggingMutator{&parents, &tag}, 3, rng);
  CHECK(out.predictor_queries == 0);
  CHECK(out.attempts_used == 1);
  CHECK(parents.size() == 1);
  CHECK(out.parent.max_slots == parents[0]);
}

TEST_CASE("pam-rt") {
  const PopulationBuffer pop = TaggedPopulation(20);
  Rng rng(2);
  std::vector<int> parents;
  int tag = 1000;
  const TaggingMutator mutate{&parents, &tag};

  SUBCASE("accepting oracle stops after one attempt") {
    FixedScorer yes(5.0);
    const StrategyOutcome out = PamRtMutation(pop, yes, mutate, 5, 64, rng);
    CHECK(out.attempts_used == 1);
    CHECK(out.accepted_by_model);
    CHECK(out.predictor_queries == 1);
  }
  SUBCASE("rejecting oracle exhausts K and returns the last child") {
    FixedScorer no(-5.0);
    const StrategyOutcome out = PamRtMutation(pop, no, mutate, 5, 64, rng);
    CHECK(out.attempts_used == 64);
    CHECK_FALSE(out.accepted_by_model);
    CHECK(out.predictor_queries == 64);
    CHECK(no.calls == 64);
    CHECK(out.child.max_slots == tag - 1);
    CHECK(out.parent.max_slots == parents.back());
    // Re-tournament: parents change between attempts.
    std::map<int, int> distinct;
    for (int p : parents) ++distinct[p];
    CHECK(distinct.size() > 1);
  }
  SUBCASE("zero logit rejects") {
    FixedScorer zero(0.0);
    CHECK(PamRtMutation(pop, zero, mutate, 5, 3, rng).attempts_used == 3);
  }
}

TEST_CASE("pam keeps one parent") {
  const PopulationBuffer pop = TaggedPopulation(20);
  Rng rng(3);
  std::vector<int> parents;
  int tag = 1000;
  FixedScorer no(-1.0);
  const StrategyOutcome out = PamMutation(pop, no, TaggingMutator{&parents, &tag}, 5, 32, rng);
  CHECK(out.attempts_used == 32);
  CHECK(parents.size() == 32);
  for (int p : parents) CHECK(p == parents.front());
  CHECK(out.parent.max_slots == parents.front());
}

TEST_CASE("pam and pam-rt coincide at K = 1") {
  const PopulationBuffer pop = TaggedPopulation(30);
  Rng a(4), b(4);
  for (int i = 0; i < 200; ++i) {
    std::vector<int> pa, pb;
    int ta = 0, tb = 0;
    FixedScorer s1(i % 2 ? 1.0 : -1.0), s2(i % 2 ? 1.0 : -1.0);
    const StrategyOutcome x = PamMutation(pop, s1, TaggingMutator{&pa, &ta}, 7, 1, a);
    const StrategyOutcome y = PamRtMutation(pop, s2, TaggingMutator{&pb, &tb}, 7, 1, b);
    CHECK(x.child == y.child);
    CHECK(x.parent == y.parent);
    CHECK(x.accepted_by_model == y.accepted_by_model);
  }
}

TEST_CASE("pam-rt acceptance frequency follows the closed form") {
  const HillClimbParams hp{0.3, 0.8};
  CHECK(AcceptProbability(hp) == doctest::Approx(0.38));
  const AcceptanceSimulation sim = SimulateStrategyAcceptance(hp, true, 64, 100000, 5);
  CHECK(sim.attempts >= 100000);
  const double p = AcceptProbability(hp);
  const double sigma = std::sqrt(p * (1 - p) / sim.attempts);
  CHECK(std::abs(sim.AcceptFrequency() - p) < 3.0 * sigma);
}

TEST_CASE("accepted child improvement rate") {
  SUBCASE("pam approaches the modified rate") {
    const HillClimbParams hp{0.1, 0.8};
    const AcceptanceSimulation sim = SimulateStrategyAcceptance(hp, false, 10000, 200000, 6);
    const double r = ModifiedRate(hp);
    CHECK(r == doctest::Approx(4.0 / 13.0));
    const double sigma = std::sqrt(r * (1 - r) / sim.calls);
    CHECK(std::abs(sim.ImprovementRate() - r) < 3.0 * sigma);
  }
  SUBCASE("uninformative model leaves the natural rate") {
    const HillClimbParams hp{0.3, 0.5};
    const AcceptanceSimulation sim = SimulateStrategyAcceptance(hp, true, 64, 100000, 7);
    const double sigma = std::sqrt(0.3 * 0.7 / sim.calls);
    CHECK(std::abs(sim.ImprovementRate() - 0.3) < 3.0 * sigma);
  }
  SUBCASE("perfect model only accepts improvements") {
    const HillClimbParams hp{0.05, 1.0};
    const AcceptanceSimulation sim = SimulateStrategyAcceptance(hp, true, 64, 100000, 8);
    CHECK(sim.accepts > 0);
    CHECK(sim.accepted_improving == sim.accepts);
  }
}

TEST_CASE("max-pairwise") {
  const PopulationBuffer pop = TaggedPopulation(10);
  std::vector<int> parents;
  int tag = 0;
  // Child fitness is a scrambled function of its tag.
  auto truth = [](const ProgramGraph& g) {
    return static_cast<double>((g.max_slots * 7919) % 1009) / 1009.0;
  };
  SUBCASE("perfect oracle recovers the best child") {
    for (int trial = 0; trial < 20; ++trial) {
      NoisyOracleScorer oracle(truth, 1.0, trial);
      Rng rng(trial);
      const int first = tag;
      const StrategyOutcome out =
          MaxPairwiseMutation(pop, oracle, TaggingMutator{&parents, &tag}, 3, 16, rng);
      double best = -1.0;
      for (int t = first; t < tag; ++t) best = std::max(best, truth(MakeInputGraph(1, t)));
      CHECK(truth(out.child) == best);
      CHECK(out.predictor_queries == 16 * 15);
    }
  }
  SUBCASE("two children follow the model") {
    Rng rng(3);
    NoisyOracleScorer oracle(truth, 1.0, 1);
    const int first = tag;
    const StrategyOutcome out =
        MaxPairwiseMutation(pop, oracle, TaggingMutator{&parents, &tag}, 3, 2, rng);
    const double f0 = truth(MakeInputGraph(1, first));
    const double f1 = truth(MakeInputGraph(1, first + 1));
    CHECK(out.child.max_slots == (f0 > f1 ? first : first + 1));
  }
  SUBCASE("ties go to the lowest index") {
    Rng rng(3);
    FixedScorer zero(0.0);
    const int first = tag;
    const StrategyOutcome out =
        MaxPairwiseMutation(pop, zero, TaggingMutator{&parents, &tag}, 3, 5, rng);
    CHECK(out.child.max_slots == first);
  }
}

TEST_CASE("pairwise score bounds for three children") {
  // Every outcome table of six ordered comparisons.
  for (int mask = 0; mask < 64; ++mask) {
    std::vector<std::vector<BinaryScore>> table(3, std::vector<BinaryScore>(3));
    int bit = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        table[i][j] = BinaryScore::FromLogit((mask >> bit++) & 1 ? 1.0 : -1.0);
      }
    }
    for (int s : PairwiseScores(table)) {
      CHECK(s >= -2);
      CHECK(s <= 2);
      CHECK(s % 2 == 0);
    }
  }
}

TEST_CASE("strategy gate") {
  StrategyConfig c;
  c.kind = StrategyKind::kPamRt;
  Rng rng(9);
  c.epsilon = 1.0;
  for (int i = 0; i < 100; ++i) CHECK(SelectStrategy(c, 1000, 100, rng) == StrategyKind::kVanilla);
  c.epsilon = 0.0;
  for (int i = 0; i < 100; ++i) CHECK(SelectStrategy(c, 99, 100, rng) == StrategyKind::kVanilla);
  for (int i = 0; i < 100; ++i) CHECK(SelectStrategy(c, 100, 100, rng) == StrategyKind::kPamRt);
  c.epsilon = 0.25;
  int vanilla = 0;
  for (int i = 0; i < 40000; ++i) vanilla += SelectStrategy(c, 500, 100, rng) == StrategyKind::kVanilla;
  CHECK(std::abs(vanilla - 10000) < 3 * std::sqrt(40000 * 0.25 * 0.75));
}

TEST_CASE("bind strategy") {
  StrategyConfig c;
  CHECK_THROWS_AS(BindStrategy(StrategyKind::kPam, c, nullptr, MutateGraph, 5),
                  std::invalid_argument);
  const MutationStrategy v = BindStrategy(StrategyKind::kVanilla, c, nullptr, MutateGraph, 5);
  PopulationBuffer pop(5);
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    Candidate cand;
    cand.graph = RandomGraph(1, rng);
    pop.Push(cand);
  }
  CHECK(IsValid(v(pop, rng).child));
}
