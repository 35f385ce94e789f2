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

#include "pamevo/analysis.h"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "pamevo/csv.h"
#include "pamevo/online.h"
#include "pamevo/strategies.h"

namespace pamevo {

double AcceptProbability(const HillClimbParams& hp) {
  return hp.q * hp.a + (1.0 - hp.q) * (1.0 - hp.a);
}

double ModifiedRate(const HillClimbParams& hp) {
  const double p_accept = AcceptProbability(hp);
  if (p_accept <= 0.0) return 0.0;
  return hp.q * hp.a / p_accept;
}

double SimulateModifiedRate(const HillClimbParams& hp,
                            std::int64_t max_attempts, std::int64_t trials,
                            Rng& rng) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::int64_t improved = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    for (std::int64_t attempt = 1;; ++attempt) {
      const bool better = u(rng) < hp.q;
      const bool correct = u(rng) < hp.a;
      const bool accept = better == correct;
      if (accept || attempt >= max_attempts) {
        improved += better;
        break;
      }
    }
  }
  return static_cast<double>(improved) / static_cast<double>(trials);
}

BinaryScore BernoulliLandscapeScorer::Compare(const ProgramGraph&,
                                              const ProgramGraph&) {
  ++comparisons_;
  last_improves_ = Bernoulli(rng_, hp_.q);
  return NoisyOraclePredict(last_improves_ ? 1.0 : 0.0,
                            last_improves_ ? 0.0 : 1.0, hp_.a, rng_);
}

AcceptanceSimulation SimulateStrategyAcceptance(const HillClimbParams& hp,
                                                bool re_tournament,
                                                int max_attempts,
                                                std::int64_t min_attempts,
                                                std::uint64_t seed) {
  constexpr int kPopulation = 100;
  constexpr int kTournament = 25;
  PopulationBuffer pop(kPopulation);
  ProgramGraph g = MakeInputGraph(1);
  AddNode(g, OpKind::kSin, 0);
  g.output_slot = 1;
  for (int i = 0; i < kPopulation; ++i) {
    Candidate c;
    c.graph = g;
    c.fitness = static_cast<double>(i) / kPopulation;
    pop.Push(std::move(c));
  }
  BernoulliLandscapeScorer scorer(hp, DeriveSeed(seed, 11));
  Rng rng(DeriveSeed(seed, 12));
  const Mutator identity = [](const ProgramGraph& p, Rng&) { return p; };

  AcceptanceSimulation sim;
  while (sim.attempts < min_attempts) {
    const StrategyOutcome out =
        re_tournament
            ? PamRtMutation(pop, scorer, identity, kTournament, max_attempts, rng)
            : PamMutation(pop, scorer, identity, kTournament, max_attempts, rng);
    ++sim.calls;
    sim.attempts += out.attempts_used;
    sim.accepts += out.accepted_by_model;
    const bool improves = scorer.last_child_improves();
    sim.improving_children += improves;
    sim.accepted_improving += improves && out.accepted_by_model;
  }
  return sim;
}

std::vector<double> CumulativeHillClimbRate(std::span<const bool> flags) {
  std::vector<double> out;
  out.reserve(flags.size());
  std::int64_t hits = 0;
  for (size_t i = 0; i < flags.size(); ++i) {
    hits += flags[i];
    out.push_back(static_cast<double>(hits) / static_cast<double>(i + 1));
  }
  return out;
}

Confusion ConfusionAt(std::span<const double> scores,
                      std::span<const bool> positive, double threshold) {
  if (scores.size() != positive.size()) {
    throw std::invalid_argument("scores and labels differ in length");
  }
  Confusion c;
  for (size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] > threshold;
    if (predicted) {
      positive[i] ? ++c.tp : ++c.fp;
    } else {
      positive[i] ? ++c.fn : ++c.tn;
    }
  }
  return c;
}

std::vector<ThresholdRow> ThresholdCurve(std::span<const double> scores,
                                         std::span<const bool> positive,
                                         int num_thresholds) {
  if (num_thresholds < 2) throw std::invalid_argument("need >= 2 thresholds");
  if (scores.size() != positive.size()) {
    throw std::invalid_argument("scores and labels differ in length");
  }
  // Sort once; each threshold is then a binary search.
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(scores.size());
  std::int64_t total_pos = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    sorted.push_back({scores[i], positive[i]});
    total_pos += positive[i];
  }
  std::sort(sorted.begin(), sorted.end());
  // suffix_pos[k] = positives among sorted[k..].
  std::vector<std::int64_t> suffix_pos(sorted.size() + 1, 0);
  for (size_t k = sorted.size(); k-- > 0;) {
    suffix_pos[k] = suffix_pos[k + 1] + sorted[k].second;
  }
  const std::int64_t n = static_cast<std::int64_t>(sorted.size());

  std::vector<ThresholdRow> rows;
  for (int t = 0; t < num_thresholds; ++t) {
    ThresholdRow row;
    row.threshold = static_cast<double>(t) / (num_thresholds - 1);
    const auto first_above = std::upper_bound(
        sorted.begin(), sorted.end(), std::make_pair(row.threshold, true));
    const size_t k = static_cast<size_t>(first_above - sorted.begin());
    const std::int64_t predicted_pos = n - static_cast<std::int64_t>(k);
    row.counts.tp = suffix_pos[k];
    row.counts.fp = predicted_pos - row.counts.tp;
    row.counts.fn = total_pos - row.counts.tp;
    row.counts.tn = n - predicted_pos - row.counts.fn;
    row.accuracy = n ? static_cast<double>(row.counts.tp + row.counts.tn) / n : 0.0;
    row.precision = predicted_pos
                        ? static_cast<double>(row.counts.tp) / predicted_pos
                        : 1.0;
    row.recall = total_pos ? static_cast<double>(row.counts.tp) / total_pos : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<HistogramBin> ScoreHistogram(std::span<const double> scores,
                                         std::span<const bool> positive,
                                         int num_bins) {
  if (num_bins < 1) throw std::invalid_argument("need >= 1 bin");
  std::vector<HistogramBin> bins(num_bins);
  for (int b = 0; b < num_bins; ++b) {
    bins[b].lo = static_cast<double>(b) / num_bins;
    bins[b].hi = static_cast<double>(b + 1) / num_bins;
  }
  for (size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], 0.0, 1.0);
    const int b = std::min(num_bins - 1, static_cast<int>(s * num_bins));
    positive[i] ? ++bins[b].positives : ++bins[b].negatives;
  }
  return bins;
}

void WriteThresholdCsv(const std::vector<ThresholdRow>& rows, std::ostream& out) {
  CsvWriter csv(out);
  csv.Row({"threshold", "accuracy", "precision", "recall"});
  for (const ThresholdRow& r : rows) {
    csv << r.threshold << r.accuracy << r.precision << r.recall;
    csv.EndRow();
  }
}

void WriteHistogramCsv(const std::vector<HistogramBin>& bins, std::ostream& out) {
  CsvWriter csv(out);
  csv.Row({"bin_low", "bin_high", "count_negative", "count_positive"});
  for (const HistogramBin& b : bins) {
    csv << b.lo << b.hi << b.negatives << b.positives;
    csv.EndRow();
  }
}

UniquenessCurves ComputeUniquenessCurves(
    std::span<const std::uint64_t> insertion_hashes, int population_size) {
  if (population_size < 1) throw std::invalid_argument("population size < 1");
  UniquenessCurves out;
  std::unordered_map<std::uint64_t, int> window;
  std::unordered_set<std::uint64_t> seen;
  const size_t p = static_cast<size_t>(population_size);
  for (size_t i = 0; i < insertion_hashes.size(); ++i) {
    ++window[insertion_hashes[i]];
    seen.insert(insertion_hashes[i]);
    if (i >= p) {
      auto it = window.find(insertion_hashes[i - p]);
      if (--it->second == 0) window.erase(it);
    }
    // One entry for the filled initial population, then one per child.
    if (i + 1 >= std::min(p, insertion_hashes.size())) {
      out.in_population.push_back(static_cast<std::int64_t>(window.size()));
      out.cumulative.push_back(static_cast<std::int64_t>(seen.size()));
    }
  }
  return out;
}

void FlattenCounterfactual(const std::vector<CounterfactualRecord>& records,
                           std::vector<double>& scores,
                           std::vector<bool>& positive) {
  scores.clear();
  positive.clear();
  for (const CounterfactualRecord& r : records) {
    for (size_t i = 0; i < r.candidate_scores.size(); ++i) {
      scores.push_back(r.candidate_scores[i]);
      positive.push_back(r.candidate_fitnesses[i] > r.parent_fitness);
    }
  }
}

CounterfactualResult CounterfactualRun(const ExperimentConfig& config,
                                       int fan_out) {
  if (fan_out < 1) throw std::invalid_argument("fan_out must be >= 1");
  ExperimentConfig cf = config;
  cf.strategy.kind = StrategyKind::kVanilla;
  OnlineExperiment exp(cf);
  const SymRegTask& task = exp.task();
  Rng child_rng(DeriveSeed(cf.seed, 21));

  std::unique_ptr<NoisyOracleScorer> oracle;
  if (cf.predictor_mode != PredictorMode::kLearned) {
    const double a = cf.predictor_mode == PredictorMode::kPerfectOracle
                         ? 1.0
                         : cf.oracle_accuracy;
    oracle = std::make_unique<NoisyOracleScorer>(
        [&task](const ProgramGraph& g) { return Fitness(g, task).fitness; }, a,
        DeriveSeed(cf.seed, 22));
  }

  CounterfactualResult result;
  std::vector<ProgramGraph> children(fan_out);
  while (!exp.Done()) {
    const StepRecord step = exp.Step();
    const StrategyOutcome& outcome = exp.last_outcome();
    CounterfactualRecord rec;
    rec.step = step.sample_index;
    rec.parent_fitness = outcome.parent_fitness;
    for (int i = 0; i < fan_out; ++i) {
      children[i] = MutateGraph(outcome.parent, child_rng);
      rec.candidate_fitnesses.push_back(Fitness(children[i], task).fitness);
    }
    if (oracle) {
      for (int i = 0; i < fan_out; ++i) {
        rec.candidate_scores.push_back(
            oracle->Compare(children[i], outcome.parent).probability);
      }
    } else {
      const auto model = exp.snapshot().Get();
      std::vector<const ProgramGraph*> graphs = {&outcome.parent};
      for (const ProgramGraph& c : children) graphs.push_back(&c);
      const Eigen::MatrixXd emb = EncodeAll(*model, graphs);
      for (int i = 0; i < fan_out; ++i) {
        rec.candidate_scores.push_back(
            BinaryScore::FromLogit(PairLogit(*model, emb.col(i + 1), emb.col(0)))
                .probability);
      }
    }
    result.records.push_back(std::move(rec));
  }

  std::vector<double> scores;
  std::vector<bool> positive;
  FlattenCounterfactual(result.records, scores, positive);
  result.num_scores = static_cast<std::int64_t>(scores.size());
  result.num_positives = std::count(positive.begin(), positive.end(), true);
  // std::vector<bool> has no contiguous storage; copy into a span-able form.
  const std::unique_ptr<bool[]> flags(new bool[positive.size()]);
  std::copy(positive.begin(), positive.end(), flags.get());
  const std::span<const bool> labels(flags.get(), positive.size());
  result.curve = ThresholdCurve(scores, labels);
  result.histogram = ScoreHistogram(scores, labels);
  return result;
}

}  // namespace pamevo
