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

#ifndef PAMEVO_ANALYSIS_H_
#define PAMEVO_ANALYSIS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pamevo/config.h"
#include "pamevo/predictor.h"
#include "pamevo/random.h"

namespace pamevo {

// Natural hill-climbing rate q and predictor accuracy a.
struct HillClimbParams {
  double q = 0.0;
  double a = 0.5;
};

// Probability that one PAM attempt is accepted: q a + (1 - q)(1 - a).
double AcceptProbability(const HillClimbParams& hp);

// Probability that the child PAM eventually accepts is a true improvement,
// with unlimited retries: q a / p_accept. Zero when p_accept is zero.
double ModifiedRate(const HillClimbParams& hp);

// Monte Carlo of the PAM rejection process with independent Bernoulli child
// quality (q) and prediction correctness (a), capped at `max_attempts`. The
// capped run returns its last child. Returns the fraction of trials whose
// returned child is an improvement.
double SimulateModifiedRate(const HillClimbParams& hp,
                            std::int64_t max_attempts, std::int64_t trials,
                            Rng& rng);

// Synthetic landscape for exercising the real strategy code: every Compare()
// draws a fresh child quality ~ Bernoulli(q) and answers like a noisy oracle
// of accuracy a. The last drawn quality is kept for bookkeeping.
class BernoulliLandscapeScorer : public PairScorer {
 public:
  BernoulliLandscapeScorer(const HillClimbParams& hp, std::uint64_t seed)
      : hp_(hp), rng_(seed) {}
  BinaryScore Compare(const ProgramGraph& a, const ProgramGraph& b) override;

  bool last_child_improves() const { return last_improves_; }
  std::int64_t comparisons() const { return comparisons_; }

 private:
  HillClimbParams hp_;
  Rng rng_;
  bool last_improves_ = false;
  std::int64_t comparisons_ = 0;
};

struct AcceptanceSimulation {
  std::int64_t calls = 0;
  std::int64_t attempts = 0;
  std::int64_t accepts = 0;
  // Returned children that are true improvements (accepted or exhausted).
  std::int64_t improving_children = 0;
  std::int64_t accepted_improving = 0;

  double AcceptFrequency() const {
    return attempts ? static_cast<double>(accepts) / attempts : 0.0;
  }
  double ImprovementRate() const {
    return calls ? static_cast<double>(improving_children) / calls : 0.0;
  }
};

// Runs PamRtMutation (or PamMutation) against a BernoulliLandscapeScorer on a
// fixed dummy population until at least `min_attempts` attempts are spent.
AcceptanceSimulation SimulateStrategyAcceptance(const HillClimbParams& hp,
                                                bool re_tournament,
                                                int max_attempts,
                                                std::int64_t min_attempts,
                                                std::uint64_t seed);

// Entry n is the mean of flags[0..n].
std::vector<double> CumulativeHillClimbRate(std::span<const bool> flags);

struct Confusion {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// A score counts as a positive prediction when it is strictly above the
// threshold, matching the strategies' acceptance rule.
Confusion ConfusionAt(std::span<const double> scores,
                      std::span<const bool> positive, double threshold);

struct ThresholdRow {
  double threshold = 0.0;
  double accuracy = 0.0;
  // 1 when nothing is predicted positive.
  double precision = 1.0;
  // 0 when there are no positives.
  double recall = 0.0;
  Confusion counts;
};

// `num_thresholds` evenly spaced thresholds over [0, 1].
std::vector<ThresholdRow> ThresholdCurve(std::span<const double> scores,
                                         std::span<const bool> positive,
                                         int num_thresholds = 101);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t negatives = 0;
  std::int64_t positives = 0;
};

// Equal-width bins over [0, 1]; a score of exactly 1 falls in the last bin.
std::vector<HistogramBin> ScoreHistogram(std::span<const double> scores,
                                         std::span<const bool> positive,
                                         int num_bins = 20);

void WriteThresholdCsv(const std::vector<ThresholdRow>& rows, std::ostream& out);
void WriteHistogramCsv(const std::vector<HistogramBin>& bins, std::ostream& out);

struct UniquenessCurves {
  // Distinct structural hashes in the population after each step; entry 0
  // is the initial population.
  std::vector<std::int64_t> in_population;
  // Distinct structural hashes over every candidate evaluated so far.
  std::vector<std::int64_t> cumulative;
};

// `insertion_hashes` lists the initial population followed by each child, in
// insertion order; the population is the trailing window of that sequence.
UniquenessCurves ComputeUniquenessCurves(
    std::span<const std::uint64_t> insertion_hashes, int population_size);

struct CounterfactualRecord {
  std::int64_t step = 0;
  std::vector<double> candidate_scores;
  std::vector<double> candidate_fitnesses;
  double parent_fitness = 0.0;
};

struct CounterfactualResult {
  std::vector<CounterfactualRecord> records;
  std::vector<ThresholdRow> curve;
  std::vector<HistogramBin> histogram;
  std::int64_t num_scores = 0;
  std::int64_t num_positives = 0;
};

// Flattens records into (score, is-improvement) arrays.
void FlattenCounterfactual(const std::vector<CounterfactualRecord>& records,
                           std::vector<double>& scores,
                           std::vector<bool>& positive);

// Vanilla evolution with the predictor trained online but never steering. At
// each step `fan_out` extra children of that step's parent are scored
// against the parent and their true fitness recorded. The config's strategy
// kind is ignored; its predictor mode picks the scorer.
CounterfactualResult CounterfactualRun(const ExperimentConfig& config,
                                       int fan_out = 64);

}  // namespace pamevo

#endif  // PAMEVO_ANALYSIS_H_
