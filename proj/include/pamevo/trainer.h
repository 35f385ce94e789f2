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

#ifndef PAMEVO_TRAINER_H_
#define PAMEVO_TRAINER_H_

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "pamevo/dag.h"
#include "pamevo/predictor.h"
#include "pamevo/random.h"

namespace pamevo {

struct ReplayRecord {
  ProgramGraph graph;
  double fitness = 0.0;
};

// Bounded FIFO of evaluated candidates.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(records_.size()); }
  const ReplayRecord& at(int i) const { return records_.at(i); }
  const std::deque<ReplayRecord>& records() const { return records_; }

  void Push(ReplayRecord record);

 private:
  int capacity_;
  std::deque<ReplayRecord> records_;
};

struct TrainSchedule {
  int frequency = 100;
  int epochs_per_trigger = 10;
  std::int64_t min_data = 100;
  int batch_size = 64;
};

// Two independent shuffles of the buffer zipped position by position. Pairs
// of identical graphs or equal fitness are dropped; label is 1 iff the first
// record is fitter. The pairs point into `buffer`.
std::vector<LabeledPair> MakeEpochPairs(const ReplayBuffer& buffer, Rng& rng);

// Same construction over an arbitrary record list.
std::vector<LabeledPair> MakeEpochPairs(std::span<const ReplayRecord> records,
                                        Rng& rng);

struct TrainStats {
  std::int64_t steps = 0;
  std::int64_t skipped_steps = 0;  // non-finite loss or gradient
  std::int64_t empty_epochs = 0;
  double last_epoch_loss = 0.0;
};

// Runs `epochs` passes of MakeEpochPairs, one Adam step per batch.
TrainStats TrainBinaryEpochs(PredictorModel& model, AdamState& adam,
                             const AdamConfig& adam_config,
                             std::span<const ReplayRecord> records, int epochs,
                             int batch_size, Rng& rng);

TrainStats TrainBinaryEpochs(PredictorModel& model, AdamState& adam,
                             const AdamConfig& adam_config,
                             const ReplayBuffer& buffer, int epochs,
                             int batch_size, Rng& rng);

// Regression counterpart: each epoch is one shuffled pass over the records.
TrainStats TrainRegressionEpochs(PredictorModel& model, AdamState& adam,
                                 const AdamConfig& adam_config,
                                 std::span<const ReplayRecord> records,
                                 int epochs, int batch_size, Rng& rng);

// Fraction of pairs whose order the model gets right. Binary models use the
// 0.5 threshold; regression models compare predicted fitnesses.
double PairAccuracy(const PredictorModel& model,
                    std::span<const LabeledPair> pairs);

}  // namespace pamevo

#endif  // PAMEVO_TRAINER_H_
