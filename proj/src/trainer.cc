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

#include "pamevo/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace pamevo {

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("replay capacity < 1");
}

void ReplayBuffer::Push(ReplayRecord record) {
  records_.push_back(std::move(record));
  while (size() > capacity_) records_.pop_front();
}

namespace {

template <typename Records>
std::vector<LabeledPair> ZipShuffledPairs(const Records& records, Rng& rng) {
  const size_t n = records.size();
  std::vector<LabeledPair> pairs;
  if (n < 2) return pairs;
  std::vector<size_t> first(n), second(n);
  std::iota(first.begin(), first.end(), 0);
  std::iota(second.begin(), second.end(), 0);
  std::shuffle(first.begin(), first.end(), rng);
  std::shuffle(second.begin(), second.end(), rng);
  pairs.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const ReplayRecord& a = records[first[k]];
    const ReplayRecord& b = records[second[k]];
    if (a.fitness == b.fitness) continue;
    if (first[k] == second[k] || a.graph == b.graph) continue;
    pairs.push_back({&a.graph, &b.graph, a.fitness > b.fitness ? 1.0 : 0.0});
  }
  return pairs;
}

}  // namespace

std::vector<LabeledPair> MakeEpochPairs(std::span<const ReplayRecord> records,
                                        Rng& rng) {
  return ZipShuffledPairs(records, rng);
}

std::vector<LabeledPair> MakeEpochPairs(const ReplayBuffer& buffer, Rng& rng) {
  return ZipShuffledPairs(buffer.records(), rng);
}

namespace {

bool StepIsFinite(const LossAndGrad& lg) {
  return std::isfinite(lg.loss) && lg.grad.allFinite();
}

}  // namespace

namespace {

template <typename MakePairs>
TrainStats RunBinaryEpochs(PredictorModel& model, AdamState& adam,
                           const AdamConfig& adam_config, int epochs,
                           int batch_size, MakePairs make_pairs) {
  TrainStats stats;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const std::vector<LabeledPair> pairs = make_pairs();
    if (pairs.empty()) {
      ++stats.empty_epochs;
      continue;
    }
    double loss_sum = 0.0;
    size_t counted = 0;
    for (size_t start = 0; start < pairs.size(); start += batch_size) {
      const size_t len = std::min<size_t>(batch_size, pairs.size() - start);
      const LossAndGrad lg = BinaryLossAndGrad(
          model, std::span<const LabeledPair>(pairs).subspan(start, len));
      if (!StepIsFinite(lg)) {
        ++stats.skipped_steps;
        continue;
      }
      AdamStep(model, lg.grad, adam, adam_config);
      ++stats.steps;
      loss_sum += lg.loss * static_cast<double>(len);
      counted += len;
    }
    if (counted > 0) stats.last_epoch_loss = loss_sum / static_cast<double>(counted);
  }
  return stats;
}

}  // namespace

TrainStats TrainBinaryEpochs(PredictorModel& model, AdamState& adam,
                             const AdamConfig& adam_config,
                             std::span<const ReplayRecord> records, int epochs,
                             int batch_size, Rng& rng) {
  return RunBinaryEpochs(model, adam, adam_config, epochs, batch_size,
                         [&] { return MakeEpochPairs(records, rng); });
}

TrainStats TrainBinaryEpochs(PredictorModel& model, AdamState& adam,
                             const AdamConfig& adam_config,
                             const ReplayBuffer& buffer, int epochs,
                             int batch_size, Rng& rng) {
  return RunBinaryEpochs(model, adam, adam_config, epochs, batch_size,
                         [&] { return MakeEpochPairs(buffer, rng); });
}

TrainStats TrainRegressionEpochs(PredictorModel& model, AdamState& adam,
                                 const AdamConfig& adam_config,
                                 std::span<const ReplayRecord> records,
                                 int epochs, int batch_size, Rng& rng) {
  TrainStats stats;
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<LabeledGraph> items(records.size());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    if (records.empty()) {
      ++stats.empty_epochs;
      continue;
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t k = 0; k < order.size(); ++k) {
      items[k] = {&records[order[k]].graph, records[order[k]].fitness};
    }
    double loss_sum = 0.0;
    size_t counted = 0;
    for (size_t start = 0; start < items.size(); start += batch_size) {
      const size_t len = std::min<size_t>(batch_size, items.size() - start);
      const LossAndGrad lg = RegressionLossAndGrad(
          model, std::span<const LabeledGraph>(items).subspan(start, len));
      if (!StepIsFinite(lg)) {
        ++stats.skipped_steps;
        continue;
      }
      AdamStep(model, lg.grad, adam, adam_config);
      ++stats.steps;
      loss_sum += lg.loss * static_cast<double>(len);
      counted += len;
    }
    if (counted > 0) stats.last_epoch_loss = loss_sum / static_cast<double>(counted);
  }
  return stats;
}

double PairAccuracy(const PredictorModel& model,
                    std::span<const LabeledPair> pairs) {
  if (pairs.empty()) return 0.0;
  // Encode each distinct graph once.
  std::unordered_map<const ProgramGraph*, int> column;
  std::vector<const ProgramGraph*> graphs;
  auto add = [&](const ProgramGraph* g) {
    auto [it, inserted] = column.try_emplace(g, static_cast<int>(graphs.size()));
    if (inserted) graphs.push_back(g);
    return it->second;
  };
  std::vector<std::pair<int, int>> idx;
  idx.reserve(pairs.size());
  for (const LabeledPair& p : pairs) idx.push_back({add(p.first), add(p.second)});

  Eigen::MatrixXd emb(model.config().hidden_dim, static_cast<Eigen::Index>(graphs.size()));
  constexpr size_t kChunk = 512;
  for (size_t start = 0; start < graphs.size(); start += kChunk) {
    const size_t len = std::min(kChunk, graphs.size() - start);
    emb.middleCols(start, len) = EncodeAll(
        model, std::span<const ProgramGraph* const>(graphs).subspan(start, len));
  }

  size_t correct = 0;
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = idx[k];
    bool says_first;
    if (model.head() == HeadKind::kBinary) {
      says_first = BinaryScore::FromLogit(PairLogit(model, emb.col(i), emb.col(j)))
                       .Accepts();
    } else {
      says_first = RegressionOutput(model, emb.col(i)) >
                   RegressionOutput(model, emb.col(j));
    }
    if (says_first == (pairs[k].label > 0.5)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace pamevo
