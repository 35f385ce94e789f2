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

#ifndef PAMEVO_SYMREG_H_
#define PAMEVO_SYMREG_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "pamevo/dag.h"
#include "pamevo/random.h"

namespace pamevo {

inline constexpr int kNumSamplePoints = 20;

// One value per sample point; graph evaluation is vectorized over points.
using SampleArray = Eigen::Array<double, kNumSamplePoints, 1>;

enum class TaskId { kNguyen2, kNguyen3, kNguyen5, kNguyen7, kNguyen12 };

std::string_view TaskName(TaskId id);
// Accepts "nguyen2" .. "nguyen12" (case-insensitive, optional '-').
TaskId ParseTaskName(std::string_view name);

struct Domain {
  double lo = 0.0;
  double hi = 1.0;
  // Open domains exclude the endpoints when sampling.
  bool open = false;
};

// A Nguyen benchmark instance with its sample points frozen at construction.
class SymRegTask {
 public:
  SymRegTask(TaskId id, std::uint64_t seed);

  TaskId id() const { return id_; }
  std::string_view name() const { return TaskName(id_); }
  int num_inputs() const { return num_inputs_; }
  const Domain& domain() const { return domain_; }
  std::uint64_t seed() const { return seed_; }

  const SampleArray& xs() const { return xs_; }
  // All zeros for single-variable tasks.
  const SampleArray& ys() const { return ys_; }
  const SampleArray& targets() const { return targets_; }

  // Points as CSV "point_index,x[,y],target" with a header row.
  std::string SamplePointsCsv() const;

 private:
  TaskId id_;
  std::uint64_t seed_;
  int num_inputs_;
  Domain domain_;
  SampleArray xs_;
  SampleArray ys_;
  SampleArray targets_;
};

// Closed-form ground truth. `y` is ignored for single-variable tasks.
double TargetValue(TaskId id, double x, double y = 0.0);

// Evaluates the active subgraph at one point with unprotected arithmetic;
// non-finite values propagate.
double EvaluateGraph(const ProgramGraph& g, double x, double y = 0.0);

// Vectorized form of EvaluateGraph over the task's sample points.
SampleArray EvaluateOutputs(const ProgramGraph& g, const SymRegTask& task);

struct FitnessRecord {
  double rmse = 0.0;  // +inf when any output is non-finite
  double fitness = 0.0;
};

// 1 - (2/pi) atan(rmse * pi / 2); zero for non-finite rmse.
double FlipAndSquash(double rmse);

FitnessRecord FitnessFromOutputs(const SampleArray& outputs,
                                 const SymRegTask& task);
FitnessRecord Fitness(const ProgramGraph& g, const SymRegTask& task);

// Digest of the output vector after rounding to 1e-10. Any non-finite entry
// hashes to a fixed tag per position.
std::uint64_t FunctionalHash(const SampleArray& outputs);

// Fills every slot up to max_slots with uniformly drawn operators and edges;
// the output is the last slot.
ProgramGraph RandomGraph(int num_inputs, Rng& rng,
                         int max_slots = kDefaultMaxSlots);
ProgramGraph RandomGraph(const SymRegTask& task, Rng& rng);

enum class MutationMove { kOpResample, kEdgeRewire, kOutputMove };

// One uniformly chosen move. Degenerate draws are retried up to 16 times
// before falling back to an op resample.
ProgramGraph MutateGraph(const ProgramGraph& parent, Rng& rng);

// Applies a specific move; exposed for tests. Returns nullopt if no legal
// change was found within the retry budget.
std::optional<ProgramGraph> TryMove(const ProgramGraph& parent,
                                    MutationMove move, Rng& rng);

}  // namespace pamevo

#endif  // PAMEVO_SYMREG_H_
