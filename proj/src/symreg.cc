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

#include "pamevo/symreg.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pamevo {

namespace {

constexpr int kMoveRetries = 16;

Domain DomainFor(TaskId id) {
  switch (id) {
    case TaskId::kNguyen7:
      return {0.0, 2.0, false};
    case TaskId::kNguyen12:
      return {0.0, 1.0, true};
    default:
      return {-1.0, 1.0, false};
  }
}

double SampleCoordinate(const Domain& d, Rng& rng) {
  std::uniform_real_distribution<double> dist(d.lo, d.hi);
  double v = dist(rng);
  while (d.open && (v <= d.lo || v >= d.hi)) v = dist(rng);
  return v;
}

// Unary and binary kernels shared by the scalar and vectorized evaluators.
template <typename T>
T Apply(OpKind op, const T& a, const T& b) {
  using std::cos, std::exp, std::log, std::sin;
  switch (op) {
    case OpKind::kAdd: return a + b;
    case OpKind::kSub: return a - b;
    case OpKind::kMul: return a * b;
    case OpKind::kDiv: return a / b;
    case OpKind::kSin: return sin(a);
    case OpKind::kCos: return cos(a);
    case OpKind::kExp: return exp(a);
    case OpKind::kLog: return log(a);
    default: return a;
  }
}

SampleArray ApplyArray(OpKind op, const SampleArray& a, const SampleArray& b) {
  switch (op) {
    case OpKind::kAdd: return a + b;
    case OpKind::kSub: return a - b;
    case OpKind::kMul: return a * b;
    case OpKind::kDiv: return a / b;
    case OpKind::kSin: return a.sin();
    case OpKind::kCos: return a.cos();
    case OpKind::kExp: return a.exp();
    case OpKind::kLog: return a.log();
    default: return a;
  }
}

// Draws an operator uniformly from the seven that differ from `current`.
OpKind DrawDifferentOperator(OpKind current, Rng& rng) {
  const int old = static_cast<int>(current) - kFirstOperator;
  int r = UniformInt(rng, 0, kNumOperators - 2);
  if (old >= 0 && r >= old) ++r;
  return OperatorAt(r);
}

}  // namespace

std::string_view TaskName(TaskId id) {
  switch (id) {
    case TaskId::kNguyen2: return "nguyen2";
    case TaskId::kNguyen3: return "nguyen3";
    case TaskId::kNguyen5: return "nguyen5";
    case TaskId::kNguyen7: return "nguyen7";
    case TaskId::kNguyen12: return "nguyen12";
  }
  return "unknown";
}

TaskId ParseTaskName(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (TaskId id : {TaskId::kNguyen2, TaskId::kNguyen3, TaskId::kNguyen5,
                    TaskId::kNguyen7, TaskId::kNguyen12}) {
    if (key == TaskName(id)) return id;
  }
  throw std::invalid_argument("unknown task \"" + std::string(name) + "\"");
}

double TargetValue(TaskId id, double x, double y) {
  switch (id) {
    case TaskId::kNguyen2:
      return x * x * x * x + x * x * x + x * x + x;
    case TaskId::kNguyen3:
      return x * x * x * x * x + x * x * x * x + x * x * x + x * x + x;
    case TaskId::kNguyen5:
      return std::sin(x * x) * std::cos(x) - 1.0;
    case TaskId::kNguyen7:
      return std::log(x + 1.0) + std::log(x * x + 1.0);
    case TaskId::kNguyen12:
      return x * x * x * x - x * x * x + 0.5 * y * y - y;
  }
  return 0.0;
}

SymRegTask::SymRegTask(TaskId id, std::uint64_t seed)
    : id_(id),
      seed_(seed),
      num_inputs_(id == TaskId::kNguyen12 ? 2 : 1),
      domain_(DomainFor(id)) {
  Rng rng(DeriveSeed(seed, 0x7a5c0000ULL + static_cast<std::uint64_t>(id)));
  xs_.setZero();
  ys_.setZero();
  for (int i = 0; i < kNumSamplePoints; ++i) {
    xs_[i] = SampleCoordinate(domain_, rng);
    if (num_inputs_ == 2) ys_[i] = SampleCoordinate(domain_, rng);
    targets_[i] = TargetValue(id_, xs_[i], ys_[i]);
  }
}

std::string SymRegTask::SamplePointsCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << (num_inputs_ == 2 ? "point_index,x,y,target\n"
                           : "point_index,x,target\n");
  for (int i = 0; i < kNumSamplePoints; ++i) {
    out << i << ',' << xs_[i];
    if (num_inputs_ == 2) out << ',' << ys_[i];
    out << ',' << targets_[i] << '\n';
  }
  return out.str();
}

double EvaluateGraph(const ProgramGraph& g, double x, double y) {
  const std::vector<bool> active = ActiveMask(g);
  std::vector<double> value(g.slots.size(), 0.0);
  for (int i = 0; i <= g.output_slot; ++i) {
    if (!active[i]) continue;
    const Node& node = g.slots[i];
    if (node.op == OpKind::kInputX) {
      value[i] = x;
    } else if (node.op == OpKind::kInputY) {
      value[i] = y;
    } else {
      const double a = value[node.inputs[0]];
      const double b = Arity(node.op) == 2 ? value[node.inputs[1]] : 0.0;
      value[i] = Apply(node.op, a, b);
    }
  }
  return value[g.output_slot];
}

SampleArray EvaluateOutputs(const ProgramGraph& g, const SymRegTask& task) {
  const std::vector<bool> active = ActiveMask(g);
  std::vector<SampleArray> value(g.output_slot + 1);
  for (int i = 0; i <= g.output_slot; ++i) {
    if (!active[i]) continue;
    const Node& node = g.slots[i];
    if (node.op == OpKind::kInputX) {
      value[i] = task.xs();
    } else if (node.op == OpKind::kInputY) {
      value[i] = task.ys();
    } else if (Arity(node.op) == 1) {
      value[i] = ApplyArray(node.op, value[node.inputs[0]],
                            value[node.inputs[0]]);
    } else {
      value[i] = ApplyArray(node.op, value[node.inputs[0]],
                            value[node.inputs[1]]);
    }
  }
  return value[g.output_slot];
}

double FlipAndSquash(double rmse) {
  if (!std::isfinite(rmse)) return 0.0;
  return 1.0 - (2.0 / std::numbers::pi) * std::atan(rmse * std::numbers::pi / 2.0);
}

FitnessRecord FitnessFromOutputs(const SampleArray& outputs,
                                 const SymRegTask& task) {
  FitnessRecord rec;
  const SampleArray diff = outputs - task.targets();
  if (!diff.allFinite()) {
    rec.rmse = std::numeric_limits<double>::infinity();
    rec.fitness = 0.0;
    return rec;
  }
  rec.rmse = std::sqrt(diff.square().mean());
  if (!std::isfinite(rec.rmse)) {
    rec.rmse = std::numeric_limits<double>::infinity();
  }
  rec.fitness = FlipAndSquash(rec.rmse);
  return rec;
}

FitnessRecord Fitness(const ProgramGraph& g, const SymRegTask& task) {
  return FitnessFromOutputs(EvaluateOutputs(g, task), task);
}

std::uint64_t FunctionalHash(const SampleArray& outputs) {
  std::uint64_t h = 0xfec0fec0ULL;
  for (int i = 0; i < kNumSamplePoints; ++i) {
    const double v = outputs[i];
    std::uint64_t word;
    if (std::isnan(v)) {
      word = 0x7ff8dead00000001ULL;
    } else if (std::isinf(v)) {
      word = v > 0 ? 0x7ff0dead00000002ULL : 0xfff0dead00000003ULL;
    } else {
      double r = std::nearbyint(v * 1e10);
      if (r == 0.0) r = 0.0;  // folds -0 into +0
      word = std::isfinite(r) ? std::bit_cast<std::uint64_t>(r)
                              : (r > 0 ? 0x7ff0beef00000004ULL
                                       : 0xfff0beef00000005ULL);
    }
    h = HashCombine(h, word);
  }
  return h;
}

ProgramGraph RandomGraph(int num_inputs, Rng& rng, int max_slots) {
  ProgramGraph g = MakeInputGraph(num_inputs, max_slots);
  while (g.size() < max_slots) {
    const int slot = g.size();
    const OpKind op = OperatorAt(UniformInt(rng, 0, kNumOperators - 1));
    Node node{op, {-1, -1}};
    for (int k = 0; k < Arity(op); ++k) {
      node.inputs[k] = UniformInt(rng, 0, slot - 1);
    }
    g.slots.push_back(node);
  }
  g.output_slot = g.size() - 1;
  return g;
}

ProgramGraph RandomGraph(const SymRegTask& task, Rng& rng) {
  return RandomGraph(task.num_inputs(), rng, kDefaultMaxSlots);
}

std::optional<ProgramGraph> TryMove(const ProgramGraph& parent,
                                    MutationMove move, Rng& rng) {
  const int first_op_slot = parent.num_inputs;
  const int num_op_slots = parent.size() - first_op_slot;
  switch (move) {
    case MutationMove::kOpResample: {
      if (num_op_slots <= 0) return std::nullopt;
      ProgramGraph child = parent;
      const int slot = UniformInt(rng, first_op_slot, parent.size() - 1);
      Node& node = child.slots[slot];
      const OpKind op = DrawDifferentOperator(node.op, rng);
      const int arity = Arity(op);
      for (int k = 0; k < kMaxArity; ++k) {
        if (k >= arity) {
          node.inputs[k] = -1;
        } else if (node.inputs[k] < 0) {
          node.inputs[k] = UniformInt(rng, 0, slot - 1);
        }
      }
      node.op = op;
      return child;
    }
    case MutationMove::kEdgeRewire: {
      if (num_op_slots <= 0) return std::nullopt;
      for (int attempt = 0; attempt < kMoveRetries; ++attempt) {
        const int slot = UniformInt(rng, first_op_slot, parent.size() - 1);
        const Node& node = parent.slots[slot];
        const int edge = UniformInt(rng, 0, Arity(node.op) - 1);
        if (slot < 2) continue;  // slot 0 is the only earlier slot
        const int current = node.inputs[edge];
        int target = UniformInt(rng, 0, slot - 2);
        if (target >= current) ++target;
        ProgramGraph child = parent;
        child.slots[slot].inputs[edge] = target;
        return child;
      }
      return std::nullopt;
    }
    case MutationMove::kOutputMove: {
      if (parent.size() < 2) return std::nullopt;
      ProgramGraph child = parent;
      int target = UniformInt(rng, 0, parent.size() - 2);
      if (target >= parent.output_slot) ++target;
      child.output_slot = target;
      return child;
    }
  }
  return std::nullopt;
}

ProgramGraph MutateGraph(const ProgramGraph& parent, Rng& rng) {
  const auto move = static_cast<MutationMove>(UniformInt(rng, 0, 2));
  if (auto child = TryMove(parent, move, rng)) return *std::move(child);
  if (auto child = TryMove(parent, MutationMove::kOpResample, rng)) {
    return *std::move(child);
  }
  return parent;
}

}  // namespace pamevo
