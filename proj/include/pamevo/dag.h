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

#ifndef PAMEVO_DAG_H_
#define PAMEVO_DAG_H_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pamevo {

// Node operations. Inputs come first so that `kFirstOperator` splits the
// enumeration into leaves and the eight evolvable operators.
enum class OpKind : std::uint8_t {
  kInputX = 0,
  kInputY,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kSin,
  kCos,
  kExp,
  kLog,
};

inline constexpr int kNumOpKinds = 10;
inline constexpr int kFirstOperator = static_cast<int>(OpKind::kAdd);
inline constexpr int kNumOperators = kNumOpKinds - kFirstOperator;
inline constexpr int kMaxArity = 2;
inline constexpr int kDefaultMaxSlots = 15;

constexpr int Arity(OpKind op) {
  switch (op) {
    case OpKind::kInputX:
    case OpKind::kInputY:
      return 0;
    case OpKind::kSin:
    case OpKind::kCos:
    case OpKind::kExp:
    case OpKind::kLog:
      return 1;
    default:
      return 2;
  }
}

constexpr bool IsInput(OpKind op) { return Arity(op) == 0; }

constexpr OpKind OperatorAt(int i) {
  return static_cast<OpKind>(kFirstOperator + i);
}

std::string_view OpName(OpKind op);
std::optional<OpKind> ParseOpName(std::string_view name);

struct Node {
  OpKind op = OpKind::kInputX;
  // Only the first Arity(op) entries are meaningful; the rest stay -1.
  std::array<int, kMaxArity> inputs = {-1, -1};

  friend bool operator==(const Node&, const Node&) = default;
};

// A fixed-slot DAG program. Edges always point from a lower slot index to a
// higher one, so every graph satisfying Validate() is acyclic.
struct ProgramGraph {
  std::vector<Node> slots;
  int num_inputs = 1;
  int output_slot = 0;
  int max_slots = kDefaultMaxSlots;

  int size() const { return static_cast<int>(slots.size()); }

  friend bool operator==(const ProgramGraph&, const ProgramGraph&) = default;
};

// Graph holding only the input slots, with the output on slot 0.
ProgramGraph MakeInputGraph(int num_inputs, int max_slots = kDefaultMaxSlots);

// Appends a node and returns its slot index. Does not validate.
int AddNode(ProgramGraph& g, OpKind op, int in0 = -1, int in1 = -1);

// Returns a description of the first violated invariant, or nullopt.
std::optional<std::string> Validate(const ProgramGraph& g);
bool IsValid(const ProgramGraph& g);

// Slots reachable backwards from the output slot, sorted ascending.
std::vector<int> ActiveSubgraph(const ProgramGraph& g);

// Mask form of ActiveSubgraph, one entry per slot.
std::vector<bool> ActiveMask(const ProgramGraph& g);

// 5-round Weisfeiler-Lehman digest of the active subgraph. Invariant under
// relabelings of slots that preserve the active subgraph's ops and ordered
// input edges.
std::uint64_t StructuralHash(const ProgramGraph& g);

// Reorders slots: new_order[k] is the old index of the slot placed at k. The
// order must keep input slots in place and list every node after its inputs.
ProgramGraph PermuteSlots(const ProgramGraph& g,
                          const std::vector<int>& new_order);

// Text form: one "<slot> <OP> [<in0> [<in1>]]" line per slot, then "OUT <k>".
std::string Serialize(const ProgramGraph& g);

class GraphFormatError : public std::runtime_error {
 public:
  enum class Kind {
    kSyntax,
    kUnknownOp,
    kArityMismatch,
    kForwardEdge,
    kOutputOutOfRange,
    kBadInputLayout,
  };
  GraphFormatError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Parses the Serialize() format. Throws GraphFormatError.
ProgramGraph Deserialize(std::string_view text);

// Infix rendering of the active expression, e.g. "(x + sin(x))".
std::string ToExpression(const ProgramGraph& g);

}  // namespace pamevo

#endif  // PAMEVO_DAG_H_
