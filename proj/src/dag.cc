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

#include "pamevo/dag.h"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "pamevo/random.h"

namespace pamevo {

namespace {

constexpr std::array<std::string_view, kNumOpKinds> kOpNames = {
    "INPUT_X", "INPUT_Y", "ADD", "SUB", "MUL",
    "DIV",     "SIN",     "COS", "EXP", "LOG",
};

constexpr int kWlRounds = 5;

std::optional<int> ParseInt(std::string_view token) {
  int value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r') {
      ++j;
    }
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string_view OpName(OpKind op) { return kOpNames[static_cast<int>(op)]; }

std::optional<OpKind> ParseOpName(std::string_view name) {
  for (int i = 0; i < kNumOpKinds; ++i) {
    if (kOpNames[i] == name) return static_cast<OpKind>(i);
  }
  return std::nullopt;
}

ProgramGraph MakeInputGraph(int num_inputs, int max_slots) {
  ProgramGraph g;
  g.num_inputs = num_inputs;
  g.max_slots = max_slots;
  g.slots.push_back(Node{OpKind::kInputX, {-1, -1}});
  if (num_inputs == 2) g.slots.push_back(Node{OpKind::kInputY, {-1, -1}});
  g.output_slot = 0;
  return g;
}

int AddNode(ProgramGraph& g, OpKind op, int in0, int in1) {
  Node node{op, {-1, -1}};
  if (Arity(op) >= 1) node.inputs[0] = in0;
  if (Arity(op) >= 2) node.inputs[1] = in1;
  g.slots.push_back(node);
  return g.size() - 1;
}

std::optional<std::string> Validate(const ProgramGraph& g) {
  if (g.num_inputs != 1 && g.num_inputs != 2) {
    return "num_inputs must be 1 or 2";
  }
  if (g.size() < g.num_inputs) return "missing input slots";
  if (g.size() > g.max_slots) return "slot count exceeds max_slots";
  for (int i = 0; i < g.size(); ++i) {
    const Node& node = g.slots[i];
    const bool want_input = i < g.num_inputs;
    if (want_input) {
      const OpKind expected = i == 0 ? OpKind::kInputX : OpKind::kInputY;
      if (node.op != expected) {
        return "slot " + std::to_string(i) + " must be " +
               std::string(OpName(expected));
      }
    } else if (IsInput(node.op)) {
      return "input op on non-input slot " + std::to_string(i);
    }
    const int arity = Arity(node.op);
    for (int k = 0; k < kMaxArity; ++k) {
      const int src = node.inputs[k];
      if (k >= arity) {
        if (src != -1) return "extra input on slot " + std::to_string(i);
        continue;
      }
      if (src < 0 || src >= i) {
        return "slot " + std::to_string(i) + " input " + std::to_string(k) +
               " is not a strictly earlier slot";
      }
    }
  }
  if (g.output_slot < 0 || g.output_slot >= g.size()) {
    return "output_slot out of range";
  }
  return std::nullopt;
}

bool IsValid(const ProgramGraph& g) { return !Validate(g).has_value(); }

std::vector<bool> ActiveMask(const ProgramGraph& g) {
  std::vector<bool> active(g.slots.size(), false);
  active[g.output_slot] = true;
  // Edges point backwards, so one descending sweep visits every ancestor.
  for (int i = g.output_slot; i >= 0; --i) {
    if (!active[i]) continue;
    const Node& node = g.slots[i];
    for (int k = 0; k < Arity(node.op); ++k) active[node.inputs[k]] = true;
  }
  return active;
}

std::vector<int> ActiveSubgraph(const ProgramGraph& g) {
  const std::vector<bool> mask = ActiveMask(g);
  std::vector<int> out;
  for (int i = 0; i < g.size(); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}

std::uint64_t StructuralHash(const ProgramGraph& g) {
  const std::vector<int> active = ActiveSubgraph(g);
  const int n = g.size();
  std::vector<std::uint64_t> label(n, 0), next(n, 0);
  // consumers[v] holds (position, consumer slot) for active consumers only.
  std::vector<std::vector<std::pair<int, int>>> consumers(n);
  for (int v : active) {
    const Node& node = g.slots[v];
    const int arity = Arity(node.op);
    label[v] = HashCombine(static_cast<std::uint64_t>(node.op) + 1, arity);
    for (int k = 0; k < arity; ++k) consumers[node.inputs[k]].push_back({k, v});
  }

  std::vector<std::uint64_t> scratch;
  for (int round = 0; round < kWlRounds; ++round) {
    for (int v : active) {
      const Node& node = g.slots[v];
      std::uint64_t h = HashCombine(label[v], 0x1111);
      for (int k = 0; k < Arity(node.op); ++k) {
        h = HashCombine(h, HashCombine(k, label[node.inputs[k]]));
      }
      scratch.clear();
      for (auto [pos, consumer] : consumers[v]) {
        scratch.push_back(HashCombine(pos, label[consumer]));
      }
      std::sort(scratch.begin(), scratch.end());
      h = HashCombine(h, 0x2222);
      for (std::uint64_t s : scratch) h = HashCombine(h, s);
      next[v] = h;
    }
    for (int v : active) label[v] = next[v];
  }

  scratch.clear();
  for (int v : active) scratch.push_back(label[v]);
  std::sort(scratch.begin(), scratch.end());
  std::uint64_t digest = HashCombine(g.num_inputs, label[g.output_slot]);
  for (std::uint64_t s : scratch) digest = HashCombine(digest, s);
  return digest;
}

ProgramGraph PermuteSlots(const ProgramGraph& g,
                          const std::vector<int>& new_order) {
  if (static_cast<int>(new_order.size()) != g.size()) {
    throw std::invalid_argument("PermuteSlots: order size mismatch");
  }
  std::vector<int> new_index(g.size(), -1);
  for (int k = 0; k < g.size(); ++k) {
    const int old = new_order[k];
    if (old < 0 || old >= g.size() || new_index[old] != -1) {
      throw std::invalid_argument("PermuteSlots: not a permutation");
    }
    new_index[old] = k;
  }
  ProgramGraph out = g;
  for (int k = 0; k < g.size(); ++k) {
    Node node = g.slots[new_order[k]];
    for (int j = 0; j < Arity(node.op); ++j) {
      node.inputs[j] = new_index[node.inputs[j]];
    }
    out.slots[k] = node;
  }
  out.output_slot = new_index[g.output_slot];
  if (auto err = Validate(out)) {
    throw std::invalid_argument("PermuteSlots: " + *err);
  }
  return out;
}

std::string Serialize(const ProgramGraph& g) {
  std::ostringstream out;
  for (int i = 0; i < g.size(); ++i) {
    const Node& node = g.slots[i];
    out << i << ' ' << OpName(node.op);
    for (int k = 0; k < Arity(node.op); ++k) out << ' ' << node.inputs[k];
    out << '\n';
  }
  out << "OUT " << g.output_slot << '\n';
  return out.str();
}

ProgramGraph Deserialize(std::string_view text) {
  using Kind = GraphFormatError::Kind;
  ProgramGraph g;
  g.slots.clear();
  std::optional<int> output;

  size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto tokens = SplitWhitespace(line);
    if (tokens.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (output) throw GraphFormatError(Kind::kSyntax, where + "data after OUT");

    if (tokens[0] == "OUT") {
      if (tokens.size() != 2) {
        throw GraphFormatError(Kind::kSyntax, where + "malformed OUT line");
      }
      auto slot = ParseInt(tokens[1]);
      if (!slot) throw GraphFormatError(Kind::kSyntax, where + "bad OUT index");
      output = *slot;
      continue;
    }

    auto index = ParseInt(tokens[0]);
    if (!index) throw GraphFormatError(Kind::kSyntax, where + "bad slot index");
    if (*index != g.size()) {
      throw GraphFormatError(Kind::kSyntax,
                             where + "slot indices must be sequential");
    }
    if (tokens.size() < 2) {
      throw GraphFormatError(Kind::kSyntax, where + "missing op name");
    }
    auto op = ParseOpName(tokens[1]);
    if (!op) {
      throw GraphFormatError(Kind::kUnknownOp,
                             where + "unknown op \"" +
                                 std::string(tokens[1]) + "\"");
    }
    const int arity = Arity(*op);
    if (static_cast<int>(tokens.size()) - 2 != arity) {
      throw GraphFormatError(Kind::kArityMismatch,
                             where + "arity mismatch for " +
                                 std::string(OpName(*op)) + ": expected " +
                                 std::to_string(arity) + " inputs");
    }
    Node node{*op, {-1, -1}};
    for (int k = 0; k < arity; ++k) {
      auto src = ParseInt(tokens[2 + k]);
      if (!src || *src < 0) {
        throw GraphFormatError(Kind::kSyntax, where + "bad input index");
      }
      if (*src >= *index) {
        throw GraphFormatError(Kind::kForwardEdge,
                               where + "forward edge from slot " +
                                   std::to_string(*src) + " into slot " +
                                   std::to_string(*index));
      }
      node.inputs[k] = *src;
    }
    g.slots.push_back(node);
  }

  if (!output) throw GraphFormatError(Kind::kSyntax, "missing OUT line");
  if (*output < 0 || *output >= g.size()) {
    throw GraphFormatError(Kind::kOutputOutOfRange,
                           "output slot " + std::to_string(*output) +
                               " out of range");
  }
  g.output_slot = *output;
  g.num_inputs =
      g.size() > 1 && g.slots[1].op == OpKind::kInputY ? 2 : 1;
  g.max_slots = std::max(g.size(), kDefaultMaxSlots);
  if (auto err = Validate(g)) {
    throw GraphFormatError(Kind::kBadInputLayout, *err);
  }
  return g;
}

std::string ToExpression(const ProgramGraph& g) {
  std::vector<std::string> expr(g.slots.size());
  for (int i = 0; i <= g.output_slot; ++i) {
    const Node& node = g.slots[i];
    auto in = [&](int k) -> const std::string& { return expr[node.inputs[k]]; };
    switch (node.op) {
      case OpKind::kInputX: expr[i] = "x"; break;
      case OpKind::kInputY: expr[i] = "y"; break;
      case OpKind::kAdd: expr[i] = "(" + in(0) + " + " + in(1) + ")"; break;
      case OpKind::kSub: expr[i] = "(" + in(0) + " - " + in(1) + ")"; break;
      case OpKind::kMul: expr[i] = "(" + in(0) + " * " + in(1) + ")"; break;
      case OpKind::kDiv: expr[i] = "(" + in(0) + " / " + in(1) + ")"; break;
      case OpKind::kSin: expr[i] = "sin(" + in(0) + ")"; break;
      case OpKind::kCos: expr[i] = "cos(" + in(0) + ")"; break;
      case OpKind::kExp: expr[i] = "exp(" + in(0) + ")"; break;
      case OpKind::kLog: expr[i] = "log(" + in(0) + ")"; break;
    }
  }
  return expr[g.output_slot];
}

}  // namespace pamevo
