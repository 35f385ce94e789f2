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

#include <algorithm>
#include <set>
#include <string>

#include "doctest.h"
#include "pamevo/dag.h"
#include "pamevo/random.h"
#include "pamevo/symreg.h"

using namespace pamevo;

namespace {

// ADD(x, SIN(x)) with padding in front of the SIN.
ProgramGraph AddSin(bool sin_first) {
  ProgramGraph g = MakeInputGraph(1);
  if (sin_first) {
    const int s = AddNode(g, OpKind::kSin, 0);
    AddNode(g, OpKind::kCos, 0);
    g.output_slot = AddNode(g, OpKind::kAdd, 0, s);
  } else {
    AddNode(g, OpKind::kCos, 0);
    const int s = AddNode(g, OpKind::kSin, 0);
    g.output_slot = AddNode(g, OpKind::kAdd, 0, s);
  }
  return g;
}

// Random order with inputs fixed and every node after its inputs.
std::vector<int> RandomTopologicalOrder(const ProgramGraph& g, Rng& rng) {
  const int n = g.size();
  std::vector<int> order;
  std::vector<bool> placed(n, false);
  for (int i = 0; i < g.num_inputs; ++i) {
    order.push_back(i);
    placed[i] = true;
  }
  while (static_cast<int>(order.size()) < n) {
    std::vector<int> ready;
    for (int i = g.num_inputs; i < n; ++i) {
      if (placed[i]) continue;
      bool ok = true;
      for (int k = 0; k < Arity(g.slots[i].op); ++k) {
        ok = ok && placed[g.slots[i].inputs[k]];
      }
      if (ok) ready.push_back(i);
    }
    const int pick = ready[UniformInt(rng, 0, static_cast<int>(ready.size()) - 1)];
    placed[pick] = true;
    order.push_back(pick);
  }
  return order;
}

}  // namespace

TEST_CASE("op arity table") {
  CHECK(Arity(OpKind::kInputX) == 0);
  CHECK(Arity(OpKind::kInputY) == 0);
  for (OpKind op : {OpKind::kAdd, OpKind::kSub, OpKind::kMul, OpKind::kDiv}) {
    CHECK(Arity(op) == 2);
  }
  for (OpKind op : {OpKind::kSin, OpKind::kCos, OpKind::kExp, OpKind::kLog}) {
    CHECK(Arity(op) == 1);
  }
  CHECK(kNumOperators == 8);
  for (int i = 0; i < kNumOperators; ++i) CHECK_FALSE(IsInput(OperatorAt(i)));
  for (int i = 0; i < kNumOpKinds; ++i) {
    const OpKind op = static_cast<OpKind>(i);
    CHECK(ParseOpName(OpName(op)) == op);
  }
  CHECK_FALSE(ParseOpName("TAN").has_value());
}

TEST_CASE("validate catches broken invariants") {
  ProgramGraph g = MakeInputGraph(2);
  CHECK(IsValid(g));
  AddNode(g, OpKind::kAdd, 0, 1);
  g.output_slot = 2;
  CHECK(IsValid(g));

  ProgramGraph fwd = g;
  fwd.slots[2].inputs[1] = 2;
  CHECK_FALSE(IsValid(fwd));

  ProgramGraph out = g;
  out.output_slot = 3;
  CHECK_FALSE(IsValid(out));

  ProgramGraph layout = g;
  layout.slots[1].op = OpKind::kInputX;
  CHECK_FALSE(IsValid(layout));

  ProgramGraph arity = g;
  arity.slots[2].inputs[1] = -1;
  CHECK_FALSE(IsValid(arity));

  ProgramGraph full = MakeInputGraph(1, 3);
  AddNode(full, OpKind::kSin, 0);
  AddNode(full, OpKind::kSin, 1);
  CHECK(IsValid(full));
  AddNode(full, OpKind::kSin, 2);
  CHECK_FALSE(IsValid(full));
}

TEST_CASE("active subgraph") {
  SUBCASE("output on the input") {
    ProgramGraph g = MakeInputGraph(1);
    AddNode(g, OpKind::kSin, 0);
    g.output_slot = 0;
    CHECK(ActiveSubgraph(g) == std::vector<int>{0});
  }
  SUBCASE("chain with unused slots") {
    ProgramGraph g = MakeInputGraph(1);
    const int s = AddNode(g, OpKind::kSin, 0);
    AddNode(g, OpKind::kCos, 0);
    AddNode(g, OpKind::kExp, s);
    AddNode(g, OpKind::kMul, 0, 0);
    g.output_slot = s;
    CHECK(ActiveSubgraph(g) == std::vector<int>{0, s});
    const std::vector<bool> mask = ActiveMask(g);
    CHECK(std::count(mask.begin(), mask.end(), true) == 2);
  }
  SUBCASE("diamond") {
    ProgramGraph g = MakeInputGraph(1);
    AddNode(g, OpKind::kCos, 0);
    const int m = AddNode(g, OpKind::kMul, 0, 0);
    g.output_slot = AddNode(g, OpKind::kAdd, m, 0);
    CHECK(ActiveSubgraph(g) == std::vector<int>{0, 2, 3});
  }
}

TEST_CASE("structural hash") {
  CHECK(StructuralHash(AddSin(true)) == StructuralHash(AddSin(false)));

  ProgramGraph add = MakeInputGraph(1), mul = MakeInputGraph(1);
  add.output_slot = AddNode(add, OpKind::kAdd, 0, 0);
  mul.output_slot = AddNode(mul, OpKind::kMul, 0, 0);
  CHECK(StructuralHash(add) != StructuralHash(mul));

  ProgramGraph a = MakeInputGraph(1), b = MakeInputGraph(1);
  const int sa = AddNode(a, OpKind::kSin, 0);
  a.output_slot = AddNode(a, OpKind::kSub, 0, sa);
  const int sb = AddNode(b, OpKind::kSin, 0);
  b.output_slot = AddNode(b, OpKind::kSub, sb, 0);
  CHECK(StructuralHash(a) != StructuralHash(b));

  // Changing an inactive slot leaves the digest alone.
  ProgramGraph c = AddSin(false);
  const std::uint64_t before = StructuralHash(c);
  c.slots[1].op = OpKind::kLog;
  CHECK(StructuralHash(c) == before);
}

TEST_CASE("structural hash survives slot permutations") {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const ProgramGraph g = RandomGraph(1 + trial % 2, rng);
    const ProgramGraph p = PermuteSlots(g, RandomTopologicalOrder(g, rng));
    REQUIRE(IsValid(p));
    CHECK(StructuralHash(p) == StructuralHash(g));
    CHECK(ActiveSubgraph(p).size() == ActiveSubgraph(g).size());
  }
}

TEST_CASE("permute slots rejects invalid orders") {
  ProgramGraph g = AddSin(true);
  CHECK_THROWS_AS(PermuteSlots(g, {0, 3, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(PermuteSlots(g, {0, 1, 1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(PermuteSlots(g, {1, 0, 2, 3}), std::invalid_argument);
  const ProgramGraph ok = PermuteSlots(g, {0, 2, 1, 3});
  CHECK(ok.slots[1].op == OpKind::kCos);
  CHECK(ok.slots[3].inputs[1] == 2);
}

TEST_CASE("serialize format") {
  ProgramGraph g = MakeInputGraph(2);
  const int s = AddNode(g, OpKind::kSin, 1);
  g.output_slot = AddNode(g, OpKind::kDiv, 0, s);
  CHECK(Serialize(g) == "0 INPUT_X\n1 INPUT_Y\n2 SIN 1\n3 DIV 0 2\nOUT 3\n");
  CHECK(Deserialize(Serialize(g)) == g);
  CHECK(ToExpression(g) == "(x / sin(y))");
}

TEST_CASE("serialize round trip on random graphs") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const ProgramGraph g = RandomGraph(1 + i % 2, rng);
    const ProgramGraph back = Deserialize(Serialize(g));
    REQUIRE(back == g);
  }
}

TEST_CASE("deserialize diagnostics") {
  auto kind_of = [](const std::string& text) {
    try {
      Deserialize(text);
    } catch (const GraphFormatError& e) {
      return std::make_pair(e.kind(), std::string(e.what()));
    }
    FAIL("accepted " << text);
    return std::make_pair(GraphFormatError::Kind::kSyntax, std::string());
  };
  auto [k1, m1] = kind_of("0 INPUT_X\n1 SIN 0\n2 TAN 1\nOUT 2\n");
  CHECK(k1 == GraphFormatError::Kind::kUnknownOp);
  CHECK(m1.find("unknown op") != std::string::npos);

  auto [k2, m2] = kind_of("0 INPUT_X\n1 SIN 0\n2 COS 3\n3 SIN 0\nOUT 2\n");
  CHECK(k2 == GraphFormatError::Kind::kForwardEdge);
  CHECK(m2.find("forward edge") != std::string::npos);

  auto [k3, m3] = kind_of("0 INPUT_X\n1 ADD 0\nOUT 1\n");
  CHECK(k3 == GraphFormatError::Kind::kArityMismatch);
  CHECK(m3.find("arity mismatch") != std::string::npos);

  auto [k4, m4] = kind_of("0 INPUT_X\n1 SIN 0\nOUT 2\n");
  CHECK(k4 == GraphFormatError::Kind::kOutputOutOfRange);
  CHECK(m4.find("out of range") != std::string::npos);

  auto [k5, m5] = kind_of("0 INPUT_X\n1 SIN 0\n");
  CHECK(k5 == GraphFormatError::Kind::kSyntax);
  CHECK_FALSE(m5.empty());

  std::set<std::string> messages = {m1, m2, m3, m4};
  CHECK(messages.size() == 4);
}

TEST_CASE("random graphs only point backwards") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const ProgramGraph g = RandomGraph(1 + i % 2, rng);
    REQUIRE(IsValid(g));
    for (int s = 0; s < g.size(); ++s) {
      for (int k = 0; k < Arity(g.slots[s].op); ++k) {
        CHECK(g.slots[s].inputs[k] < s);
      }
    }
  }
}
