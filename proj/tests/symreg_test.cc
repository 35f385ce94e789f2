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
#include <limits>
#include <numbers>

#include "doctest.h"
#include "pamevo/csv.h"
#include "pamevo/symreg.h"

using namespace pamevo;

namespace {

// sin(x*x) * cos(x) - 1, built without constants as sin(x*x)*cos(x) - x/x.
ProgramGraph Nguyen5Graph() {
  ProgramGraph g = MakeInputGraph(1);
  const int xx = AddNode(g, OpKind::kMul, 0, 0);
  const int s = AddNode(g, OpKind::kSin, xx);
  const int c = AddNode(g, OpKind::kCos, 0);
  const int prod = AddNode(g, OpKind::kMul, s, c);
  const int one = AddNode(g, OpKind::kDiv, 0, 0);
  g.output_slot = AddNode(g, OpKind::kSub, prod, one);
  return g;
}

double Rms(const SampleArray& v) {
  double ss = 0.0;
  for (int i = 0; i < kNumSamplePoints; ++i) ss += v[i] * v[i];
  return std::sqrt(ss / kNumSamplePoints);
}

}  // namespace

TEST_CASE("task names") {
  CHECK(ParseTaskName("nguyen12") == TaskId::kNguyen12);
  CHECK(ParseTaskName("Nguyen-5") == TaskId::kNguyen5);
  CHECK(ParseTaskName("NGUYEN_7") == TaskId::kNguyen7);
  CHECK_THROWS_AS(ParseTaskName("nguyen4"), std::invalid_argument);
  for (TaskId id : {TaskId::kNguyen2, TaskId::kNguyen3, TaskId::kNguyen5,
                    TaskId::kNguyen7, TaskId::kNguyen12}) {
    CHECK(ParseTaskName(TaskName(id)) == id);
  }
}

TEST_CASE("target values") {
  CHECK(TargetValue(TaskId::kNguyen7, 0.0) == doctest::Approx(0.0));
  CHECK(TargetValue(TaskId::kNguyen12, 1.0, 1.0) == doctest::Approx(-0.5));
  CHECK(TargetValue(TaskId::kNguyen3, 1.0) == doctest::Approx(5.0));
  CHECK(TargetValue(TaskId::kNguyen2, 1.0) == doctest::Approx(4.0));
  CHECK(TargetValue(TaskId::kNguyen5, 0.0) == doctest::Approx(-1.0));
  const double x = 0.3;
  CHECK(TargetValue(TaskId::kNguyen5, x) ==
        doctest::Approx(std::sin(x * x) * std::cos(x) - 1.0));
}

TEST_CASE("sample points") {
  for (TaskId id : {TaskId::kNguyen2, TaskId::kNguyen3, TaskId::kNguyen5,
                    TaskId::kNguyen7, TaskId::kNguyen12}) {
    const SymRegTask task(id, 9);
    const Domain& d = task.domain();
    for (int i = 0; i < kNumSamplePoints; ++i) {
      for (double v : {task.xs()[i], task.num_inputs() == 2 ? task.ys()[i] : d.lo}) {
        if (d.open) {
          CHECK(v > d.lo);
          CHECK(v < d.hi);
        } else {
          CHECK(v >= d.lo);
          CHECK(v <= d.hi);
        }
      }
      CHECK(task.targets()[i] ==
            TargetValue(id, task.xs()[i], task.ys()[i]));
    }
    const SymRegTask again(id, 9);
    CHECK((task.xs() == again.xs()).all());
    const SymRegTask other(id, 10);
    CHECK_FALSE((task.xs() == other.xs()).all());
  }
  const SymRegTask n12(TaskId::kNguyen12, 0);
  CHECK(n12.num_inputs() == 2);
  CHECK(n12.domain().lo == 0.0);
  CHECK(n12.domain().hi == 1.0);
  CHECK(n12.domain().open);
  const SymRegTask n7(TaskId::kNguyen7, 0);
  CHECK(n7.domain().hi == 2.0);

  const CsvTable table = ParseCsv(n12.SamplePointsCsv());
  REQUIRE(table.size() == kNumSamplePoints + 1);
  CHECK(table[0] == std::vector<std::string>{"point_index", "x", "y", "target"});
  CHECK(std::stod(table[5][1]) == n12.xs()[4]);
}

TEST_CASE("graph evaluation") {
  ProgramGraph add = MakeInputGraph(1);
  add.output_slot = AddNode(add, OpKind::kAdd, 0, 0);
  CHECK(EvaluateGraph(add, 0.5) == 1.0);

  ProgramGraph div0 = MakeInputGraph(1);
  const int zero = AddNode(div0, OpKind::kSub, 0, 0);
  div0.output_slot = AddNode(div0, OpKind::kDiv, 0, zero);
  for (double x : {-0.7, 0.0, 0.3}) CHECK_FALSE(std::isfinite(EvaluateGraph(div0, x)));

  // x/x is nan at 0, so evaluate the target graph off zero and use the
  // closed form at zero via the chain without the constant.
  const ProgramGraph n5 = Nguyen5Graph();
  CHECK(EvaluateGraph(n5, 0.4) == doctest::Approx(TargetValue(TaskId::kNguyen5, 0.4)));
  ProgramGraph prod = n5;
  prod.output_slot = 4;
  CHECK(EvaluateGraph(prod, 0.0) - 1.0 == -1.0);

  ProgramGraph logneg = MakeInputGraph(1);
  logneg.output_slot = AddNode(logneg, OpKind::kLog, 0);
  CHECK_FALSE(std::isfinite(EvaluateGraph(logneg, -1.0)));
  ProgramGraph big = MakeInputGraph(1);
  const int e1 = AddNode(big, OpKind::kExp, 0);
  const int e2 = AddNode(big, OpKind::kExp, e1);
  big.output_slot = AddNode(big, OpKind::kExp, e2);
  CHECK_FALSE(std::isfinite(EvaluateGraph(big, 2.0)));

  ProgramGraph y = MakeInputGraph(2);
  y.output_slot = AddNode(y, OpKind::kSub, 0, 1);
  CHECK(EvaluateGraph(y, 0.25, 1.0) == -0.75);
}

TEST_CASE("vectorized evaluation matches scalar evaluation") {
  Rng rng(8);
  const SymRegTask task(TaskId::kNguyen12, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const ProgramGraph g = RandomGraph(task, rng);
    const SampleArray out = EvaluateOutputs(g, task);
    for (int i = 0; i < kNumSamplePoints; ++i) {
      const double s = EvaluateGraph(g, task.xs()[i], task.ys()[i]);
      // Eigen's packet math may differ from libm in the last ulps.
      if (std::isnan(s)) {
        CHECK(std::isnan(out[i]));
      } else if (std::isinf(s) || std::abs(s) > 1e300) {
        CHECK(((out[i] == s) || std::abs(out[i]) > 1e300));
      } else {
        CHECK(out[i] == doctest::Approx(s).epsilon(1e-9).scale(1.0));
      }
    }
  }
}

TEST_CASE("reused nodes evaluate once") {
  ProgramGraph g = MakeInputGraph(1);
  const int s = AddNode(g, OpKind::kSin, 0);
  g.output_slot = AddNode(g, OpKind::kSub, s, s);
  CHECK(EvaluateGraph(g, 0.7) == 0.0);
}

TEST_CASE("fitness") {
  const SymRegTask n2(TaskId::kNguyen2, 0);
  ProgramGraph zero = MakeInputGraph(1);
  zero.output_slot = AddNode(zero, OpKind::kSub, 0, 0);
  const double r = Rms(n2.targets());
  const FitnessRecord f = Fitness(zero, n2);
  CHECK(f.rmse == doctest::Approx(r).epsilon(1e-14));
  CHECK(f.fitness ==
        doctest::Approx(1.0 - (2.0 / std::numbers::pi) *
                                  std::atan(std::numbers::pi * r / 2.0)));

  const SymRegTask n5(TaskId::kNguyen5, 3);
  // The exact target scores 1 (x/x is 1 away from x = 0, which has
  // probability zero under the sampler).
  const FitnessRecord exact = Fitness(Nguyen5Graph(), n5);
  CHECK(exact.rmse < 1e-12);
  CHECK(exact.fitness == doctest::Approx(1.0));

  ProgramGraph div0 = MakeInputGraph(1);
  const int z = AddNode(div0, OpKind::kSub, 0, 0);
  div0.output_slot = AddNode(div0, OpKind::kDiv, 0, z);
  const FitnessRecord bad = Fitness(div0, n2);
  CHECK_FALSE(std::isfinite(bad.rmse));
  CHECK(bad.fitness == 0.0);
}

TEST_CASE("flip and squash is monotone and bounded") {
  CHECK(FlipAndSquash(0.0) == 1.0);
  CHECK(FlipAndSquash(std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(FlipAndSquash(std::numeric_limits<double>::quiet_NaN()) == 0.0);
  double prev = FlipAndSquash(0.0);
  for (double r = 1e-6; r < 1e6; r *= 1.37) {
    const double f = FlipAndSquash(r);
    CHECK(f < prev);
    CHECK(f > 0.0);
    prev = f;
  }
}

TEST_CASE("fitness stays in [0, 1] on random graphs") {
  Rng rng(12);
  for (TaskId id : {TaskId::kNguyen2, TaskId::kNguyen7, TaskId::kNguyen12}) {
    const SymRegTask task(id, 1);
    for (int i = 0; i < 2000; ++i) {
      const FitnessRecord f = Fitness(RandomGraph(task, rng), task);
      REQUIRE(f.fitness >= 0.0);
      REQUIRE(f.fitness <= 1.0);
      if (!std::isfinite(f.rmse)) REQUIRE(f.fitness == 0.0);
    }
  }
}

TEST_CASE("functional hash") {
  SampleArray a = SampleArray::LinSpaced(0.0, 1.0);
  SampleArray b = a + 1e-13;
  CHECK(FunctionalHash(a) == FunctionalHash(b));
  SampleArray c = a;
  c[3] += 1e-6;
  CHECK(FunctionalHash(a) != FunctionalHash(c));
  SampleArray z = SampleArray::Zero();
  SampleArray nz = -z;
  CHECK(FunctionalHash(z) == FunctionalHash(nz));
  SampleArray nan = a, inf = a;
  nan[0] = std::numeric_limits<double>::quiet_NaN();
  inf[0] = std::numeric_limits<double>::infinity();
  CHECK(FunctionalHash(nan) != FunctionalHash(inf));
  CHECK(FunctionalHash(nan) == FunctionalHash(nan));

  // x + x and 2x-by-construction agree on every point.
  const SymRegTask task(TaskId::kNguyen2, 0);
  ProgramGraph g1 = MakeInputGraph(1), g2 = MakeInputGraph(1);
  g1.output_slot = AddNode(g1, OpKind::kAdd, 0, 0);
  const int s = AddNode(g2, OpKind::kAdd, 0, 0);
  AddNode(g2, OpKind::kCos, s);
  g2.output_slot = s;
  CHECK(FunctionalHash(EvaluateOutputs(g1, task)) ==
        FunctionalHash(EvaluateOutputs(g2, task)));
}

TEST_CASE("random graph") {
  Rng a(99), b(99);
  for (int i = 0; i < 20; ++i) CHECK(RandomGraph(2, a) == RandomGraph(2, b));

  Rng rng(0);
  const ProgramGraph g = RandomGraph(2, rng);
  CHECK(g.size() == kDefaultMaxSlots);
  CHECK(g.output_slot == g.size() - 1);
  CHECK(IsValid(g));
}

TEST_CASE("random graph operator histogram is uniform") {
  Rng rng(2024);
  std::vector<double> counts(kNumOperators, 0.0);
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const ProgramGraph g = RandomGraph(1, rng);
    for (int s = g.num_inputs; s < g.size(); ++s) {
      counts[static_cast<int>(g.slots[s].op) - kFirstOperator] += 1.0;
      total += 1.0;
    }
  }
  const double p = 1.0 / kNumOperators;
  const double expected = total * p;
  const double sigma = std::sqrt(total * p * (1.0 - p));
  double chi2 = 0.0;
  for (double c : counts) {
    CHECK(std::abs(c - expected) < 3.0 * sigma);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 99.9% quantile of chi-square with 7 degrees of freedom.
  CHECK(chi2 < 24.32);
}

TEST_CASE("mutation keeps graphs valid") {
  Rng rng(77);
  for (int i = 0; i < 10000; ++i) {
    const ProgramGraph parent = RandomGraph(1 + i % 2, rng);
    const ProgramGraph copy = parent;
    const ProgramGraph child = MutateGraph(parent, rng);
    REQUIRE(IsValid(child));
    REQUIRE(parent == copy);
    CHECK(child.size() == parent.size());
  }
}

TEST_CASE("mutation moves") {
  Rng rng(4);
  ProgramGraph g = MakeInputGraph(1);
  const int s = AddNode(g, OpKind::kSin, 0);
  g.output_slot = s;

  SUBCASE("degenerate rewire is resampled into an op change") {
    CHECK_FALSE(TryMove(g, MutationMove::kEdgeRewire, rng).has_value());
    for (int i = 0; i < 50; ++i) {
      const ProgramGraph child = MutateGraph(g, rng);
      CHECK(IsValid(child));
    }
  }
  SUBCASE("op resample changes exactly one op") {
    for (int i = 0; i < 200; ++i) {
      const auto child = TryMove(g, MutationMove::kOpResample, rng);
      REQUIRE(child.has_value());
      CHECK(child->slots[s].op != OpKind::kSin);
      CHECK(IsValid(*child));
    }
  }
  SUBCASE("output move picks a different slot") {
    for (int i = 0; i < 50; ++i) {
      const auto child = TryMove(g, MutationMove::kOutputMove, rng);
      REQUIRE(child.has_value());
      CHECK(child->output_slot == 0);
    }
  }
  SUBCASE("rewire changes exactly one edge") {
    Rng r(10);
    const ProgramGraph parent = RandomGraph(1, r);
    for (int i = 0; i < 200; ++i) {
      const auto child = TryMove(parent, MutationMove::kEdgeRewire, r);
      REQUIRE(child.has_value());
      int changed = 0;
      for (int k = 0; k < parent.size(); ++k) {
        CHECK(child->slots[k].op == parent.slots[k].op);
        for (int e = 0; e < kMaxArity; ++e) {
          changed += child->slots[k].inputs[e] != parent.slots[k].inputs[e];
        }
      }
      CHECK(changed == 1);
    }
  }
  SUBCASE("determinism") {
    Rng r1(5), r2(5);
    const ProgramGraph parent = RandomGraph(2, r1);
    RandomGraph(2, r2);
    for (int i = 0; i < 100; ++i) CHECK(MutateGraph(parent, r1) == MutateGraph(parent, r2));
  }
}
