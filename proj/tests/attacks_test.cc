//
// Copyright 2026 The b2em Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "b2em/attacks.h"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracle.h"

namespace b2em {
namespace {

using testing::RoundedDistribution;
using testing::TableCache;

double FirstFrequency(double eps, const std::vector<double>& u, int n,
                      uint64_t seed) {
  std::mt19937_64 rng(seed);
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const std::optional<size_t> got = NaiveExpMech(eps, u, rng);
    hits += got.has_value() && *got == 0;
  }
  return static_cast<double>(hits) / n;
}

TEST(NaiveExpMechTest, Frequencies) {
  std::mt19937_64 rng(1);
  EXPECT_EQ(NaiveExpMech(1, std::vector<double>{5}, rng), 0u);
  EXPECT_NEAR(FirstFrequency(1, {0, 0}, 20000, 2), 0.5, 0.015);
  // e^-(eps/2) = 1/2.
  EXPECT_NEAR(FirstFrequency(2 * std::log(2.0), {0, 1}, 20000, 3), 2.0 / 3,
              0.015);
}

TEST(FindZeroRoundingXTest, BoundaryOfUnderflow) {
  for (double eps : {0.5, 1.0, 2.0, 7.5}) {
    const int64_t x = FindZeroRoundingX(eps);
    EXPECT_GT(std::exp(-(eps / 2) * static_cast<double>(x)), 0) << eps;
    EXPECT_EQ(std::exp(-(eps / 2) * static_cast<double>(x + 1)), 0) << eps;
  }
  // The smallest subnormal is about e^-744.4, and e^-745 still rounds to it.
  EXPECT_EQ(FindZeroRoundingX(2), 745);
  EXPECT_NEAR(static_cast<double>(FindZeroRoundingX(1)), 1489, 1);
}

TEST(ArmsTest, Layout) {
  const AttackArms z = ZeroRoundingArms(10, 4);
  EXPECT_EQ(z.in, (std::vector<double>{10, 11, 11, 11}));
  EXPECT_EQ(z.out, (std::vector<double>{10, 10, 10, 10}));

  const TruncationParams p{.eps = 1, .x_l = 0, .x_s = 3, .k = 2};
  const AttackArms t = TruncationArms(p);
  EXPECT_EQ(t.in, (std::vector<double>{0, 4, 4}));
  EXPECT_EQ(t.out, (std::vector<double>{1, 3, 3}));
}

TEST(TruncationTest, FindsAbsorbingK) {
  const std::optional<TruncationParams> p = FindTruncationParams(30, 4096);
  ASSERT_TRUE(p.has_value());
  EXPECT_LE(p->k + 1, 4096u);
  EXPECT_EQ(p->k & (p->k - 1), 0u);
  EXPECT_TRUE(VerifyTruncation(*p));
  // The small weights are all positive, yet vanish in the sum.
  EXPECT_GT(std::exp(-(p->eps / 2) * (p->x_s + 1)), 0);
  double sum = std::exp(-(p->eps / 2) * p->x_l);
  for (uint64_t i = 0; i < p->k; ++i) {
    sum += std::exp(-(p->eps / 2) * (p->x_s + 1));
  }
  EXPECT_EQ(sum, std::exp(-(p->eps / 2) * p->x_l));
}

TEST(TruncationTest, SmallEpsilonHasNoAttack) {
  EXPECT_FALSE(FindTruncationParams(1, 1000000).has_value());
  const TruncationParams p{.eps = 30, .x_l = 0, .x_s = 0, .k = 1};
  EXPECT_FALSE(VerifyTruncation(p));
}

TEST(AttackTest, ZeroRoundingBreaksNaiveOnly) {
  const double eps = 2;
  absl::StatusOr<AttackReport> naive =
      RunAttackZero(eps, 10, 2000, AttackTarget::kNaive, 5);
  ASSERT_TRUE(naive.ok()) << naive.status();
  // In-arm: o_1 is the only nonzero weight.
  EXPECT_EQ(naive->freq_in, 1.0);
  EXPECT_NEAR(naive->freq_out, 0.1, 0.03);
  EXPECT_GT(naive->advantage, 0.8);

  absl::StatusOr<AttackReport> exact =
      RunAttackZero(eps, 10, 2000, AttackTarget::kExact, 5);
  ASSERT_TRUE(exact.ok()) << exact.status();
  EXPECT_LT(exact->advantage, 0.3);
  EXPECT_EQ(exact->trials, 2000u);
}

// On the exact target, the probability of o_1 moves by at most 2^(2 eta)
// between arms, computed without sampling.
TEST(AttackTest, ExactTargetRatioIsBounded) {
  for (uint64_t n : {2u, 5u, 40u}) {
    const AttackArms arms = ZeroRoundingArms(FindZeroRoundingX(2), n);
    absl::StatusOr<ExactTarget> t = MakeExactTarget(arms, {});
    ASSERT_TRUE(t.ok()) << t.status();
    EXPECT_EQ(*std::min_element(t->shifted.in.begin(), t->shifted.in.end()), 0);
    EXPECT_EQ(t->mechanism.config().u_min, 0);
    TableCache cache;
    const mpq_class in =
        (*RoundedDistribution(t->mechanism, t->shifted.in, cache))[0];
    const mpq_class out =
        (*RoundedDistribution(t->mechanism, t->shifted.out, cache))[0];
    EXPECT_LE(in, 4 * out);
    EXPECT_LE(out, 4 * in);
    EXPECT_GT(in, out);
  }
}

TEST(AttackTest, TruncationBreaksNaive) {
  const std::optional<TruncationParams> p = FindTruncationParams(30, 4096);
  ASSERT_TRUE(p.has_value());
  absl::StatusOr<AttackReport> r =
      RunAttackTruncated(*p, 500, AttackTarget::kNaive, 6);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->freq_in, 1.0);
  EXPECT_GT(r->advantage, 0.3);
}

TEST(AttackTest, ParseTarget) {
  EXPECT_EQ(*ParseAttackTarget("naive"), AttackTarget::kNaive);
  EXPECT_EQ(*ParseAttackTarget("exact"), AttackTarget::kExact);
  EXPECT_FALSE(ParseAttackTarget("both").ok());
}

}  // namespace
}  // namespace b2em
