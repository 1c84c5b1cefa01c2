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

// Floating-point attacks on a textbook exponential mechanism.
//
// NaiveExpMech is the usual double-precision implementation: weights
// exp(-(eps/2) u), normalized running sums, and a uniform threshold. Two
// sensitivity-1 utility functions let an observer tell whether a record is
// present from a single output:
//
//   zero-rounding       u(o_1) = x and the rest x + 1, against all x. Chosen
//                       so exp(-(eps/2)(x+1)) underflows to 0.
//   truncated addition  u(o_1) = x_l and the rest x_s + 1, against
//                       u(o_1) = x_l + 1 and the rest x_s. The small weights
//                       vanish when added to the large one, yet all stay
//                       positive.
//
// The same utility pairs can be fed to the exact mechanism after a fixed,
// data-independent shift, which bounds the two arms' probability ratio by
// 2^(2 eta).
//
// Everything inexact in this library lives here.

#ifndef B2EM_ATTACKS_H_
#define B2EM_ATTACKS_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "b2em/mechanism.h"
#include "b2em/privacy_params.h"
#include "b2em/sampling.h"

namespace b2em {

// Index chosen by the textbook mechanism, or nullopt if the threshold scan
// falls off the end (possible when the normalized sums never reach 1).
std::optional<size_t> NaiveExpMech(double eps,
                                   std::span<const double> utilities,
                                   std::mt19937_64& rng);

// Largest integer x with exp(-(eps/2) x) > 0 in doubles; for it,
// exp(-(eps/2)(x+1)) == 0. Requires eps > 0.
int64_t FindZeroRoundingX(double eps);

struct TruncationParams {
  double eps = 0;
  double x_l = 0;
  double x_s = 0;
  // Number of small-weight outcomes; the outcome set has k + 1 elements.
  uint64_t k = 0;
};

// Searches k = 2, 4, 8, ... with k + 1 <= max_outcomes, x_l = 0 and
// x_s = 1 + ln(k) / (eps/2), so that k small weights together roughly match
// exp(-(eps/2)(x_l+1)). Returns the first k for which adding k copies of
// exp(-(eps/2)(x_s+1)) to exp(-(eps/2) x_l) leaves it unchanged in doubles,
// or nullopt if none does.
std::optional<TruncationParams> FindTruncationParams(double eps,
                                                     uint64_t max_outcomes);

// True if the defining identity holds bit for bit.
bool VerifyTruncation(const TruncationParams& params);

enum class AttackTarget { kNaive, kExact };
absl::StatusOr<AttackTarget> ParseAttackTarget(absl::string_view s);

// Utilities of both arms. `in` is the arm where the record is present.
struct AttackArms {
  std::vector<double> in;
  std::vector<double> out;
};
AttackArms ZeroRoundingArms(int64_t x, uint64_t n_outcomes);
AttackArms TruncationArms(const TruncationParams& params);

struct AttackReport {
  std::string attack;
  std::string target;
  uint64_t trials = 0;
  // Correct guesses over both arms (2 * trials runs in total). The guess is
  // "present" iff the output is o_1.
  uint64_t correct = 0;
  double freq_in = 0;
  double freq_out = 0;
  // freq_in - freq_out, in [-1, 1].
  double advantage = 0;
  // Exact-target only: the mechanism's epsilon in base e.
  double epsilon = 0;
};

struct ExactTargetOptions {
  Eta eta;
  SampleOptions sample;
};

// The exact mechanism an attack is run against, with both arms shifted by
// -min(in-arm utilities), a constant the attacker picked rather than data.
// Utilities are clamped to [0, ceil(max shifted utility)].
struct ExactTarget {
  AttackArms shifted;
  ExponentialMechanism mechanism;
};

absl::StatusOr<ExactTarget> MakeExactTarget(const AttackArms& arms,
                                            const ExactTargetOptions& opts);

// Runs each arm `trials` times. The exact target is MakeExactTarget's.
absl::StatusOr<AttackReport> RunAttack(absl::string_view name,
                                       const AttackArms& arms, double eps,
                                       uint64_t trials, AttackTarget target,
                                       uint64_t seed,
                                       const ExactTargetOptions& exact = {});

absl::StatusOr<AttackReport> RunAttackZero(double eps, uint64_t n_outcomes,
                                           uint64_t trials,
                                           AttackTarget target, uint64_t seed,
                                           const ExactTargetOptions& exact = {});

absl::StatusOr<AttackReport> RunAttackTruncated(
    const TruncationParams& params, uint64_t trials, AttackTarget target,
    uint64_t seed, const ExactTargetOptions& exact = {});

}  // namespace b2em

#endif  // B2EM_ATTACKS_H_
