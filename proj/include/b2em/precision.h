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

// Working precision for the base-2 exponential mechanism.
//
// Both strategies look only at public bounds, never at utilities, so the
// precision cannot leak anything about the data.

#ifndef B2EM_PRECISION_H_
#define B2EM_PRECISION_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "b2em/exact_arith.h"
#include "b2em/privacy_params.h"

namespace b2em {

enum class PrecisionStrategy { kTheoretical, kEmpirical };

absl::StatusOr<PrecisionStrategy> ParsePrecisionStrategy(absl::string_view s);
absl::string_view PrecisionStrategyName(PrecisionStrategy s);

struct PrecisionRequest {
  int64_t u_min = 0;
  int64_t u_max = 0;
  uint64_t o_max = 1;
  Eta eta;

  absl::Status Validate() const;
};

// (max(1,|u_min|) + max(1,|u_max|)) * z * (y + b_x) + o_max.
absl::StatusOr<long> TheoreticalPrecision(const PrecisionRequest& req);

// Tries every weight the mechanism can produce, each added to the ceiling of
// the largest possible total, at precision p. True iff all of it was exact.
//
// Weights are computed exactly as the mechanism computes them: b^(u - u_min)
// by repeated squaring with a fixed number of rounds. Shifting by u_min
// rescales every weight by the same power of the base and so leaves the
// sampling distribution unchanged, while keeping all weights in (0, 1].
bool CheckPrecision(const PrecisionRequest& req, long p);

// Smallest p in 1, 2, 4, ... for which CheckPrecision passes, capped at the
// theoretical precision (which always passes).
absl::StatusOr<long> EmpiricalPrecision(const PrecisionRequest& req);

absl::StatusOr<long> ComputePrecision(const PrecisionRequest& req,
                                      PrecisionStrategy strategy);

// The weight b^(u - u_min) for every u in [u_min, u_max], using
// bit_width(u_max - u_min) rounds of square-and-multiply each. Shared by the
// precision check and the mechanism so both perform identical arithmetic.
class WeightPowers {
 public:
  WeightPowers(const ExactValue& base, uint64_t span, ArithContext& ctx);
  // b^d for 0 <= d <= span.
  ExactValue Weight(uint64_t d, ArithContext& ctx) const;
  int rounds() const { return rounds_; }

 private:
  int rounds_;
  std::vector<ExactValue> squares_;
};

}  // namespace b2em

#endif  // B2EM_PRECISION_H_
