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

// The base-2 exponential mechanism.
//
// Outcome i is returned with probability proportional to 2^(-eta * u_i),
// where u_i is the caller's utility clamped to [u_min, u_max] and rounded to
// an integer at random. All weight arithmetic is exact, so the output
// distribution is exactly the ideal one for the rounded utilities.
//
// Usage:
//
//   MechanismConfig cfg{.u_min = 0, .u_max = 10, .o_max = 10, .eta = eta};
//   auto mech = ExponentialMechanism::Create(cfg);   // reads no data
//   auto i = mech->SampleIndex(utilities, src);      // reads the data
//
// The caller is responsible for the sensitivity of the utilities; it is not
// checked here.
//
// Error codes beyond those of the sampler:
//   InvalidArgument  bad configuration, non-finite utility.
//   OutOfRange       more utilities than o_max.
//   Internal         an arithmetic step was inexact. Indicates a bug.

#ifndef B2EM_MECHANISM_H_
#define B2EM_MECHANISM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "absl/status/statusor.h"
#include "b2em/bit_source.h"
#include "b2em/exact_arith.h"
#include "b2em/precision.h"
#include "b2em/privacy_params.h"
#include "b2em/sampling.h"

namespace b2em {

struct MechanismConfig {
  int64_t u_min = 0;
  int64_t u_max = 0;
  uint64_t o_max = 1;
  Eta eta;
  SampleOptions sample;
  PrecisionStrategy precision_strategy = PrecisionStrategy::kTheoretical;
  // Bits in each randomized-rounding coin. Any value keeps the privacy
  // guarantee; more bits only make the rounding more accurate.
  int rounding_bits = 64;

  absl::Status Validate() const;
};

// min(max(lo, u), hi).
ExactValue Clamp(const ExactValue& u, int64_t lo, int64_t hi);

// ceil(u) with probability u - floor(u), otherwise floor(u). Always consumes
// exactly `bits` random bits, even for integral u. u must be finite and its
// floor must fit in 64 bits.
absl::StatusOr<int64_t> RandomizedRound(const ExactValue& u, BitSource& src,
                                        int bits = 64);

// RandomizedRound(Clamp(u, lo, hi)) for a double, in integer arithmetic.
// Consumes the same bits and returns the same value as the exact form.
absl::StatusOr<int64_t> ClampAndRound(double u, int64_t lo, int64_t hi,
                                      BitSource& src, int bits = 64);

// Per-call counters, used to check that control flow outside the rejection
// loop does not depend on the utilities.
struct MechanismStats {
  long precision = 0;
  uint64_t rounding_bits = 0;
  // Arithmetic operations in the weight phase and in the cumulative sums.
  uint64_t weight_ops = 0;
  uint64_t sum_ops = 0;
  uint64_t sampling_bits = 0;
  SampleStats sample;
};

class ExponentialMechanism {
 public:
  // Validates the configuration and fixes the working precision.
  static absl::StatusOr<ExponentialMechanism> Create(
      const MechanismConfig& cfg);

  const MechanismConfig& config() const { return cfg_; }
  long precision() const { return precision_; }

  absl::StatusOr<size_t> SampleIndex(std::span<const ExactValue> utilities,
                                     BitSource& src,
                                     MechanismStats* stats = nullptr) const;
  absl::StatusOr<size_t> SampleIndex(std::span<const double> utilities,
                                     BitSource& src,
                                     MechanismStats* stats = nullptr) const;

  // Evaluates `utility` on every outcome, then samples. `utility` returns
  // either an ExactValue or a double.
  template <typename Outcome, typename Utility>
  absl::StatusOr<Outcome> Sample(std::span<const Outcome> outcomes,
                                 Utility&& utility, BitSource& src) const {
    using R = std::invoke_result_t<Utility&, const Outcome&>;
    std::vector<R> values;
    values.reserve(outcomes.size());
    for (const Outcome& o : outcomes) values.push_back(utility(o));
    absl::StatusOr<size_t> i =
        SampleIndex(std::span<const R>(values.data(), values.size()), src);
    if (!i.ok()) return i.status();
    return outcomes[*i];
  }

  // The weight table the sampler uses once the utilities have been rounded
  // to `rounded`, each in [u_min, u_max]. For analysis and tests.
  absl::StatusOr<WeightTable> WeightsFor(
      std::span<const int64_t> rounded) const;

  // Base-e epsilon of the guarantee, 2 * ln(2) * eta. Report only.
  double ReportedEpsilon() const;

 private:
  ExponentialMechanism(const MechanismConfig& cfg, long precision)
      : cfg_(cfg), precision_(precision) {}

  absl::Status CheckSize(size_t n) const;
  // exponents[i] = rounded u_i - u_min. Fills the op counters of `local`.
  absl::StatusOr<WeightTable> BuildTable(std::span<const uint64_t> exponents,
                                         MechanismStats& local) const;
  // Everything after rounding.
  absl::StatusOr<size_t> SampleExponents(std::span<const uint64_t> exponents,
                                         BitSource& src,
                                         MechanismStats& local,
                                         MechanismStats* stats) const;

  MechanismConfig cfg_;
  long precision_;
};

// One-shot form: configure, then sample outcomes[i] with utility utilities[i].
template <typename Outcome>
absl::StatusOr<Outcome> RunMechanism(const MechanismConfig& cfg,
                                     std::span<const ExactValue> utilities,
                                     std::span<const Outcome> outcomes,
                                     BitSource& src) {
  if (utilities.size() != outcomes.size()) {
    return absl::InvalidArgumentError(
        "utilities and outcomes differ in length");
  }
  absl::StatusOr<ExponentialMechanism> mech = ExponentialMechanism::Create(cfg);
  if (!mech.ok()) return mech.status();
  absl::StatusOr<size_t> i = mech->SampleIndex(utilities, src);
  if (!i.ok()) return i.status();
  return outcomes[*i];
}

}  // namespace b2em

#endif  // B2EM_MECHANISM_H_
