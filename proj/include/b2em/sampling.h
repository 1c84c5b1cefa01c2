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

// Weighted sampling without division.
//
// Element i owns the half-open interval [c_{i-1}, c_i) of [0, t), where c is
// the running sum of the weights and t the total. A uniform value on a dyadic
// grid of [0, 2^g) is drawn by rejection until it lands below t, then the
// element whose interval contains it is located by comparing against the
// cumulative weights only. No division or rounding takes place, so the
// result has probability exactly w_i / t.
//
// Indices are zero-based throughout.
//
// Error codes:
//   FailedPrecondition  precision too small to decide the sample.
//   InvalidArgument     empty table or a non-positive weight.
//   ResourceExhausted   the retry cap (64 + k draws) was hit.

#ifndef B2EM_SAMPLING_H_
#define B2EM_SAMPLING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "b2em/bit_source.h"
#include "b2em/exact_arith.h"

namespace b2em {

enum class SampleVariant {
  // Reveal the draw one bit at a time, stopping once one element is left.
  kStandard,
  // Use every bit of the draw and scan every cumulative weight. The amount of
  // work does not depend on how the weight is distributed.
  kFullScan,
  // Pad the total to 2^g with a dummy element and draw bits lazily,
  // restarting if the dummy wins. Fewest random bits; leaks the most timing.
  kOptimized,
};

absl::StatusOr<SampleVariant> ParseSampleVariant(absl::string_view s);
absl::string_view SampleVariantName(SampleVariant v);

struct SampleOptions {
  // Minimum number of draws made by the rejection loop. Bounds the chance of
  // a data-dependent draw count by 2^-k.
  int k = 1;
  SampleVariant variant = SampleVariant::kFullScan;
};

struct WeightTable {
  std::vector<ExactValue> weights;
  // cumulative[i] = weights[0] + ... + weights[i].
  std::vector<ExactValue> cumulative;
  ExactValue total;
  // Smallest g with 2^g >= total.
  long g = 0;

  size_t size() const { return weights.size(); }
};

// Builds the table in `ctx`. Fails if any sum was inexact, the list is empty,
// or a weight is not positive.
absl::StatusOr<WeightTable> TotalAndCumulative(std::vector<ExactValue> weights,
                                               ArithContext& ctx);

// Bookkeeping for tests and benchmarks.
struct SampleStats {
  // Iterations of the rejection loop, including optimized-variant restarts.
  uint64_t draws = 0;
  // Bits of the accepted draw examined before the element was known.
  uint64_t bits_examined = 0;
};

struct RandomValue {
  ExactValue value;
  // The p+1 bits of `value`, MSB first, packed as by BitSource::NextBitString.
  std::vector<uint64_t> bits;
};

// s = sum_{i=0..p} r_i 2^(g-1-i) with fresh bits r_i, drawn repeatedly until
// at least k draws have been made and one landed in [0, t). Returns the first
// draw that did. The result is uniform on the grid 2^(g-1-p) within [0, t).
absl::StatusOr<RandomValue> GetRandomValue(long p, const ExactValue& t, int k,
                                           BitSource& src,
                                           SampleStats* stats = nullptr);

// The element owning the draw `s`, whose bits are given in `bits` (p+1 of
// them, as produced by GetRandomValue). kStandard narrows bit by bit;
// kFullScan decides from all bits in one pass. Fails with FailedPrecondition
// when the final window [s, s + 2^(g-1-p)) overlaps more than one interval
// or crosses t.
absl::StatusOr<size_t> LocateIndex(const WeightTable& table, long p,
                                   const RandomValue& s, SampleVariant variant,
                                   SampleStats* stats = nullptr);

// Draws an index with probability exactly weights[i] / total.
absl::StatusOr<size_t> NormalizedSample(const WeightTable& table, long p,
                                        const SampleOptions& opts,
                                        BitSource& src,
                                        SampleStats* stats = nullptr);

}  // namespace b2em

#endif  // B2EM_SAMPLING_H_
