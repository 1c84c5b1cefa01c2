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

#include "b2em/precision.h"

#include <algorithm>
#include <bit>
#include <cstdlib>

#include "absl/strings/str_cat.h"

namespace b2em {
namespace {

uint64_t Magnitude(int64_t v) {
  return v < 0 ? uint64_t{0} - static_cast<uint64_t>(v)
               : static_cast<uint64_t>(v);
}

}  // namespace

absl::StatusOr<PrecisionStrategy> ParsePrecisionStrategy(absl::string_view s) {
  if (s == "theoretical") return PrecisionStrategy::kTheoretical;
  if (s == "empirical") return PrecisionStrategy::kEmpirical;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown precision strategy '", s, "'"));
}

absl::string_view PrecisionStrategyName(PrecisionStrategy s) {
  return s == PrecisionStrategy::kTheoretical ? "theoretical" : "empirical";
}

absl::Status PrecisionRequest::Validate() const {
  if (u_min > u_max) {
    return absl::InvalidArgumentError(
        absl::StrCat("u_min (", u_min, ") exceeds u_max (", u_max, ")"));
  }
  if (o_max < 1) return absl::InvalidArgumentError("o_max must be at least 1");
  return absl::OkStatus();
}

absl::StatusOr<long> TheoreticalPrecision(const PrecisionRequest& req) {
  if (absl::Status s = req.Validate(); !s.ok()) return s;
  const uint64_t a = std::max<uint64_t>(1, Magnitude(req.u_min));
  const uint64_t b = std::max<uint64_t>(1, Magnitude(req.u_max));
  uint64_t range, product, total;
  if (__builtin_add_overflow(a, b, &range) ||
      __builtin_mul_overflow(range, req.eta.base_bits(), &product) ||
      __builtin_add_overflow(product, req.o_max, &total) ||
      total > static_cast<uint64_t>(MaxPrecision())) {
    return absl::OutOfRangeError(absl::StrCat(
        "required precision exceeds the platform maximum of ", MaxPrecision(),
        " bits"));
  }
  return static_cast<long>(total);
}

WeightPowers::WeightPowers(const ExactValue& base, uint64_t span,
                           ArithContext& ctx)
    : rounds_(std::bit_width(span)), squares_(ctx.Squares(base, rounds_)) {}

ExactValue WeightPowers::Weight(uint64_t d, ArithContext& ctx) const {
  return ctx.PowIntFromSquares(squares_, d, rounds_);
}

bool CheckPrecision(const PrecisionRequest& req, long p) {
  if (!req.Validate().ok()) return false;
  absl::StatusOr<ArithContext> ctx_or = ArithContext::Create(p);
  if (!ctx_or.ok()) return false;
  ArithContext& ctx = *ctx_or;

  absl::StatusOr<ExactValue> base = Base(req.eta, ctx);
  if (!base.ok()) return false;
  const uint64_t span = static_cast<uint64_t>(req.u_max - req.u_min);

  auto result = ctx.Monitor([&] {
    const WeightPowers powers(*base, span, ctx);
    const ExactValue w_max = powers.Weight(0, ctx);
    ExactValue maxsum;
    for (uint64_t i = 0; i < req.o_max; ++i) maxsum = ctx.Add(maxsum, w_max);
    const ExactValue ceiling = ctx.Ceil(maxsum);
    for (uint64_t d = 0; d <= span; ++d) {
      const ExactValue w = powers.Weight(d, ctx);
      (void)ctx.Add(w, ceiling);
      if (!ctx.exact()) return;  // Already failed; skip the rest.
    }
  });
  return result.was_exact;
}

absl::StatusOr<long> EmpiricalPrecision(const PrecisionRequest& req) {
  absl::StatusOr<long> cap = TheoreticalPrecision(req);
  if (!cap.ok()) return cap.status();
  for (long p = 1; p < *cap; p *= 2) {
    if (CheckPrecision(req, p)) return p;
  }
  return *cap;
}

absl::StatusOr<long> ComputePrecision(const PrecisionRequest& req,
                                      PrecisionStrategy strategy) {
  return strategy == PrecisionStrategy::kTheoretical
             ? TheoreticalPrecision(req)
             : EmpiricalPrecision(req);
}

}  // namespace b2em
