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

#include "b2em/sampling.h"

#include <utility>

#include "absl/strings/str_cat.h"

namespace b2em {
namespace {

bool BitAt(const std::vector<uint64_t>& words, long i) {
  return (words[i / 64] >> (63 - i % 64)) & 1u;
}

absl::Status InsufficientPrecision(long p) {
  return absl::FailedPreconditionError(absl::StrCat(
      "precision ", p, " is insufficient to resolve the sampled value"));
}

// Arithmetic on draws needs p+1 bits for s and one more for s + 2^(g-j).
absl::StatusOr<ArithContext> DrawContext(long p) {
  return ArithContext::Create(p + 2);
}

absl::Status CheckArgs(long p, int k) {
  if (p < 1) return absl::InvalidArgumentError("precision must be positive");
  if (k < 1) return absl::InvalidArgumentError("k must be at least 1");
  return absl::OkStatus();
}

// The surviving elements always form a contiguous run [lo, hi] because the
// intervals are sorted. Index n stands for the dummy region [t, 2^g) when it
// is non-empty.
class Window {
 public:
  Window(const WeightTable& table, bool with_dummy)
      : table_(table),
        with_dummy_(with_dummy),
        dummy_top_(ExactValue::PowerOfTwo(table.g)) {
    Reset();
  }

  void Reset() {
    lo_ = 0;
    hi_ = with_dummy_ ? table_.size() : table_.size() - 1;
  }

  // Drops every element whose interval misses [lower, upper).
  void Narrow(const ExactValue& lower, const ExactValue& upper) {
    while (lo_ < hi_ && Upper(lo_) <= lower) ++lo_;
    while (hi_ > lo_ && Lower(hi_) >= upper) --hi_;
  }

  bool resolved() const { return lo_ == hi_; }
  size_t index() const { return lo_; }
  bool is_dummy(size_t i) const { return with_dummy_ && i == table_.size(); }

 private:
  const ExactValue& Upper(size_t i) const {
    return i == table_.size() ? dummy_top_ : table_.cumulative[i];
  }
  const ExactValue& Lower(size_t i) const {
    return i == 0 ? zero_ : table_.cumulative[i - 1];
  }

  const WeightTable& table_;
  const bool with_dummy_;
  const ExactValue dummy_top_;
  const ExactValue zero_;
  size_t lo_ = 0;
  size_t hi_ = 0;
};

bool HasDummy(const WeightTable& table) {
  return table.total < ExactValue::PowerOfTwo(table.g);
}

absl::StatusOr<size_t> LocateStandard(const WeightTable& table, long p,
                                      const RandomValue& s, SampleStats* stats) {
  absl::StatusOr<ArithContext> ctx_or = DrawContext(p);
  if (!ctx_or.ok()) return ctx_or.status();
  ArithContext& ctx = *ctx_or;
  // The dummy region is not a candidate here (s < t), but a window that
  // still reaches past t leaves the draw undecided.
  Window window(table, HasDummy(table));
  const ExactValue zero;
  ExactValue prefix;
  for (long j = 1; j <= p + 1; ++j) {
    const ExactValue step = ExactValue::PowerOfTwo(table.g - j);
    prefix = ctx.Add(prefix, BitAt(s.bits, j - 1) ? step : zero);
    const ExactValue upper = ctx.Add(prefix, step);
    window.Narrow(prefix, upper);
    if (window.resolved()) {
      if (stats != nullptr) stats->bits_examined = j;
      if (window.is_dummy(window.index())) break;  // Not reachable with s < t.
      return window.index();
    }
  }
  return InsufficientPrecision(p);
}

absl::StatusOr<size_t> LocateFullScan(const WeightTable& table, long p,
                                      const RandomValue& s, SampleStats* stats) {
  absl::StatusOr<ArithContext> ctx_or = DrawContext(p);
  if (!ctx_or.ok()) return ctx_or.status();
  ArithContext& ctx = *ctx_or;
  const ExactValue upper =
      ctx.Add(s.value, ExactValue::PowerOfTwo(table.g - 1 - p));
  const ExactValue zero;
  size_t overlapping = 0;
  size_t chosen = 0;
  // No early exit: every cumulative weight is compared exactly twice.
  for (size_t i = 0; i < table.size(); ++i) {
    const ExactValue& lower = i == 0 ? zero : table.cumulative[i - 1];
    const bool hit = (table.cumulative[i] > s.value) & (lower < upper);
    overlapping += hit;
    chosen = hit && overlapping == 1 ? i : chosen;
  }
  if (table.total < upper) ++overlapping;
  if (stats != nullptr) stats->bits_examined = p + 1;
  if (overlapping != 1) return InsufficientPrecision(p);
  return chosen;
}

absl::StatusOr<size_t> SampleOptimized(const WeightTable& table, long p,
                                       int k, BitSource& src,
                                       SampleStats* stats) {
  absl::StatusOr<ArithContext> ctx_or = DrawContext(p);
  if (!ctx_or.ok()) return ctx_or.status();
  ArithContext& ctx = *ctx_or;
  Window window(table, HasDummy(table));
  if (window.resolved()) return window.index();
  const ExactValue zero;
  const uint64_t cap = 64 + static_cast<uint64_t>(k);
  for (uint64_t draw = 0; draw < cap; ++draw) {
    if (stats != nullptr) ++stats->draws;
    window.Reset();
    ExactValue prefix;
    bool restart = false;
    for (long j = 1; j <= p + 1; ++j) {
      const ExactValue step = ExactValue::PowerOfTwo(table.g - j);
      prefix = ctx.Add(prefix, src.NextBit() ? step : zero);
      const ExactValue upper = ctx.Add(prefix, step);
      window.Narrow(prefix, upper);
      if (window.resolved()) {
        if (stats != nullptr) stats->bits_examined = j;
        if (!window.is_dummy(window.index())) return window.index();
        restart = true;
        break;
      }
    }
    if (!restart) return InsufficientPrecision(p);
  }
  return absl::ResourceExhaustedError(
      absl::StrCat("sampler hit its retry cap of ", cap, " draws"));
}

}  // namespace

absl::StatusOr<SampleVariant> ParseSampleVariant(absl::string_view s) {
  if (s == "standard") return SampleVariant::kStandard;
  if (s == "full-scan") return SampleVariant::kFullScan;
  if (s == "optimized") return SampleVariant::kOptimized;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown sampling variant '", s, "'"));
}

absl::string_view SampleVariantName(SampleVariant v) {
  switch (v) {
    case SampleVariant::kStandard:
      return "standard";
    case SampleVariant::kFullScan:
      return "full-scan";
    case SampleVariant::kOptimized:
      return "optimized";
  }
  return "unknown";
}

absl::StatusOr<WeightTable> TotalAndCumulative(std::vector<ExactValue> weights,
                                               ArithContext& ctx) {
  if (weights.empty()) {
    return absl::InvalidArgumentError("cannot sample from an empty table");
  }
  for (const ExactValue& w : weights) {
    if (!w.is_finite() || w.sign() <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("weights must be positive and finite, got ",
                       w.ToString()));
    }
  }
  WeightTable table;
  auto sums = ctx.Monitor([&] {
    std::vector<ExactValue> cumulative;
    cumulative.reserve(weights.size());
    ExactValue running;
    for (const ExactValue& w : weights) {
      running = ctx.Add(running, w);
      cumulative.push_back(running);
    }
    return cumulative;
  });
  if (!sums.was_exact) {
    return absl::FailedPreconditionError(absl::StrCat(
        "precision ", ctx.precision(), " is insufficient for the weight sums"));
  }
  table.weights = std::move(weights);
  table.cumulative = std::move(sums.value);
  table.total = table.cumulative.back();
  table.g = table.total.CeilLog2();
  return table;
}

absl::StatusOr<RandomValue> GetRandomValue(long p, const ExactValue& t, int k,
                                           BitSource& src, SampleStats* stats) {
  if (absl::Status s = CheckArgs(p, k); !s.ok()) return s;
  if (!t.is_finite() || t.sign() <= 0) {
    return absl::InvalidArgumentError("the sampling range must be positive");
  }
  absl::StatusOr<ArithContext> ctx_or = DrawContext(p);
  if (!ctx_or.ok()) return ctx_or.status();
  ArithContext& ctx = *ctx_or;
  const long g = t.CeilLog2();
  const ExactValue zero;
  const uint64_t cap = 64 + static_cast<uint64_t>(k);

  RandomValue accepted;
  bool have = false;
  std::vector<uint64_t> words;
  for (uint64_t draws = 0; draws < static_cast<uint64_t>(k) || !have;) {
    if (draws == cap) {
      return absl::ResourceExhaustedError(
          absl::StrCat("rejection loop hit its cap of ", cap, " draws"));
    }
    words.clear();
    src.NextBitString(p + 1, words);
    // Every term is added, zero or not, so a draw costs the same whatever
    // its bits are.
    ExactValue s;
    for (long i = 0; i <= p; ++i) {
      s = ctx.Add(s, BitAt(words, i) ? ExactValue::PowerOfTwo(g - 1 - i)
                                     : zero);
    }
    ++draws;
    if (stats != nullptr) ++stats->draws;
    if (!have && s < t) {
      accepted.value = std::move(s);
      accepted.bits = words;
      have = true;
    }
  }
  if (!ctx.exact()) {
    return absl::InternalError("inexact arithmetic while forming a draw");
  }
  return accepted;
}

absl::StatusOr<size_t> LocateIndex(const WeightTable& table, long p,
                                   const RandomValue& s, SampleVariant variant,
                                   SampleStats* stats) {
  if (p < 1) return absl::InvalidArgumentError("precision must be positive");
  if (table.size() == 0 || table.cumulative.size() != table.size()) {
    return absl::InvalidArgumentError("malformed weight table");
  }
  if (s.bits.size() * 64 < static_cast<size_t>(p + 1)) {
    return absl::InvalidArgumentError("draw has fewer than p+1 bits");
  }
  switch (variant) {
    case SampleVariant::kStandard:
      return LocateStandard(table, p, s, stats);
    case SampleVariant::kFullScan:
      return LocateFullScan(table, p, s, stats);
    case SampleVariant::kOptimized:
      break;
  }
  return absl::InvalidArgumentError(
      "the optimized variant draws its own bits; use NormalizedSample");
}

absl::StatusOr<size_t> NormalizedSample(const WeightTable& table, long p,
                                        const SampleOptions& opts,
                                        BitSource& src, SampleStats* stats) {
  if (absl::Status s = CheckArgs(p, opts.k); !s.ok()) return s;
  if (table.size() == 0 || table.cumulative.size() != table.size()) {
    return absl::InvalidArgumentError("malformed weight table");
  }
  if (opts.variant == SampleVariant::kOptimized) {
    return SampleOptimized(table, p, opts.k, src, stats);
  }
  absl::StatusOr<RandomValue> s = GetRandomValue(p, table.total, opts.k, src,
                                                 stats);
  if (!s.ok()) return s.status();
  return LocateIndex(table, p, *s, opts.variant, stats);
}

}  // namespace b2em
