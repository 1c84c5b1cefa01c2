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

#include "b2em/mechanism.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace b2em {
namespace {

// Enough bits to hold floor(u) and u - floor(u) exactly for a clamped u.
// Enough bits for floor(u) and for u - floor(u), which for negative u spans
// from 2^0 down to the lowest bit of u.
long RoundingPrecision(const ExactValue& u) {
  if (u.is_zero()) return 66;
  const long top = mpfr_get_exp(u.raw());
  const long lowest = top - u.mantissa_bits();
  return std::max<long>({66, u.mantissa_bits() + 2,
                         std::max<long>(top, 1) - lowest + 2});
}

// ceil(frac(u) * 2^bits) for finite u, exactly. Can be 2^bits when a
// negative u sits just below an integer.
unsigned __int128 ScaledFraction(double u, int bits) {
  int exp = 0;
  const double m = std::frexp(u, &exp);
  // u = mant * 2^-s exactly, |mant| < 2^53.
  const int64_t mant = static_cast<int64_t>(std::ldexp(m, 53));
  const long s = 53L - exp;
  if (s <= 0 || mant == 0) return 0;
  const uint64_t mag = mant < 0 ? -static_cast<uint64_t>(mant)
                                : static_cast<uint64_t>(mant);
  // a = |mant| mod 2^s.
  const uint64_t a = s >= 64 ? mag : mag & ((uint64_t{1} << s) - 1);
  if (a == 0) return 0;
  const unsigned __int128 one = 1;
  if (s <= bits) {
    const unsigned __int128 scaled = static_cast<unsigned __int128>(a)
                                     << (bits - s);
    return mant >= 0 ? scaled : (one << bits) - scaled;
  }
  // frac * 2^bits = a / 2^(s - bits) for u >= 0, 2^bits minus that for u < 0.
  const long shift = s - bits;
  const uint64_t q = shift >= 64 ? 0 : a >> shift;
  const bool rem = shift >= 64 ? true : (a & ((uint64_t{1} << shift) - 1)) != 0;
  if (mant >= 0) return q + (rem ? 1 : 0);
  return (one << bits) - q;
}

// Exact comparisons of a finite double with an int64. The int64 need not be
// representable as a double.
bool DoubleLess(double d, int64_t v) {
  if (d >= 0x1p63) return false;
  if (d < -0x1p63) return true;
  // d < v iff floor(d) < v, for integer v.
  return static_cast<int64_t>(std::floor(d)) < v;
}

bool DoubleGreater(double d, int64_t v) {
  if (d >= 0x1p63) return true;
  if (d < -0x1p63) return false;
  const double fl = std::floor(d);
  const int64_t f = static_cast<int64_t>(fl);
  return f > v || (f == v && d != fl);
}

}  // namespace

absl::Status MechanismConfig::Validate() const {
  const PrecisionRequest req{u_min, u_max, o_max, eta};
  if (absl::Status s = req.Validate(); !s.ok()) return s;
  if (sample.k < 1) return absl::InvalidArgumentError("k must be at least 1");
  if (rounding_bits < 1 || rounding_bits > 64) {
    return absl::InvalidArgumentError("rounding_bits must be in [1, 64]");
  }
  return absl::OkStatus();
}

ExactValue Clamp(const ExactValue& u, int64_t lo, int64_t hi) {
  const ExactValue low = ExactValue::FromInt(lo);
  const ExactValue high = ExactValue::FromInt(hi);
  if (u < low) return low;
  if (u > high) return high;
  return u;
}

absl::StatusOr<int64_t> RandomizedRound(const ExactValue& u, BitSource& src,
                                        int bits) {
  if (!u.is_finite()) {
    return absl::InvalidArgumentError("utilities must be finite");
  }
  if (bits < 1 || bits > 64) {
    return absl::InvalidArgumentError("rounding bits must be in [1, 64]");
  }
  absl::StatusOr<ArithContext> ctx = ArithContext::Create(RoundingPrecision(u));
  if (!ctx.ok()) return ctx.status();
  const ExactValue floor = ctx->Floor(u);
  const ExactValue frac = ctx->Frac(u);
  if (!ctx->exact() || !mpfr_fits_intmax_p(floor.raw(), MPFR_RNDN)) {
    return absl::InvalidArgumentError(
        absl::StrCat("utility ", u.ToString(), " is out of range"));
  }
  // coin is uniform on the grid 2^-bits in [0, 1).
  const uint64_t word = src.NextBits(bits) << (64 - bits);
  const ExactValue coin =
      ExactValue::FromBits(std::span<const uint64_t>(&word, 1), bits, -bits);
  return floor.ToInt64() + (coin < frac ? 1 : 0);
}

absl::StatusOr<int64_t> ClampAndRound(double u, int64_t lo, int64_t hi,
                                      BitSource& src, int bits) {
  if (!std::isfinite(u)) {
    return absl::InvalidArgumentError("utilities must be finite");
  }
  if (bits < 1 || bits > 64) {
    return absl::InvalidArgumentError("rounding bits must be in [1, 64]");
  }
  const uint64_t coin = src.NextBits(bits);
  if (!DoubleGreater(u, lo)) return lo;
  if (!DoubleLess(u, hi)) return hi;
  // lo < u < hi, so floor(u) fits. For an integer coin,
  // coin < frac * 2^bits iff coin < ceil(frac * 2^bits). u - floor(u) is not
  // always a double, hence the integer arithmetic.
  return static_cast<int64_t>(std::floor(u)) +
         (coin < ScaledFraction(u, bits) ? 1 : 0);
}

absl::StatusOr<ExponentialMechanism> ExponentialMechanism::Create(
    const MechanismConfig& cfg) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  const PrecisionRequest req{cfg.u_min, cfg.u_max, cfg.o_max, cfg.eta};
  absl::StatusOr<long> p = ComputePrecision(req, cfg.precision_strategy);
  if (!p.ok()) return p.status();
  return ExponentialMechanism(cfg, *p);
}

double ExponentialMechanism::ReportedEpsilon() const {
  return ReportOnlyMechanismEpsilon(cfg_.eta);
}

absl::Status ExponentialMechanism::CheckSize(size_t n) const {
  if (n == 0) return absl::InvalidArgumentError("the outcome set is empty");
  if (n > cfg_.o_max) {
    return absl::OutOfRangeError(
        absl::StrCat(n, " outcomes exceed o_max = ", cfg_.o_max));
  }
  return absl::OkStatus();
}

absl::StatusOr<size_t> ExponentialMechanism::SampleIndex(
    std::span<const double> utilities, BitSource& src,
    MechanismStats* stats) const {
  if (absl::Status s = CheckSize(utilities.size()); !s.ok()) return s;
  MechanismStats local;
  const uint64_t bits_before = src.bits_consumed();
  std::vector<uint64_t> exponents;
  exponents.reserve(utilities.size());
  for (double u : utilities) {
    absl::StatusOr<int64_t> r =
        ClampAndRound(u, cfg_.u_min, cfg_.u_max, src, cfg_.rounding_bits);
    if (!r.ok()) return r.status();
    exponents.push_back(static_cast<uint64_t>(*r - cfg_.u_min));
  }
  local.rounding_bits = src.bits_consumed() - bits_before;
  return SampleExponents(exponents, src, local, stats);
}

absl::StatusOr<size_t> ExponentialMechanism::SampleIndex(
    std::span<const ExactValue> utilities, BitSource& src,
    MechanismStats* stats) const {
  if (absl::Status s = CheckSize(utilities.size()); !s.ok()) return s;
  MechanismStats local;
  // Clamp, then round. Both bounds are integers, so rounding a clamped value
  // stays within them.
  const uint64_t bits_before = src.bits_consumed();
  std::vector<uint64_t> exponents;
  exponents.reserve(utilities.size());
  for (const ExactValue& u : utilities) {
    if (!u.is_finite()) {
      return absl::InvalidArgumentError("utilities must be finite");
    }
    absl::StatusOr<int64_t> r =
        RandomizedRound(Clamp(u, cfg_.u_min, cfg_.u_max), src,
                        cfg_.rounding_bits);
    if (!r.ok()) return r.status();
    exponents.push_back(static_cast<uint64_t>(*r - cfg_.u_min));
  }
  local.rounding_bits = src.bits_consumed() - bits_before;
  return SampleExponents(exponents, src, local, stats);
}

absl::StatusOr<WeightTable> ExponentialMechanism::BuildTable(
    std::span<const uint64_t> exponents, MechanismStats& local) const {
  absl::StatusOr<ArithContext> ctx_or = ArithContext::Create(precision_);
  if (!ctx_or.ok()) return ctx_or.status();
  ArithContext& ctx = *ctx_or;

  // Weights b^(u - u_min). The shift by u_min is a common factor and does
  // not change the distribution.
  absl::StatusOr<ExactValue> base = Base(cfg_.eta, ctx);
  if (!base.ok()) {
    return absl::InternalError(absl::StrCat(
        "inexact arithmetic computing the base: ", base.status().message()));
  }
  const uint64_t span = static_cast<uint64_t>(cfg_.u_max - cfg_.u_min);
  const WeightPowers powers(*base, span, ctx);
  std::vector<ExactValue> weights;
  weights.reserve(exponents.size());
  for (uint64_t d : exponents) weights.push_back(powers.Weight(d, ctx));
  local.weight_ops = ctx.op_count();

  absl::StatusOr<WeightTable> table = TotalAndCumulative(std::move(weights),
                                                         ctx);
  local.sum_ops = ctx.op_count() - local.weight_ops;
  if (!table.ok()) {
    return absl::InternalError(absl::StrCat(
        "inexact arithmetic in the weight sums: ", table.status().message()));
  }
  if (!ctx.exact()) {
    return absl::InternalError(absl::StrCat(
        "inexact arithmetic in the weight phase (", ctx.flags().ToString(),
        ")"));
  }
  return table;
}

absl::StatusOr<WeightTable> ExponentialMechanism::WeightsFor(
    std::span<const int64_t> rounded) const {
  if (absl::Status s = CheckSize(rounded.size()); !s.ok()) return s;
  std::vector<uint64_t> exponents;
  exponents.reserve(rounded.size());
  for (int64_t r : rounded) {
    if (r < cfg_.u_min || r > cfg_.u_max) {
      return absl::InvalidArgumentError(
          absl::StrCat("rounded utility ", r, " is outside [u_min, u_max]"));
    }
    exponents.push_back(static_cast<uint64_t>(r - cfg_.u_min));
  }
  MechanismStats unused;
  return BuildTable(exponents, unused);
}

absl::StatusOr<size_t> ExponentialMechanism::SampleExponents(
    std::span<const uint64_t> exponents, BitSource& src, MechanismStats& local,
    MechanismStats* stats) const {
  local.precision = precision_;
  absl::StatusOr<WeightTable> table = BuildTable(exponents, local);
  if (!table.ok()) return table.status();

  const uint64_t sample_before = src.bits_consumed();
  absl::StatusOr<size_t> index =
      NormalizedSample(*table, precision_, cfg_.sample, src, &local.sample);
  local.sampling_bits = src.bits_consumed() - sample_before;
  if (stats != nullptr) *stats = local;
  return index;
}

}  // namespace b2em
