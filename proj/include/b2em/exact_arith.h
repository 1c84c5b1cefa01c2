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

// Arbitrary-precision binary floating point with an exactness contract.
//
// An ExactValue is a finite dyadic rational m * 2^e stored with the fewest
// mantissa bits that represent it. Arithmetic goes through an ArithContext,
// which rounds every result to its working precision and records a sticky
// flag whenever a result had to be rounded (or overflowed, underflowed, or
// produced NaN). Callers check the flags at phase boundaries: if they are
// clear, every value produced in the phase equals the infinite-precision
// result bit for bit.
//
// There is deliberately no division.

#ifndef B2EM_EXACT_ARITH_H_
#define B2EM_EXACT_ARITH_H_

#include <stdint.h>  // before mpfr.h, for the intmax_t entry points
#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace b2em {

// Largest mantissa precision the backend supports on this platform. Queried
// once and cached.
long MaxPrecision();

// Sticky status bits of an ArithContext.
class ArithFlags {
 public:
  static constexpr unsigned kInexact = 1u << 0;
  static constexpr unsigned kOverflow = 1u << 1;
  static constexpr unsigned kUnderflow = 1u << 2;
  static constexpr unsigned kNan = 1u << 3;

  constexpr ArithFlags() = default;
  constexpr explicit ArithFlags(unsigned bits) : bits_(bits) {}

  bool inexact() const { return bits_ & kInexact; }
  bool overflow() const { return bits_ & kOverflow; }
  bool underflow() const { return bits_ & kUnderflow; }
  bool nan() const { return bits_ & kNan; }
  bool any() const { return bits_ != 0; }
  unsigned bits() const { return bits_; }

  ArithFlags& operator|=(ArithFlags other) {
    bits_ |= other.bits_;
    return *this;
  }
  friend bool operator==(ArithFlags, ArithFlags) = default;

  // e.g. "inexact|underflow", or "none".
  std::string ToString() const;

 private:
  unsigned bits_ = 0;
};

class ExactValue {
 public:
  // Zero.
  ExactValue();
  ~ExactValue();
  ExactValue(const ExactValue& other);
  ExactValue(ExactValue&& other) noexcept;
  ExactValue& operator=(const ExactValue& other);
  ExactValue& operator=(ExactValue&& other) noexcept;

  static ExactValue FromInt(int64_t v);
  static ExactValue FromUint(uint64_t v);
  // Every finite double is a dyadic rational, so this is exact. NaN and
  // infinities are carried through; is_finite() reports them.
  static ExactValue FromDouble(double v);
  // mantissa * 2^exponent.
  static ExactValue Dyadic(int64_t mantissa, long exponent);
  static ExactValue PowerOfTwo(long exponent);
  // The integer spelled by the first `nbits` bits of `words` (first word
  // most significant, each word read from its top bit down), times
  // 2^exponent.
  static ExactValue FromBits(std::span<const uint64_t> words, long nbits,
                             long exponent);

  int sign() const;
  bool is_zero() const;
  bool is_finite() const;
  bool is_nan() const;
  bool is_integer() const;

  // Significant bits from the leading one to the trailing one. Zero has 0.
  long mantissa_bits() const;
  // For nonzero x: the e with 2^(e-1) <= |x| < 2^e.
  long exponent() const;
  // For x > 0: min { g : 2^g >= x }.
  long CeilLog2() const;
  // For x > 0 and an integer power of two.
  bool is_power_of_two() const;

  ExactValue Negated() const;
  ExactValue Abs() const;

  // Nearest double. For display only.
  double ToDouble() const;
  // For integers that fit in 64 bits.
  int64_t ToInt64() const;
  // Exact hexadecimal rendering, e.g. "0x1.8p+0".
  std::string ToString() const;

  mpfr_srcptr raw() const { return value_; }

  friend bool operator==(const ExactValue& a, const ExactValue& b);
  friend std::partial_ordering operator<=>(const ExactValue& a,
                                           const ExactValue& b);

 private:
  friend class ArithContext;
  explicit ExactValue(long precision);
  // Copy of `src` at the smallest precision that holds it exactly.
  static ExactValue Compact(mpfr_srcptr src);

  mpfr_t value_;
};

// Result of ArithContext::Monitored.
template <typename T>
struct Monitored {
  T value;
  bool was_exact;
};

template <>
struct Monitored<void> {
  bool was_exact;
};

// Working precision plus sticky flags. Confined to one thread at a time;
// movable between threads, never shared.
class ArithContext {
 public:
  // Fails if precision_bits is outside [1, MaxPrecision()].
  static absl::StatusOr<ArithContext> Create(long precision_bits);

  ArithContext(ArithContext&& other) noexcept;
  ArithContext& operator=(ArithContext&& other) noexcept;
  ArithContext(const ArithContext&) = delete;
  ArithContext& operator=(const ArithContext&) = delete;
  ~ArithContext();

  long precision() const { return precision_; }

  ExactValue Add(const ExactValue& a, const ExactValue& b);
  ExactValue Sub(const ExactValue& a, const ExactValue& b);
  ExactValue Mul(const ExactValue& a, const ExactValue& b);
  // a * 2^e.
  ExactValue MulPow2(const ExactValue& a, long e);
  // Integer ceiling / floor / fractional part (x - floor(x)). Flagged inexact
  // only when the integer result does not fit the working precision.
  ExactValue Ceil(const ExactValue& a);
  ExactValue Floor(const ExactValue& a);
  ExactValue Frac(const ExactValue& a);

  // base^n by square-and-multiply. Exact when the precision is at least
  // max(1, base.mantissa_bits() * n). `min_rounds` forces at least that many
  // square/multiply rounds (multiplying by one where the exponent bit is
  // clear) so the operation count does not depend on n; the largest square
  // formed is base^(2^(rounds-1)).
  ExactValue PowInt(const ExactValue& base, uint64_t n, int min_rounds = 0);
  // Same, given squares[i] = base^(2^i). Uses max(bit_width(n), min_rounds)
  // entries of `squares`, which must be long enough.
  ExactValue PowIntFromSquares(std::span<const ExactValue> squares, uint64_t n,
                               int min_rounds = 0);
  // squares[i] = base^(2^i) for i < count.
  std::vector<ExactValue> Squares(const ExactValue& base, int count);

  ArithFlags flags() const { return flags_; }
  bool exact() const { return !flags_.any(); }
  void ClearFlags() { flags_ = ArithFlags(); }
  // Number of rounding operations performed so far.
  uint64_t op_count() const { return op_count_; }

  // Clears the flags, runs fn(), and reports whether every operation inside
  // was exact. Flags raised before the call are restored afterwards, merged
  // with those raised inside.
  template <typename Fn>
  auto Monitor(Fn&& fn) -> Monitored<std::invoke_result_t<Fn>> {
    const ArithFlags saved = flags_;
    flags_ = ArithFlags();
    if constexpr (std::is_void_v<std::invoke_result_t<Fn>>) {
      std::forward<Fn>(fn)();
      const bool ok = exact();
      flags_ |= saved;
      return {ok};
    } else {
      auto value = std::forward<Fn>(fn)();
      const bool ok = exact();
      flags_ |= saved;
      return {std::move(value), ok};
    }
  }

 private:
  explicit ArithContext(long precision);
  ExactValue Finish(int ternary);

  long precision_;
  ArithFlags flags_;
  uint64_t op_count_ = 0;
  // Holds each result at full working precision before it is compacted.
  mpfr_t scratch_;
  bool owns_scratch_ = true;
};

}  // namespace b2em

#endif  // B2EM_EXACT_ARITH_H_
