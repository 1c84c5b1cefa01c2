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

#include "b2em/exact_arith.h"

#include <gmp.h>

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstring>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace b2em {
namespace {

// MPFR keeps its exponent range per thread. Widen it the first time a thread
// touches the backend so that no value we can build underflows.
void EnsureExponentRange() {
  thread_local bool initialized = false;
  if (!initialized) {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
    initialized = true;
  }
}

}  // namespace

long MaxPrecision() {
  static const long kMax = static_cast<long>(MPFR_PREC_MAX);
  return kMax;
}

std::string ArithFlags::ToString() const {
  if (!any()) return "none";
  std::vector<std::string> names;
  if (inexact()) names.push_back("inexact");
  if (overflow()) names.push_back("overflow");
  if (underflow()) names.push_back("underflow");
  if (nan()) names.push_back("nan");
  return absl::StrJoin(names, "|");
}

// ---------------------------------------------------------------------------
// ExactValue

ExactValue::ExactValue() : ExactValue(1) { mpfr_set_zero(value_, 1); }

ExactValue::ExactValue(long precision) {
  EnsureExponentRange();
  mpfr_init2(value_, std::max<long>(precision, MPFR_PREC_MIN));
}

ExactValue::~ExactValue() {
  if (value_->_mpfr_d != nullptr) mpfr_clear(value_);
}

ExactValue::ExactValue(const ExactValue& other)
    : ExactValue(mpfr_get_prec(other.value_)) {
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

// The moved-from object keeps no limbs; only destruction and assignment are
// valid on it afterwards.
ExactValue::ExactValue(ExactValue&& other) noexcept {
  std::memcpy(value_, other.value_, sizeof(value_));
  other.value_->_mpfr_d = nullptr;
}

ExactValue& ExactValue::operator=(const ExactValue& other) {
  if (this != &other) {
    if (value_->_mpfr_d == nullptr) {
      mpfr_init2(value_, mpfr_get_prec(other.value_));
    } else {
      mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    }
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

ExactValue& ExactValue::operator=(ExactValue&& other) noexcept {
  if (this != &other) {
    if (value_->_mpfr_d != nullptr) mpfr_clear(value_);
    std::memcpy(value_, other.value_, sizeof(value_));
    other.value_->_mpfr_d = nullptr;
  }
  return *this;
}

ExactValue ExactValue::Compact(mpfr_srcptr src) {
  ExactValue out(std::max<long>(mpfr_min_prec(src), 1));
  mpfr_set(out.value_, src, MPFR_RNDN);
  return out;
}

ExactValue ExactValue::FromInt(int64_t v) {
  ExactValue tmp(64);
  mpfr_set_sj(tmp.value_, v, MPFR_RNDN);
  return Compact(tmp.value_);
}

ExactValue ExactValue::FromUint(uint64_t v) {
  ExactValue tmp(64);
  mpfr_set_uj(tmp.value_, v, MPFR_RNDN);
  return Compact(tmp.value_);
}

ExactValue ExactValue::FromDouble(double v) {
  ExactValue tmp(53);
  mpfr_set_d(tmp.value_, v, MPFR_RNDN);
  return Compact(tmp.value_);
}

ExactValue ExactValue::Dyadic(int64_t mantissa, long exponent) {
  ExactValue tmp(64);
  mpfr_set_sj_2exp(tmp.value_, mantissa, exponent, MPFR_RNDN);
  return Compact(tmp.value_);
}

ExactValue ExactValue::PowerOfTwo(long exponent) {
  ExactValue out(1);
  mpfr_set_ui_2exp(out.value_, 1, exponent, MPFR_RNDN);
  return out;
}

ExactValue ExactValue::FromBits(std::span<const uint64_t> words, long nbits,
                                long exponent) {
  assert(nbits >= 0 && static_cast<size_t>(nbits) <= words.size() * 64);
  if (nbits == 0) return ExactValue();
  mpz_t z;
  mpz_init(z);
  mpz_import(z, words.size(), 1, sizeof(uint64_t), 0, 0, words.data());
  const long total = static_cast<long>(words.size()) * 64;
  mpz_fdiv_q_2exp(z, z, total - nbits);
  ExactValue tmp(nbits);
  mpfr_set_z_2exp(tmp.value_, z, exponent, MPFR_RNDN);
  mpz_clear(z);
  return Compact(tmp.value_);
}

int ExactValue::sign() const { return mpfr_sgn(value_); }
bool ExactValue::is_zero() const { return mpfr_zero_p(value_); }
bool ExactValue::is_finite() const { return mpfr_number_p(value_); }
bool ExactValue::is_nan() const { return mpfr_nan_p(value_); }
bool ExactValue::is_integer() const { return mpfr_integer_p(value_); }

long ExactValue::mantissa_bits() const {
  if (!mpfr_regular_p(value_)) return 0;
  return mpfr_min_prec(value_);
}

long ExactValue::exponent() const {
  assert(mpfr_regular_p(value_));
  return mpfr_get_exp(value_);
}

bool ExactValue::is_power_of_two() const {
  return mpfr_regular_p(value_) && mpfr_sgn(value_) > 0 &&
         mpfr_min_prec(value_) == 1;
}

long ExactValue::CeilLog2() const {
  assert(mpfr_regular_p(value_) && mpfr_sgn(value_) > 0);
  const long e = mpfr_get_exp(value_);
  return is_power_of_two() ? e - 1 : e;
}

ExactValue ExactValue::Negated() const {
  ExactValue out(*this);
  mpfr_neg(out.value_, out.value_, MPFR_RNDN);
  return out;
}

ExactValue ExactValue::Abs() const {
  ExactValue out(*this);
  mpfr_abs(out.value_, out.value_, MPFR_RNDN);
  return out;
}

double ExactValue::ToDouble() const { return mpfr_get_d(value_, MPFR_RNDN); }

int64_t ExactValue::ToInt64() const {
  assert(mpfr_integer_p(value_) && mpfr_fits_intmax_p(value_, MPFR_RNDN));
  return mpfr_get_sj(value_, MPFR_RNDN);
}

std::string ExactValue::ToString() const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%Ra", value_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

bool operator==(const ExactValue& a, const ExactValue& b) {
  return mpfr_equal_p(a.value_, b.value_);
}

std::partial_ordering operator<=>(const ExactValue& a, const ExactValue& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) {
    return std::partial_ordering::unordered;
  }
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

// ---------------------------------------------------------------------------
// ArithContext

absl::StatusOr<ArithContext> ArithContext::Create(long precision_bits) {
  if (precision_bits < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("precision must be at least 1 bit, got ", precision_bits));
  }
  if (precision_bits > MaxPrecision()) {
    return absl::OutOfRangeError(
        absl::StrCat("precision ", precision_bits,
                     " exceeds the platform maximum ", MaxPrecision()));
  }
  return ArithContext(precision_bits);
}

ArithContext::ArithContext(long precision) : precision_(precision) {
  EnsureExponentRange();
  mpfr_init2(scratch_, precision);
}

ArithContext::ArithContext(ArithContext&& other) noexcept
    : precision_(other.precision_),
      flags_(other.flags_),
      op_count_(other.op_count_),
      owns_scratch_(other.owns_scratch_) {
  std::memcpy(scratch_, other.scratch_, sizeof(scratch_));
  other.owns_scratch_ = false;
}

ArithContext& ArithContext::operator=(ArithContext&& other) noexcept {
  if (this != &other) {
    if (owns_scratch_) mpfr_clear(scratch_);
    precision_ = other.precision_;
    flags_ = other.flags_;
    op_count_ = other.op_count_;
    owns_scratch_ = other.owns_scratch_;
    std::memcpy(scratch_, other.scratch_, sizeof(scratch_));
    other.owns_scratch_ = false;
  }
  return *this;
}

ArithContext::~ArithContext() {
  if (owns_scratch_) mpfr_clear(scratch_);
}

ExactValue ArithContext::Finish(int ternary) {
  unsigned f = 0;
  if (ternary != 0) f |= ArithFlags::kInexact;
  if (mpfr_overflow_p()) f |= ArithFlags::kOverflow;
  if (mpfr_underflow_p()) f |= ArithFlags::kUnderflow;
  if (mpfr_nanflag_p()) f |= ArithFlags::kNan;
  flags_ |= ArithFlags(f);
  ++op_count_;
  return ExactValue::Compact(scratch_);
}

ExactValue ArithContext::Add(const ExactValue& a, const ExactValue& b) {
  EnsureExponentRange();
  mpfr_clear_flags();
  return Finish(mpfr_add(scratch_, a.value_, b.value_, MPFR_RNDN));
}

ExactValue ArithContext::Sub(const ExactValue& a, const ExactValue& b) {
  EnsureExponentRange();
  mpfr_clear_flags();
  return Finish(mpfr_sub(scratch_, a.value_, b.value_, MPFR_RNDN));
}

ExactValue ArithContext::Mul(const ExactValue& a, const ExactValue& b) {
  EnsureExponentRange();
  mpfr_clear_flags();
  return Finish(mpfr_mul(scratch_, a.value_, b.value_, MPFR_RNDN));
}

ExactValue ArithContext::MulPow2(const ExactValue& a, long e) {
  EnsureExponentRange();
  mpfr_clear_flags();
  return Finish(mpfr_mul_2si(scratch_, a.value_, e, MPFR_RNDN));
}

// mpfr_rint_* report ternary against the mathematical integer, so a nonzero
// value means the integer itself did not fit.
ExactValue ArithContext::Ceil(const ExactValue& a) {
  EnsureExponentRange();
  mpfr_clear_flags();
  return Finish(mpfr_rint_ceil(scratch_, a.value_, MPFR_RNDN));
}

ExactValue ArithContext::Floor(const ExactValue& a) {
  EnsureExponentRange();
  mpfr_clear_flags();
  return Finish(mpfr_rint_floor(scratch_, a.value_, MPFR_RNDN));
}

ExactValue ArithContext::Frac(const ExactValue& a) {
  EnsureExponentRange();
  mpfr_clear_flags();
  // mpfr_frac keeps the sign of the input; we want x - floor(x) in [0, 1).
  if (mpfr_sgn(a.value_) >= 0 || mpfr_integer_p(a.value_)) {
    const int t = mpfr_frac(scratch_, a.value_, MPFR_RNDN);
    if (mpfr_zero_p(scratch_)) mpfr_set_zero(scratch_, 1);
    return Finish(t);
  }
  ExactValue floor = Floor(a);
  return Sub(a, floor);
}

std::vector<ExactValue> ArithContext::Squares(const ExactValue& base,
                                              int count) {
  std::vector<ExactValue> squares;
  squares.reserve(std::max(count, 0));
  for (int i = 0; i < count; ++i) {
    if (i == 0) {
      squares.push_back(base);
    } else {
      squares.push_back(Mul(squares.back(), squares.back()));
    }
  }
  return squares;
}

ExactValue ArithContext::PowIntFromSquares(std::span<const ExactValue> squares,
                                           uint64_t n, int min_rounds) {
  const int rounds = std::max<int>(std::bit_width(n), min_rounds);
  assert(squares.size() >= static_cast<size_t>(rounds));
  static const ExactValue kOne = ExactValue::FromInt(1);
  ExactValue result = kOne;
  for (int i = 0; i < rounds; ++i) {
    const bool bit = (i < 64) && ((n >> i) & 1u);
    result = Mul(result, bit ? squares[i] : kOne);
  }
  return result;
}

ExactValue ArithContext::PowInt(const ExactValue& base, uint64_t n,
                                int min_rounds) {
  const int rounds = std::max<int>(std::bit_width(n), min_rounds);
  std::vector<ExactValue> squares = Squares(base, rounds);
  return PowIntFromSquares(squares, n, min_rounds);
}

}  // namespace b2em
