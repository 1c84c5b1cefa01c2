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

#ifndef B2EM_PRIVACY_PARAMS_H_
#define B2EM_PRIVACY_PARAMS_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "b2em/exact_arith.h"

namespace b2em {

// Base-2 privacy parameter eta = -z * log2(x / 2^y), chosen so that the
// mechanism base 2^-eta = (x / 2^y)^z is a dyadic rational.
//
// Requires x, y, z >= 1 and x <= 2^y. x == 2^y gives eta = 0, the uniform
// distribution.
class Eta {
 public:
  // eta = 1, base 1/2.
  Eta() : Eta(1, 1, 1) {}
  static absl::StatusOr<Eta> Create(uint64_t x, uint64_t y, uint64_t z);
  // Parses "x,y,z".
  static absl::StatusOr<Eta> Parse(absl::string_view text);

  uint64_t x() const { return x_; }
  uint64_t y() const { return y_; }
  uint64_t z() const { return z_; }
  // Bits needed to write x in binary: floor(log2 x) + 1.
  int x_bits() const;
  // z * (y + x_bits()): an upper bound on the mantissa bits of the base.
  uint64_t base_bits() const;

  // Approximate eta in double precision. Reporting only.
  double ApproxValue() const;

  std::string ToString() const;

  friend bool operator==(const Eta&, const Eta&) = default;

 private:
  Eta(uint64_t x, uint64_t y, uint64_t z) : x_(x), y_(y), z_(z) {}

  uint64_t x_;
  uint64_t y_;
  uint64_t z_;
};

// 2^-eta = (x * 2^-y)^z, computed exactly in `ctx`. Fails with
// FailedPrecondition if the context precision was not enough.
absl::StatusOr<ExactValue> Base(const Eta& eta, ArithContext& ctx);

// ln(2) * eta, the base-e equivalent of an eta-base-2 guarantee. This is the
// only inexact computation in the library and it never feeds sampling.
double ReportOnlyEpsilon(const Eta& eta);

// Base-e epsilon reported for the exponential mechanism with utility
// sensitivity `alpha`: 2 * alpha * ln(2) * eta.
double ReportOnlyMechanismEpsilon(const Eta& eta, double alpha = 1.0);

}  // namespace b2em

#endif  // B2EM_PRIVACY_PARAMS_H_
