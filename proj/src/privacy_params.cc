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

#include "b2em/privacy_params.h"

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace b2em {

absl::StatusOr<Eta> Eta::Create(uint64_t x, uint64_t y, uint64_t z) {
  if (x == 0) return absl::InvalidArgumentError("eta: x must be positive");
  if (y == 0) return absl::InvalidArgumentError("eta: y must be positive");
  if (z == 0) return absl::InvalidArgumentError("eta: z must be positive");
  // x <= 2^y; any 64-bit x satisfies it once y >= 64.
  if (y < 64 && x > (uint64_t{1} << y)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "eta: x must not exceed 2^y (x=", x, ", 2^y=", uint64_t{1} << y, ")"));
  }
  if (y > (uint64_t{1} << 32) || z > (uint64_t{1} << 32)) {
    return absl::InvalidArgumentError("eta: y and z must be below 2^32");
  }
  return Eta(x, y, z);
}

absl::StatusOr<Eta> Eta::Parse(absl::string_view text) {
  std::vector<absl::string_view> parts = absl::StrSplit(text, ',');
  if (parts.size() != 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta must be written x,y,z; got '", text, "'"));
  }
  uint64_t v[3];
  for (int i = 0; i < 3; ++i) {
    if (!absl::SimpleAtoi(absl::StripAsciiWhitespace(parts[i]), &v[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("eta component '", parts[i], "' is not an integer"));
    }
  }
  return Create(v[0], v[1], v[2]);
}

int Eta::x_bits() const { return std::bit_width(x_); }

uint64_t Eta::base_bits() const { return z_ * (y_ + x_bits()); }

double Eta::ApproxValue() const {
  return static_cast<double>(z_) *
         (static_cast<double>(y_) - std::log2(static_cast<double>(x_)));
}

std::string Eta::ToString() const { return absl::StrCat(x_, ",", y_, ",", z_); }

absl::StatusOr<ExactValue> Base(const Eta& eta, ArithContext& ctx) {
  auto result = ctx.Monitor([&] {
    const ExactValue fraction = ctx.MulPow2(ExactValue::FromUint(eta.x()),
                                            -static_cast<long>(eta.y()));
    return ctx.PowInt(fraction, eta.z());
  });
  if (!result.was_exact) {
    return absl::FailedPreconditionError(absl::StrCat(
        "precision ", ctx.precision(),
        " is insufficient for base 2^-eta with eta=(", eta.ToString(),
        "); need up to ", eta.base_bits(), " bits"));
  }
  return std::move(result.value);
}

double ReportOnlyEpsilon(const Eta& eta) {
  return std::numbers::ln2 * eta.ApproxValue();
}

double ReportOnlyMechanismEpsilon(const Eta& eta, double alpha) {
  return 2.0 * alpha * ReportOnlyEpsilon(eta);
}

}  // namespace b2em
