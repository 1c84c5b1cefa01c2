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

#include "b2em/laplace.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace b2em {
namespace {

// The difference of any two finite doubles fits in this many bits.
constexpr long kDistanceBits = 2200;

absl::StatusOr<ExponentialMechanism> GridMechanism(
    const std::vector<double>& grid, const Eta& eta,
    const SampleOptions& sample, PrecisionStrategy strategy) {
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  absl::StatusOr<ArithContext> ctx = ArithContext::Create(kDistanceBits);
  if (!ctx.ok()) return ctx.status();
  const ExactValue range = ctx->Ceil(
      ctx->Sub(ExactValue::FromDouble(*hi), ExactValue::FromDouble(*lo)));
  if (!ctx->exact() || !mpfr_fits_intmax_p(range.raw(), MPFR_RNDN)) {
    return absl::InvalidArgumentError("grid range is too wide");
  }
  MechanismConfig cfg;
  cfg.u_min = 0;
  cfg.u_max = range.ToInt64();
  cfg.o_max = grid.size();
  cfg.eta = eta;
  cfg.sample = sample;
  cfg.precision_strategy = strategy;
  return ExponentialMechanism::Create(cfg);
}

}  // namespace

absl::StatusOr<ClampedDiscreteLaplace> ClampedDiscreteLaplace::Create(
    const LaplaceConfig& cfg) {
  if (!std::isfinite(cfg.lower) || !std::isfinite(cfg.upper) ||
      !(cfg.lower < cfg.upper)) {
    return absl::InvalidArgumentError("need finite bounds with lower < upper");
  }
  if (!std::isfinite(cfg.gamma) || !(cfg.gamma > 0)) {
    return absl::InvalidArgumentError("gamma must be positive and finite");
  }
  absl::StatusOr<ArithContext> ctx = ArithContext::Create(kDistanceBits);
  if (!ctx.ok()) return ctx.status();
  const ExactValue upper = ExactValue::FromDouble(cfg.upper);
  const ExactValue gamma = ExactValue::FromDouble(cfg.gamma);
  std::vector<double> grid;
  for (ExactValue point = ExactValue::FromDouble(cfg.lower); point <= upper;
       point = ctx->Add(point, gamma)) {
    if (grid.size() == kMaxGridSize) {
      return absl::InvalidArgumentError(absl::StrCat(
          "grid has more than ", kMaxGridSize, " points"));
    }
    const double d = point.ToDouble();
    if (!ctx->exact() || !(ExactValue::FromDouble(d) == point)) {
      return absl::InvalidArgumentError(
          "grid points are not representable as doubles; use a coarser "
          "power-of-two gamma");
    }
    grid.push_back(d);
  }
  return FromGrid(std::move(grid), cfg.eta, cfg.sample,
                  cfg.precision_strategy);
}

absl::StatusOr<ClampedDiscreteLaplace> ClampedDiscreteLaplace::FromGrid(
    std::vector<double> grid, const Eta& eta, const SampleOptions& sample,
    PrecisionStrategy strategy) {
  if (grid.empty()) return absl::InvalidArgumentError("the grid is empty");
  for (double g : grid) {
    if (!std::isfinite(g)) {
      return absl::InvalidArgumentError("grid points must be finite");
    }
  }
  absl::StatusOr<ExponentialMechanism> mech =
      GridMechanism(grid, eta, sample, strategy);
  if (!mech.ok()) return mech.status();
  return ClampedDiscreteLaplace(std::move(grid), std::move(*mech));
}

absl::StatusOr<std::vector<ExactValue>> ClampedDiscreteLaplace::Distances(
    double target) const {
  if (!std::isfinite(target)) {
    return absl::InvalidArgumentError("target must be finite");
  }
  absl::StatusOr<ArithContext> ctx = ArithContext::Create(kDistanceBits);
  if (!ctx.ok()) return ctx.status();
  const ExactValue t = ExactValue::FromDouble(target);
  std::vector<ExactValue> out;
  out.reserve(grid_.size());
  for (double o : grid_) {
    out.push_back(ctx->Sub(t, ExactValue::FromDouble(o)).Abs());
  }
  if (!ctx->exact()) return absl::InternalError("inexact distance");
  return out;
}

absl::StatusOr<double> ClampedDiscreteLaplace::Sample(double target,
                                                      BitSource& src) const {
  absl::StatusOr<std::vector<ExactValue>> u = Distances(target);
  if (!u.ok()) return u.status();
  absl::StatusOr<size_t> i = mech_.SampleIndex(*u, src);
  if (!i.ok()) return i.status();
  return grid_[*i];
}

std::vector<double> SymmetricGrid(double gamma, int n) {
  std::vector<double> grid;
  grid.reserve(2 * static_cast<size_t>(std::max(n, 0)));
  for (int i = n; i >= 1; --i) grid.push_back(-gamma * i);
  for (int i = 1; i <= n; ++i) grid.push_back(gamma * i);
  return grid;
}

InverseTransformSampler::InverseTransformSampler(std::vector<double> grid,
                                                 double target, double eps)
    : grid_(std::move(grid)) {
  cdf_.reserve(grid_.size());
  double total = 0;
  for (double o : grid_) {
    total += std::exp(-(eps / 2) * std::abs(target - o));
    cdf_.push_back(total);
  }
  for (double& c : cdf_) c /= total;
}

double InverseTransformSampler::Sample(std::mt19937_64& rng) const {
  const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const size_t i = std::min<size_t>(it - cdf_.begin(), grid_.size() - 1);
  return grid_[i];
}

double KolmogorovSmirnov(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

}  // namespace b2em
