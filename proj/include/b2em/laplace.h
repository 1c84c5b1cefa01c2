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

// Clamped discrete Laplace noise from the base-2 exponential mechanism.
//
// The outcome grid is fixed from public parameters before the target is
// seen. Each grid point o gets utility |target - o|, computed exactly, and
// randomized rounding takes care of fractional distances.

#ifndef B2EM_LAPLACE_H_
#define B2EM_LAPLACE_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "b2em/bit_source.h"
#include "b2em/exact_arith.h"
#include "b2em/mechanism.h"

namespace b2em {

struct LaplaceConfig {
  // Grid {lower + gamma * i : lower + gamma * i <= upper}. All three are
  // doubles and hence dyadic; gamma should be a power of two.
  double lower = -10;
  double upper = 10;
  double gamma = 1.0 / 16;
  Eta eta;
  SampleOptions sample;
  PrecisionStrategy precision_strategy = PrecisionStrategy::kTheoretical;
};

class ClampedDiscreteLaplace {
 public:
  // Largest grid accepted.
  static constexpr uint64_t kMaxGridSize = uint64_t{1} << 24;

  static absl::StatusOr<ClampedDiscreteLaplace> Create(
      const LaplaceConfig& cfg);
  // An arbitrary fixed grid. Utilities are clamped to
  // [0, ceil(max(grid) - min(grid))].
  static absl::StatusOr<ClampedDiscreteLaplace> FromGrid(
      std::vector<double> grid, const Eta& eta, const SampleOptions& sample,
      PrecisionStrategy strategy = PrecisionStrategy::kTheoretical);

  const std::vector<double>& grid() const { return grid_; }
  const ExponentialMechanism& mechanism() const { return mech_; }

  // A grid point near `target`. Fails if the target is not finite.
  absl::StatusOr<double> Sample(double target, BitSource& src) const;

  // |target - o| for every grid point, exactly.
  absl::StatusOr<std::vector<ExactValue>> Distances(double target) const;

 private:
  ClampedDiscreteLaplace(std::vector<double> grid, ExponentialMechanism mech)
      : grid_(std::move(grid)), mech_(std::move(mech)) {}

  std::vector<double> grid_;
  ExponentialMechanism mech_;
};

// {sign * gamma * i : i = 1..n, sign = +-1}, ascending.
std::vector<double> SymmetricGrid(double gamma, int n);

// Conventional double-precision sampler over the same grid, for comparison:
// P(o) proportional to exp(-(eps/2) |target - o|), drawn by inverting the
// CDF with a 53-bit uniform. Same eps convention as the mechanism, so
// eps = 2 ln 2 matches eta = 1.
class InverseTransformSampler {
 public:
  InverseTransformSampler(std::vector<double> grid, double target, double eps);
  double Sample(std::mt19937_64& rng) const;

 private:
  std::vector<double> grid_;
  std::vector<double> cdf_;
};

// sup |F_a - F_b| over the empirical CDFs of two samples.
double KolmogorovSmirnov(std::vector<double> a, std::vector<double> b);

}  // namespace b2em

#endif  // B2EM_LAPLACE_H_
