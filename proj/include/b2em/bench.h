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

// Benchmark scenarios.
//
// Configurations:
//   naive        double-precision base-e mechanism with matching weights
//   base2        exact mechanism, full-scan sampling, theoretical precision
//   base2-early  standard sampling, which stops once one element is left
//   base2-opt    lazy-bit sampling with a padded total
//   base2-emp    base2 with empirical precision
//
// Each trial draws its randomness from a generator seeded by (seed, size,
// trial), so outcomes replay identically with or without --parallel.
// Timings cover the mechanism call only: configuration, precision, weights
// and sampling.

#ifndef B2EM_BENCH_H_
#define B2EM_BENCH_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace b2em {

struct BenchRecord {
  std::string scenario;
  std::string config;
  uint64_t instance_size = 0;
  uint64_t trial = 0;
  uint64_t elapsed_ns = 0;
  std::string outcome;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct BenchOptions {
  // Meaning depends on the scenario: n for outcome-scaling,
  // precision-method and utility-range, 1/gamma for laplace, k for
  // timing-channel.
  std::vector<uint64_t> sizes;
  uint64_t reps = 5;
  uint64_t seed = 1;
  // Empty means the scenario's default set.
  std::vector<std::string> configs;
  // Worker threads; 1 runs inline.
  int parallel = 1;
  // Minimum draws for every scenario except timing-channel.
  int k = 1;
};

const std::vector<std::string>& ScenarioNames();

absl::StatusOr<std::vector<BenchRecord>> RunScenario(absl::string_view name,
                                                     const BenchOptions& opts);

// Median of u0 over median of u1 per k, from timing-channel records.
std::map<uint64_t, double> TimingRatios(const std::vector<BenchRecord>& recs);

// Coefficient of determination of the least-squares line through (x, y).
double LinearFitR2(const std::vector<double>& x, const std::vector<double>& y);

double Median(std::vector<double> v);

}  // namespace b2em

#endif  // B2EM_BENCH_H_
