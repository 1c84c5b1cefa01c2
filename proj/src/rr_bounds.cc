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

#include "b2em/rr_bounds.h"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace b2em {

double RRBounds::max_error_bound() const {
  return error_bound.empty()
             ? 0.0
             : *std::max_element(error_bound.begin(), error_bound.end());
}

RRBounds ComputeRRBounds(double eps, std::span<const double> utilities) {
  assert(!utilities.empty());
  const size_t n = utilities.size();
  // Every exponential is taken relative to the smallest floor, which scales
  // numerators and denominators alike and keeps them away from underflow.
  double shift = std::floor(utilities[0]);
  for (double u : utilities) shift = std::min(shift, std::floor(u));
  auto weight = [&](double v) { return std::exp(-eps * (v - shift)); };

  std::vector<double> down(n), up(n), p_down(n), expected(n);
  double expected_total = 0;
  double unrounded_total = 0;
  for (size_t i = 0; i < n; ++i) {
    const double u = utilities[i];
    p_down[i] = std::ceil(u) - u;
    down[i] = weight(std::floor(u));
    up[i] = weight(std::ceil(u));
    expected[i] = p_down[i] * down[i] + (1 - p_down[i]) * up[i];
    expected_total += expected[i];
    unrounded_total += weight(u);
  }

  RRBounds out;
  out.q.resize(n);
  out.deviation.resize(n);
  out.error_bound.resize(n);
  out.unrounded.resize(n);
  double q_total = 0;
  for (size_t i = 0; i < n; ++i) {
    const double rest = expected_total - expected[i];
    out.q[i] = p_down[i] * down[i] / (down[i] + rest) +
               (1 - p_down[i]) * up[i] / (up[i] + rest);
    q_total += out.q[i];
    out.unrounded[i] = weight(utilities[i]) / unrounded_total;
  }
  out.slack = std::max(0.0, 1 - q_total);
  for (size_t i = 0; i < n; ++i) {
    out.deviation[i] = out.unrounded[i] - out.q[i];
    out.error_bound[i] = out.slack + std::abs(out.deviation[i]);
  }
  return out;
}

RRBounds ComputeRRBounds(const Eta& eta, std::span<const double> utilities) {
  return ComputeRRBounds(ReportOnlyEpsilon(eta), utilities);
}

}  // namespace b2em
