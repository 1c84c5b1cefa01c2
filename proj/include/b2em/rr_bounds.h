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

// Accuracy bounds for randomized rounding, for reporting.
//
// For weights e^(-eps * u) the probability that the rounded mechanism picks
// o is at least q_o, and differs from the unrounded probability by at most
// A + |B_o|. Plain double arithmetic: nothing here feeds the sampler.

#ifndef B2EM_RR_BOUNDS_H_
#define B2EM_RR_BOUNDS_H_

#include <span>
#include <vector>

#include "b2em/privacy_params.h"

namespace b2em {

struct RRBounds {
  // Lower bound on the rounded probability of each outcome.
  std::vector<double> q;
  // 1 - sum(q). Upper bound on the error of any single q.
  double slack = 0;
  // Unrounded probability minus q, per outcome.
  std::vector<double> deviation;
  // slack + |deviation|, per outcome.
  std::vector<double> error_bound;
  // The unrounded mechanism's probabilities.
  std::vector<double> unrounded;

  double max_error_bound() const;
};

// `eps` is the coefficient in e^(-eps * u). Requires at least one utility.
RRBounds ComputeRRBounds(double eps, std::span<const double> utilities);

// Same for the base-2 weights 2^(-eta * u), i.e. eps = ln(2) * eta.
RRBounds ComputeRRBounds(const Eta& eta, std::span<const double> utilities);

}  // namespace b2em

#endif  // B2EM_RR_BOUNDS_H_
