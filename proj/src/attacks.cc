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

#include "b2em/attacks.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "b2em/bit_source.h"
#include "b2em/mechanism.h"

namespace b2em {
namespace {

double Uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace

std::optional<size_t> NaiveExpMech(double eps,
                                   std::span<const double> utilities,
                                   std::mt19937_64& rng) {
  std::vector<double> weights;
  weights.reserve(utilities.size());
  for (double u : utilities) weights.push_back(std::exp(-(eps / 2.0) * u));
  double total = 0;
  for (double w : weights) total += w;
  // c_weights[i] = sum of weights[j] / T for j <= i, summed left to right.
  std::vector<double> c_weights;
  c_weights.reserve(weights.size());
  double running = 0;
  for (double w : weights) {
    running += w / total;
    c_weights.push_back(running);
  }
  const double index = Uniform53(rng);
  for (size_t i = 0; i < c_weights.size(); ++i) {
    if (c_weights[i] >= index) return i;
  }
  return std::nullopt;
}

int64_t FindZeroRoundingX(double eps) {
  const double beta = eps / 2.0;
  auto positive = [beta](int64_t x) {
    return std::exp(-beta * static_cast<double>(x)) > 0;
  };
  // exp(-beta * lo) > 0 and exp(-beta * hi) == 0 throughout.
  int64_t lo = 0;
  int64_t hi = 1;
  while (positive(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    (positive(mid) ? lo : hi) = mid;
  }
  return lo;
}

bool VerifyTruncation(const TruncationParams& params) {
  const double beta = params.eps / 2.0;
  const double large = std::exp(-beta * params.x_l);
  const double small = std::exp(-beta * (params.x_s + 1));
  if (!(small > 0)) return false;
  double acc = large;
  for (uint64_t i = 0; i < params.k; ++i) acc += small;
  return acc == large;
}

std::optional<TruncationParams> FindTruncationParams(double eps,
                                                     uint64_t max_outcomes) {
  if (!(eps > 0)) return std::nullopt;
  const double beta = eps / 2.0;
  for (uint64_t k = 2; k < max_outcomes && k <= (uint64_t{1} << 40); k *= 2) {
    TruncationParams params;
    params.eps = eps;
    params.x_l = 0;
    params.x_s = 1 + std::log(static_cast<double>(k)) / beta;
    params.k = k;
    if (VerifyTruncation(params)) return params;
  }
  return std::nullopt;
}

absl::StatusOr<AttackTarget> ParseAttackTarget(absl::string_view s) {
  if (s == "naive") return AttackTarget::kNaive;
  if (s == "exact") return AttackTarget::kExact;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown attack target '", s, "'"));
}

AttackArms ZeroRoundingArms(int64_t x, uint64_t n_outcomes) {
  AttackArms arms;
  const double xd = static_cast<double>(x);
  arms.in.assign(n_outcomes, xd + 1);
  arms.in[0] = xd;
  arms.out.assign(n_outcomes, xd);
  return arms;
}

AttackArms TruncationArms(const TruncationParams& params) {
  AttackArms arms;
  arms.in.assign(params.k + 1, params.x_s + 1);
  arms.in[0] = params.x_l;
  arms.out.assign(params.k + 1, params.x_s);
  arms.out[0] = params.x_l + 1;
  return arms;
}

absl::StatusOr<ExactTarget> MakeExactTarget(const AttackArms& arms,
                                            const ExactTargetOptions& opts) {
  if (arms.in.empty() || arms.in.size() != arms.out.size()) {
    return absl::InvalidArgumentError("arms must be nonempty and equal-sized");
  }
  // The shift is the attacker's own constant, so it reveals nothing.
  const double shift = *std::min_element(arms.in.begin(), arms.in.end());
  AttackArms shifted;
  double top = 0;
  for (size_t i = 0; i < arms.in.size(); ++i) {
    shifted.in.push_back(arms.in[i] - shift);
    shifted.out.push_back(arms.out[i] - shift);
    top = std::max({top, shifted.in.back(), shifted.out.back()});
  }
  MechanismConfig cfg;
  cfg.u_min = 0;
  cfg.u_max = static_cast<int64_t>(std::ceil(top));
  cfg.o_max = shifted.in.size();
  cfg.eta = opts.eta;
  cfg.sample = opts.sample;
  absl::StatusOr<ExponentialMechanism> mech = ExponentialMechanism::Create(cfg);
  if (!mech.ok()) return mech.status();
  return ExactTarget{std::move(shifted), std::move(*mech)};
}

absl::StatusOr<AttackReport> RunAttack(absl::string_view name,
                                       const AttackArms& arms, double eps,
                                       uint64_t trials, AttackTarget target,
                                       uint64_t seed,
                                       const ExactTargetOptions& exact) {
  if (arms.in.size() < 2 || arms.in.size() != arms.out.size()) {
    return absl::InvalidArgumentError("an attack needs at least 2 outcomes");
  }
  AttackReport report;
  report.attack = std::string(name);
  report.target = target == AttackTarget::kNaive ? "naive" : "exact";
  report.trials = trials;

  uint64_t hits_in = 0;
  uint64_t hits_out = 0;
  if (target == AttackTarget::kNaive) {
    std::mt19937_64 rng(seed);
    for (uint64_t t = 0; t < trials; ++t) {
      hits_in += NaiveExpMech(eps, arms.in, rng) == std::optional<size_t>(0);
      hits_out += NaiveExpMech(eps, arms.out, rng) == std::optional<size_t>(0);
    }
    report.epsilon = eps;
  } else {
    absl::StatusOr<ExactTarget> t = MakeExactTarget(arms, exact);
    if (!t.ok()) return t.status();
    const ExponentialMechanism& mech = t->mechanism;
    const std::vector<double>& in = t->shifted.in;
    const std::vector<double>& out = t->shifted.out;
    SeededBitSource src(seed);
    for (uint64_t t = 0; t < trials; ++t) {
      absl::StatusOr<size_t> a = mech.SampleIndex(std::span(in), src);
      if (!a.ok()) return a.status();
      absl::StatusOr<size_t> b = mech.SampleIndex(std::span(out), src);
      if (!b.ok()) return b.status();
      hits_in += *a == 0;
      hits_out += *b == 0;
    }
    report.epsilon = mech.ReportedEpsilon();
  }
  report.correct = hits_in + (trials - hits_out);
  if (trials > 0) {
    report.freq_in = static_cast<double>(hits_in) / trials;
    report.freq_out = static_cast<double>(hits_out) / trials;
  }
  report.advantage = report.freq_in - report.freq_out;
  return report;
}

absl::StatusOr<AttackReport> RunAttackZero(double eps, uint64_t n_outcomes,
                                           uint64_t trials,
                                           AttackTarget target, uint64_t seed,
                                           const ExactTargetOptions& exact) {
  if (!(eps > 0)) return absl::InvalidArgumentError("eps must be positive");
  const int64_t x = FindZeroRoundingX(eps);
  return RunAttack("zero", ZeroRoundingArms(x, n_outcomes), eps, trials,
                   target, seed, exact);
}

absl::StatusOr<AttackReport> RunAttackTruncated(
    const TruncationParams& params, uint64_t trials, AttackTarget target,
    uint64_t seed, const ExactTargetOptions& exact) {
  return RunAttack("truncated", TruncationArms(params), params.eps, trials,
                   target, seed, exact);
}

}  // namespace b2em
