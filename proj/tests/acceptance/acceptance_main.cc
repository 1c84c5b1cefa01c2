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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any failed. Pass criterion numbers as arguments to run a
// subset, e.g. `acceptance 2 5`.

#include <gmpxx.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "b2em/attacks.h"
#include "b2em/bench.h"
#include "b2em/bit_source.h"
#include "b2em/laplace.h"
#include "b2em/mechanism.h"
#include "b2em/precision.h"
#include "b2em/rr_bounds.h"
#include "b2em/sampling.h"
#include "oracle.h"

namespace b2em {
namespace {

using testing::BaseQ;
using testing::CachedTable;
using testing::ClosedForm;
using testing::CoinUp;
using testing::EnumerateSampler;
using testing::ForEachVector;
using testing::Pow2;
using testing::RoundedDistribution;
using testing::SymmetricDistribution;
using testing::TableCache;
using testing::TableProbabilities;
using testing::ToMpq;
using testing::Valuation;

constexpr uint64_t kSeed = 1;

struct Result {
  bool pass = false;
  std::string detail;
};

Result Fail(const std::string& why) { return {false, why}; }
Result Fail(const absl::Status& s) { return {false, s.ToString()}; }

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string Q(const mpq_class& q) {
  return absl::StrFormat("%.6g", q.get_d());
}

// max over i of a_i / b_i and b_i / a_i.
mpq_class MaxRatio(const std::vector<mpq_class>& a,
                   const std::vector<mpq_class>& b) {
  mpq_class worst = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    worst = std::max<mpq_class>(worst, a[i] / b[i]);
    worst = std::max<mpq_class>(worst, b[i] / a[i]);
  }
  return worst;
}

// 1. Exhaustive DP ratio over adjacent integer utility vectors.
Result Criterion1() {
  const auto start = std::chrono::steady_clock::now();
  MechanismConfig cfg;
  cfg.u_min = 0;
  cfg.u_max = 3;
  cfg.o_max = 5;
  absl::StatusOr<ExponentialMechanism> mech = ExponentialMechanism::Create(cfg);
  if (!mech.ok()) return Fail(mech.status());
  const mpq_class base = BaseQ(1, 1, 1);
  const mpq_class bound = 4;

  uint64_t pairs = 0;
  uint64_t oracle_mismatches = 0;
  mpq_class worst = 0;
  absl::Status error;
  for (size_t n = 1; n <= 5; ++n) {
    TableCache cache;
    std::vector<std::vector<int64_t>> vectors;
    ForEachVector<int64_t>({0, 1, 2, 3}, n,
                           [&](const std::vector<int64_t>& v) {
                             vectors.push_back(v);
                           });
    for (const auto& v : vectors) {
      absl::StatusOr<const std::vector<mpq_class>*> p =
          CachedTable(*mech, v, cache);
      if (!p.ok()) return Fail(p.status());
      if (**p != ClosedForm(base, v, 0)) ++oracle_mismatches;
    }
    // Neighbors differ by at most 1 in every coordinate.
    for (const auto& v : vectors) {
      const std::vector<mpq_class>& pv = cache.at(v);
      ForEachVector<int64_t>({-1, 0, 1}, n,
                             [&](const std::vector<int64_t>& delta) {
                               std::vector<int64_t> w = v;
                               for (size_t i = 0; i < n; ++i) {
                                 w[i] += delta[i];
                                 if (w[i] < 0 || w[i] > 3) return;
                               }
                               if (w == v) return;
                               ++pairs;
                               worst = std::max(worst,
                                                MaxRatio(pv, cache.at(w)));
                             });
    }
  }
  const double secs = Seconds(start);
  const bool pass = oracle_mismatches == 0 && worst <= bound && secs < 60;
  return {pass,
          absl::StrFormat("exact DP ratio: max %s (%s) over %d adjacent "
                          "pairs, limit 4; %d closed-form mismatches; %.1f s",
                          worst.get_str(), Q(worst), pairs, oracle_mismatches,
                          secs)};
}

// 2. Sampler exactness against full enumeration of the draw grid.
Result Criterion2() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kSeed);
  absl::StatusOr<ArithContext> ctx = ArithContext::Create(64);
  if (!ctx.ok()) return Fail(ctx.status());
  int tables = 0;
  uint64_t grid_points = 0;
  int deviations = 0;
  while (tables < 120) {
    const size_t n = 1 + rng() % 8;
    std::vector<ExactValue> w;
    for (size_t i = 0; i < n; ++i) {
      const int64_t m = 1 + static_cast<int64_t>(rng() % 31);
      const long e = static_cast<long>(rng() % 8) - 4;
      w.push_back(ExactValue::Dyadic(m, e));
    }
    absl::StatusOr<WeightTable> table = TotalAndCumulative(w, *ctx);
    if (!table.ok()) return Fail(table.status());
    long v = Valuation(ToMpq(table->weights[0]));
    for (const ExactValue& x : table->weights) {
      v = std::min(v, Valuation(ToMpq(x)));
    }
    // The grid step 2^(g-1-p) must divide every cumulative weight.
    const long p_min = std::max<long>(0, table->g - 1 - v);
    if (p_min > 16) continue;
    const long p = p_min + static_cast<long>(rng() % (17 - p_min));
    absl::StatusOr<std::vector<mpq_class>> expected =
        TableProbabilities(*table);
    if (!expected.ok()) return Fail(expected.status());
    for (SampleVariant variant :
         {SampleVariant::kStandard, SampleVariant::kFullScan}) {
      absl::StatusOr<std::vector<mpq_class>> got =
          EnumerateSampler(*table, p, variant);
      if (!got.ok()) return Fail(got.status());
      if (*got != *expected) ++deviations;
      grid_points += uint64_t{1} << (p + 1);
    }
    ++tables;
  }
  const double secs = Seconds(start);
  return {deviations == 0 && secs < 60,
          absl::StrFormat("sampler oracle: %d tables x 2 variants, %d grid "
                          "points, %d deviating distributions; %.1f s",
                          tables, grid_points, deviations, secs)};
}

// 3. Zero-rounding attack.
Result Criterion3() {
  const int64_t x = FindZeroRoundingX(2.0);
  if (x != 745) return Fail(absl::StrCat("derived x = ", x, ", expected 745"));
  absl::StatusOr<AttackReport> naive =
      RunAttackZero(2.0, 10, 1000, AttackTarget::kNaive, kSeed);
  if (!naive.ok()) return Fail(naive.status());

  absl::StatusOr<ExactTarget> target =
      MakeExactTarget(ZeroRoundingArms(x, 10), ExactTargetOptions{});
  if (!target.ok()) return Fail(target.status());
  TableCache cache;
  absl::StatusOr<std::vector<mpq_class>> in =
      RoundedDistribution(target->mechanism, target->shifted.in, cache);
  absl::StatusOr<std::vector<mpq_class>> out =
      RoundedDistribution(target->mechanism, target->shifted.out, cache);
  if (!in.ok()) return Fail(in.status());
  if (!out.ok()) return Fail(out.status());
  const mpq_class ratio = MaxRatio(*in, *out);

  absl::StatusOr<AttackReport> exact =
      RunAttackZero(2.0, 10, 1000, AttackTarget::kExact, kSeed);
  if (!exact.ok()) return Fail(exact.status());
  const bool pass =
      naive->advantage >= 0.85 && ratio <= 4 && exact->advantage <= 0.65;
  return {pass, absl::StrFormat(
                    "zero-rounding: x=%d; naive advantage %.3f (need >= "
                    "0.85); exact arm ratio %s = %s (limit 4), exact "
                    "advantage %.3f (need <= 0.65)",
                    x, naive->advantage, ratio.get_str(), Q(ratio),
                    exact->advantage)};
}

// 4. Truncated-addition attack.
Result Criterion4() {
  std::optional<TruncationParams> params =
      FindTruncationParams(30.0, uint64_t{1} << 20);
  if (!params.has_value()) return Fail("no truncation parameters found");
  if (!VerifyTruncation(*params)) return Fail("truncation identity fails");
  absl::StatusOr<AttackReport> naive =
      RunAttackTruncated(*params, 10000, AttackTarget::kNaive, kSeed);
  if (!naive.ok()) return Fail(naive.status());

  absl::StatusOr<ExactTarget> target =
      MakeExactTarget(TruncationArms(*params), ExactTargetOptions{});
  if (!target.ok()) return Fail(target.status());
  const AttackArms& arms = target->shifted;
  const auto first_in = static_cast<int64_t>(arms.in[0]);
  const auto first_out = static_cast<int64_t>(arms.out[0]);
  if (first_in != arms.in[0] || first_out != arms.out[0]) {
    return Fail("shifted o_1 utilities are not integers");
  }
  auto in = SymmetricDistribution(target->mechanism, first_in, arms.in[1],
                                  params->k);
  auto out = SymmetricDistribution(target->mechanism, first_out, arms.out[1],
                                   params->k);
  if (!in.ok()) return Fail(in.status());
  if (!out.ok()) return Fail(out.status());
  const mpq_class ratio = MaxRatio({in->first, in->second},
                                   {out->first, out->second});
  const bool pass = naive->freq_in == 1.0 &&
                    std::abs(naive->freq_out - 0.5) <= 0.05 && ratio <= 4;
  return {pass,
          absl::StrFormat(
              "truncated addition: eps=30, k=%d, x_s=%.6f; naive o_1 "
              "frequency %.4f with the record (need 1), %.4f without "
              "(need 0.50 +- 0.05); exact arm ratio %s (limit 4)",
              params->k, params->x_s, naive->freq_in, naive->freq_out,
              Q(ratio))};
}

// Sign of a + b * sqrt(2), exactly.
int SignSqrt2(const mpq_class& a, const mpq_class& b) {
  const int sa = sgn(a);
  const int sb = sgn(b);
  if (sa >= 0 && sb >= 0) return sa || sb;
  if (sa <= 0 && sb <= 0) return -1;
  // Opposite signs: compare a^2 with 2 b^2.
  const int c = cmp(a * a, 2 * b * b);
  return sa > 0 ? c : -c;
}

// 2^-u for u a multiple of 1/2, as a + b sqrt(2).
std::pair<mpq_class, mpq_class> HalfPow(double u) {
  const long twice = std::lround(2 * u);
  if (twice % 2 == 0) return {Pow2(-twice / 2), 0};
  // 2^-(k + 1/2) = 2^-k * sqrt(2) / 2.
  return {0, Pow2(-(twice - 1) / 2 - 1)};
}

// 5. Randomized-rounding sandwich, monotonicity and the accuracy bound.
Result Criterion5() {
  const auto start = std::chrono::steady_clock::now();
  MechanismConfig cfg;
  cfg.u_min = 0;
  cfg.u_max = 2;
  cfg.o_max = 6;
  absl::StatusOr<ExponentialMechanism> mech = ExponentialMechanism::Create(cfg);
  if (!mech.ok()) return Fail(mech.status());

  TableCache cache;
  uint64_t instances = 0, sandwich = 0, ordering = 0, interval = 0;
  double report_error = 0;
  absl::Status error;
  for (size_t n = 1; n <= 6 && error.ok(); ++n) {
    ForEachVector<double>({0, 0.5, 1, 1.5, 2}, n, [&](const std::vector<double>& u) {
      if (!error.ok()) return;
      absl::StatusOr<std::vector<mpq_class>> pr =
          RoundedDistribution(*mech, u, cache);
      if (!pr.ok()) {
        error = pr.status();
        return;
      }
      ++instances;
      // Unrounded p_i = (a_i + b_i r) / (A + B r), r = sqrt(2).
      std::vector<std::pair<mpq_class, mpq_class>> w;
      mpq_class A = 0, B = 0;
      for (double v : u) {
        w.push_back(HalfPow(v));
        A += w.back().first;
        B += w.back().second;
      }
      for (size_t i = 0; i < n; ++i) {
        const mpq_class& p = (*pr)[i];
        // p/4 <= p~  iff  4 p~ (A + B r) - (a + b r) >= 0.
        if (SignSqrt2(4 * p * A - w[i].first, 4 * p * B - w[i].second) < 0) {
          ++sandwich;
        }
        // p~ <= 4 p  iff  4 (a + b r) - p~ (A + B r) >= 0.
        if (SignSqrt2(4 * w[i].first - p * A, 4 * w[i].second - p * B) < 0) {
          ++sandwich;
        }
        for (size_t j = 0; j < n; ++j) {
          const bool ok = u[i] < u[j]    ? p > (*pr)[j]
                          : u[i] == u[j] ? p == (*pr)[j]
                                         : p < (*pr)[j];
          if (!ok) ++ordering;
        }
      }
      // Accuracy bound with the exact coin probabilities, in rationals.
      std::vector<mpq_class> down(n), up(n), pd(n), e(n);
      mpq_class e_total = 0;
      for (size_t i = 0; i < n; ++i) {
        down[i] = Pow2(-static_cast<long>(std::floor(u[i])));
        up[i] = Pow2(-static_cast<long>(std::ceil(u[i])));
        pd[i] = u[i] == std::floor(u[i]) ? mpq_class(1)
                                         : 1 - CoinUp(u[i] - std::floor(u[i]));
        e[i] = pd[i] * down[i] + (1 - pd[i]) * up[i];
        e_total += e[i];
      }
      std::vector<mpq_class> q(n);
      mpq_class q_total = 0;
      for (size_t i = 0; i < n; ++i) {
        const mpq_class rest = e_total - e[i];
        q[i] = pd[i] * down[i] / (down[i] + rest) +
               (1 - pd[i]) * up[i] / (up[i] + rest);
        q_total += q[i];
      }
      const mpq_class slack = 1 - q_total;
      const RRBounds rb = ComputeRRBounds(Eta(), u);
      for (size_t i = 0; i < n; ++i) {
        if ((*pr)[i] < q[i] || (*pr)[i] > q[i] + slack) ++interval;
        report_error =
            std::max(report_error, std::abs(rb.q[i] - q[i].get_d()));
      }
      report_error =
          std::max(report_error, std::abs(rb.slack - slack.get_d()));
    });
  }
  if (!error.ok()) return Fail(error);
  const double secs = Seconds(start);
  const bool pass =
      sandwich == 0 && ordering == 0 && interval == 0 && report_error <= 1e-12;
  return {pass,
          absl::StrFormat(
              "randomized rounding: %d instances; %d sandwich, %d ordering, "
              "%d [q, q+A] violations; reported bounds within %.2g of exact; "
              "%.1f s",
              instances, sandwich, ordering, interval, report_error, secs)};
}

// 6. Laplace against a conventional inverse-transform sampler.
Result Criterion6() {
  const std::vector<double> grid = SymmetricGrid(1.0 / 16, 100);
  absl::StatusOr<ClampedDiscreteLaplace> lap =
      ClampedDiscreteLaplace::FromGrid(grid, Eta(), SampleOptions{});
  if (!lap.ok()) return Fail(lap.status());
  const double eps = lap->mechanism().ReportedEpsilon();
  if (std::abs(eps - 2 * std::numbers::ln2) > 1e-12) {
    return Fail(absl::StrCat("epsilon is ", eps));
  }
  SeededBitSource src(kSeed);
  std::mt19937_64 rng(kSeed + 1);
  const InverseTransformSampler conventional(grid, 0.0, eps);
  std::vector<double> a, b;
  for (int i = 0; i < 6000; ++i) {
    absl::StatusOr<double> v = lap->Sample(0.0, src);
    if (!v.ok()) return Fail(v.status());
    a.push_back(*v);
    b.push_back(conventional.Sample(rng));
  }
  const double ks = KolmogorovSmirnov(a, b);
  return {ks <= 0.05,
          absl::StrFormat("Laplace fidelity: eps = 2 ln 2, gamma = 1/16, 200 "
                          "points, 6000 samples each; KS = %.4f (limit 0.05)",
                          ks)};
}

// 7. Precision sufficiency.
Result Criterion7() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Eta> etas;
  for (auto [x, y, z] : {std::array<uint64_t, 3>{1, 1, 1}, {15, 4, 1},
                         {1, 2, 2}}) {
    absl::StatusOr<Eta> e = Eta::Create(x, y, z);
    if (!e.ok()) return Fail(e.status());
    etas.push_back(*e);
  }
  std::mt19937_64 rng(kSeed);
  SeededBitSource src(kSeed);
  uint64_t runs = 0, failures = 0, above = 0, capped = 0, configs = 0;
  std::string first_failure;
  for (const Eta& eta : etas) {
    for (uint64_t o_max : {1, 16, 256}) {
      for (int64_t u_max = 1; u_max <= 32; ++u_max) {
        ++configs;
        const PrecisionRequest req{0, u_max, o_max, eta};
        absl::StatusOr<long> theo = TheoreticalPrecision(req);
        absl::StatusOr<long> emp = EmpiricalPrecision(req);
        if (!theo.ok()) return Fail(theo.status());
        if (!emp.ok()) return Fail(emp.status());
        if (*emp > *theo) ++above;
        if (*emp == *theo) ++capped;
        for (PrecisionStrategy strategy :
             {PrecisionStrategy::kTheoretical, PrecisionStrategy::kEmpirical}) {
          MechanismConfig cfg;
          cfg.u_min = 0;
          cfg.u_max = u_max;
          cfg.o_max = o_max;
          cfg.eta = eta;
          cfg.precision_strategy = strategy;
          absl::StatusOr<ExponentialMechanism> mech =
              ExponentialMechanism::Create(cfg);
          if (!mech.ok()) return Fail(mech.status());
          std::uniform_real_distribution<double> util(
              -1.0, static_cast<double>(u_max) + 1.0);
          std::vector<double> u;
          for (int r = 0; r < 1000; ++r) {
            u.resize(1 + rng() % o_max);
            for (double& v : u) v = util(rng);
            ++runs;
            absl::StatusOr<size_t> i = mech->SampleIndex(u, src);
            if (!i.ok()) {
              if (failures++ == 0) first_failure = i.status().ToString();
            }
          }
        }
      }
    }
  }
  const double secs = Seconds(start);
  return {failures == 0 && above == 0,
          absl::StrFormat(
              "precision: %d configs, %d runs; %d failed%s; empirical above "
              "theoretical in %d configs, equal in %d; %.1f s",
              configs, runs, failures,
              failures ? absl::StrCat(" (", first_failure, ")") : "", above,
              capped, secs)};
}

// 8. Timing channel.
Result Criterion8() {
  BenchOptions opts;
  opts.sizes = {1, 16};
  opts.reps = 200;
  opts.seed = kSeed;
  absl::StatusOr<std::vector<BenchRecord>> recs =
      RunScenario("timing-channel", opts);
  if (!recs.ok()) return Fail(recs.status());
  const std::map<uint64_t, double> ratios = TimingRatios(*recs);
  // Mean ratios, for context only.
  std::map<uint64_t, std::array<double, 2>> sums;
  for (const BenchRecord& r : *recs) {
    sums[r.instance_size][r.config == "u0" ? 0 : 1] +=
        static_cast<double>(r.elapsed_ns);
  }
  auto mean = [&](uint64_t k) { return sums[k][0] / sums[k][1]; };
  const double r1 = ratios.count(1) ? ratios.at(1) : 0;
  const double r16 = ratios.count(16) ? ratios.at(16) : 99;
  return {r1 >= 1.2 && r16 <= 1.1,
          absl::StrFormat("timing channel: median u0/u1 %.3f at k=1 (need >= "
                          "1.2), %.3f at k=16 (need <= 1.1); means %.3f and "
                          "%.3f; 200 reps",
                          r1, r16, mean(1), mean(16))};
}

// 9. Throughput at 75k outcomes.
Result Criterion9() {
  BenchOptions opts;
  opts.sizes = {75000};
  opts.reps = 1;
  opts.seed = kSeed;
  opts.configs = {"base2", "naive"};
  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<std::vector<BenchRecord>> recs =
      RunScenario("outcome-scaling", opts);
  if (!recs.ok()) return Fail(recs.status());
  const double secs = Seconds(start);
  std::string times;
  for (const BenchRecord& r : *recs) {
    absl::StrAppend(&times, absl::StrFormat(" %s %.3f s;", r.config,
                                            r.elapsed_ns * 1e-9));
  }
  return {true, absl::StrFormat("throughput: n = 75000 completed;%s %.1f s "
                                "total (reference: about 10 s on a 2-core "
                                "machine)",
                                times, secs)};
}

}  // namespace
}  // namespace b2em

int main(int argc, char** argv) {
  const std::vector<std::function<b2em::Result()>> criteria = {
      b2em::Criterion1, b2em::Criterion2, b2em::Criterion3,
      b2em::Criterion4, b2em::Criterion5, b2em::Criterion6,
      b2em::Criterion7, b2em::Criterion8, b2em::Criterion9};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  bool all = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(number)) continue;
    const b2em::Result r = criteria[i]();
    std::printf("criterion %d %s: %s\n", number, r.pass ? "PASS" : "FAIL",
                r.detail.c_str());
    std::fflush(stdout);
    all &= r.pass;
  }
  return all ? 0 : 1;
}
