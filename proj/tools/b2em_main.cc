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

// b2em: command-line front end.
//
//   b2em sample  --eta 1,1,1 --umin 0 --umax 10 --omax 10 --utilities u.txt
//   b2em laplace --eta 1,1,1 --lower -8 --upper 8 --gamma 0.03125 --target 0
//   b2em attack zero --eps 2 --outcomes 10 --trials 1000 --target naive
//   b2em bench timing-channel --sizes 1,16 --reps 200 --csv t.csv
//
// Without --seed, randomness comes from the operating system.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/strip.h"
#include "b2em/attacks.h"
#include "b2em/bench.h"
#include "b2em/bit_source.h"
#include "b2em/csv.h"
#include "b2em/laplace.h"
#include "b2em/mechanism.h"
#include "json.hpp"

namespace {

using json = nlohmann::json;

struct Globals {
  std::optional<uint64_t> seed;
  std::string csv;
  bool json = false;
};

int Fail(const absl::Status& s) {
  std::cerr << "error: " << s << "\n";
  return 1;
}

std::unique_ptr<b2em::BitSource> Source(const Globals& g) {
  return b2em::MakeBitSource(g.seed.has_value(), g.seed.value_or(0));
}

absl::StatusOr<std::vector<std::string>> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    absl::string_view v = absl::StripAsciiWhitespace(line);
    if (!v.empty()) lines.emplace_back(v);
  }
  return lines;
}

// Utilities are parsed as doubles, which are exact dyadic rationals.
absl::StatusOr<std::vector<double>> ReadUtilities(const std::string& path) {
  absl::StatusOr<std::vector<std::string>> lines = ReadLines(path);
  if (!lines.ok()) return lines.status();
  std::vector<double> out;
  for (const std::string& l : *lines) {
    double v;
    if (!absl::SimpleAtod(l, &v)) {
      return absl::InvalidArgumentError("not a number: " + l);
    }
    out.push_back(v);
  }
  return out;
}

struct SampleArgs {
  std::string eta = "1,1,1";
  int64_t umin = 0;
  int64_t umax = 0;
  uint64_t omax = 1;
  std::string utilities;
  std::string outcomes;
  int k = 1;
  std::string variant = "full-scan";
  std::string strategy = "theoretical";
};

int RunSample(const SampleArgs& a, const Globals& g) {
  absl::StatusOr<b2em::Eta> eta = b2em::Eta::Parse(a.eta);
  if (!eta.ok()) return Fail(eta.status());
  absl::StatusOr<b2em::SampleVariant> variant =
      b2em::ParseSampleVariant(a.variant);
  if (!variant.ok()) return Fail(variant.status());
  absl::StatusOr<b2em::PrecisionStrategy> strategy =
      b2em::ParsePrecisionStrategy(a.strategy);
  if (!strategy.ok()) return Fail(strategy.status());

  b2em::MechanismConfig cfg;
  cfg.u_min = a.umin;
  cfg.u_max = a.umax;
  cfg.o_max = a.omax;
  cfg.eta = *eta;
  cfg.sample = {a.k, *variant};
  cfg.precision_strategy = *strategy;
  // Configure before touching the utilities.
  absl::StatusOr<b2em::ExponentialMechanism> mech =
      b2em::ExponentialMechanism::Create(cfg);
  if (!mech.ok()) return Fail(mech.status());

  absl::StatusOr<std::vector<double>> u = ReadUtilities(a.utilities);
  if (!u.ok()) return Fail(u.status());
  std::vector<std::string> outcomes;
  if (!a.outcomes.empty()) {
    absl::StatusOr<std::vector<std::string>> o = ReadLines(a.outcomes);
    if (!o.ok()) return Fail(o.status());
    outcomes = std::move(*o);
    if (outcomes.size() != u->size()) {
      return Fail(absl::InvalidArgumentError(
          "utilities and outcomes differ in length"));
    }
  } else {
    for (size_t i = 0; i < u->size(); ++i) outcomes.push_back(std::to_string(i));
  }
  auto src = Source(g);
  b2em::MechanismStats stats;
  absl::StatusOr<size_t> i = mech->SampleIndex(*u, *src, &stats);
  if (!i.ok()) return Fail(i.status());
  if (g.json) {
    std::cout << json{{"outcome", outcomes[*i]},
                      {"index", *i},
                      {"precision", mech->precision()},
                      {"epsilon", mech->ReportedEpsilon()},
                      {"draws", stats.sample.draws}}
                     .dump()
              << "\n";
  } else {
    std::cout << outcomes[*i] << "\n";
    std::cerr << absl::StrFormat("epsilon (report only) = %.6f, precision = %d\n",
                                 mech->ReportedEpsilon(), mech->precision());
  }
  return 0;
}

struct LaplaceArgs {
  std::string eta = "1,1,1";
  double lower = -10;
  double upper = 10;
  double gamma = 1.0 / 16;
  double target = 0;
  uint64_t samples = 1;
  int k = 1;
  std::string variant = "full-scan";
  std::string strategy = "theoretical";
};

int RunLaplace(const LaplaceArgs& a, const Globals& g) {
  absl::StatusOr<b2em::Eta> eta = b2em::Eta::Parse(a.eta);
  if (!eta.ok()) return Fail(eta.status());
  absl::StatusOr<b2em::SampleVariant> variant =
      b2em::ParseSampleVariant(a.variant);
  if (!variant.ok()) return Fail(variant.status());
  absl::StatusOr<b2em::PrecisionStrategy> strategy =
      b2em::ParsePrecisionStrategy(a.strategy);
  if (!strategy.ok()) return Fail(strategy.status());
  b2em::LaplaceConfig cfg;
  cfg.lower = a.lower;
  cfg.upper = a.upper;
  cfg.gamma = a.gamma;
  cfg.eta = *eta;
  cfg.sample = {a.k, *variant};
  cfg.precision_strategy = *strategy;
  absl::StatusOr<b2em::ClampedDiscreteLaplace> lap =
      b2em::ClampedDiscreteLaplace::Create(cfg);
  if (!lap.ok()) return Fail(lap.status());
  auto src = Source(g);
  json values = json::array();
  for (uint64_t i = 0; i < a.samples; ++i) {
    absl::StatusOr<double> v = lap->Sample(a.target, *src);
    if (!v.ok()) return Fail(v.status());
    if (g.json) {
      values.push_back(*v);
    } else {
      std::cout << absl::StrFormat("%.17g\n", *v);
    }
  }
  if (g.json) {
    std::cout << json{{"grid_size", lap->grid().size()},
                      {"precision", lap->mechanism().precision()},
                      {"epsilon", lap->mechanism().ReportedEpsilon()},
                      {"samples", values}}
                     .dump()
              << "\n";
  }
  return 0;
}

struct AttackArgs {
  std::string kind = "zero";
  double eps = 2;
  uint64_t outcomes = 10;
  uint64_t trials = 1000;
  std::string target = "naive";
  std::string eta = "1,1,1";
};

int RunAttack(const AttackArgs& a, const Globals& g) {
  absl::StatusOr<b2em::AttackTarget> target = b2em::ParseAttackTarget(a.target);
  if (!target.ok()) return Fail(target.status());
  absl::StatusOr<b2em::Eta> eta = b2em::Eta::Parse(a.eta);
  if (!eta.ok()) return Fail(eta.status());
  b2em::ExactTargetOptions exact;
  exact.eta = *eta;
  const uint64_t seed = g.seed.value_or(std::random_device{}());

  absl::StatusOr<b2em::AttackReport> report;
  json params;
  if (a.kind == "zero") {
    const int64_t x = b2em::FindZeroRoundingX(a.eps);
    params = {{"x", x}, {"outcomes", a.outcomes}};
    report = b2em::RunAttackZero(a.eps, a.outcomes, a.trials, *target, seed,
                                 exact);
  } else if (a.kind == "truncated") {
    std::optional<b2em::TruncationParams> p =
        b2em::FindTruncationParams(a.eps, a.outcomes);
    if (!p.has_value()) {
      std::cout << absl::StrFormat(
          "infeasible: no truncation parameters for eps=%g within %d "
          "outcomes\n",
          a.eps, a.outcomes);
      return 2;
    }
    params = {{"x_l", p->x_l}, {"x_s", p->x_s}, {"outcomes", p->k + 1}};
    report = b2em::RunAttackTruncated(*p, a.trials, *target, seed, exact);
  } else {
    return Fail(absl::InvalidArgumentError("attack must be zero|truncated"));
  }
  if (!report.ok()) return Fail(report.status());
  const b2em::AttackReport& r = *report;
  const std::string row = absl::StrFormat(
      "%s,%s,%d,%d,%.6f,%.6f,%.6f", r.attack, r.target, r.trials, r.correct,
      r.freq_in, r.freq_out, r.advantage);
  if (!g.csv.empty()) {
    std::ofstream out(g.csv);
    out << "attack,target,trials,correct,freq_in,freq_out,advantage\n"
        << row << "\n";
  }
  if (g.json) {
    std::cout << json{{"attack", r.attack},     {"target", r.target},
                      {"trials", r.trials},     {"correct", r.correct},
                      {"freq_in", r.freq_in},   {"freq_out", r.freq_out},
                      {"advantage", r.advantage}, {"epsilon", r.epsilon},
                      {"params", params}}
                     .dump()
              << "\n";
    return 0;
  }
  std::cout << row << "\n";
  std::cout << absl::StrFormat(
      "%s attack on the %s mechanism: o_1 chosen %.1f%% with the record, "
      "%.1f%% without; advantage %.3f over %d trials per arm\n",
      r.attack, r.target, 100 * r.freq_in, 100 * r.freq_out, r.advantage,
      r.trials);
  return 0;
}

struct BenchArgs {
  std::string scenario;
  std::vector<uint64_t> sizes;
  uint64_t reps = 5;
  std::vector<std::string> configs;
  int parallel = 1;
  int k = 1;
};

int RunBench(const BenchArgs& a, const Globals& g) {
  b2em::BenchOptions opts;
  opts.sizes = a.sizes;
  opts.reps = a.reps;
  opts.seed = g.seed.value_or(1);
  opts.configs = a.configs;
  opts.parallel = a.parallel;
  opts.k = a.k;
  absl::StatusOr<std::vector<b2em::BenchRecord>> recs =
      b2em::RunScenario(a.scenario, opts);
  if (!recs.ok()) return Fail(recs.status());
  if (!g.csv.empty()) {
    if (absl::Status s = b2em::WriteCsv(*recs, g.csv); !s.ok()) return Fail(s);
  } else if (!g.json) {
    if (absl::Status s = b2em::WriteCsv(*recs, std::cout); !s.ok()) {
      return Fail(s);
    }
  }
  // Per (config, size) medians, and the u0/u1 ratios for timing-channel.
  std::map<std::pair<std::string, uint64_t>, std::vector<double>> times;
  for (const b2em::BenchRecord& r : *recs) {
    times[{r.config, r.instance_size}].push_back(
        static_cast<double>(r.elapsed_ns));
  }
  json summary = json::array();
  for (const auto& [key, t] : times) {
    summary.push_back({{"config", key.first},
                       {"instance_size", key.second},
                       {"median_ns", b2em::Median(t)},
                       {"reps", t.size()}});
  }
  json out = {{"scenario", a.scenario}, {"summary", summary}};
  if (a.scenario == "timing-channel") {
    json ratios = json::object();
    for (const auto& [k, ratio] : b2em::TimingRatios(*recs)) {
      ratios[std::to_string(k)] = ratio;
    }
    out["u0_over_u1"] = ratios;
  }
  if (g.json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cerr << out.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Base-2 exponential mechanism with exact arithmetic"};
  app.require_subcommand(1);
  Globals g;
  uint64_t seed = 0;
  auto* seed_opt =
      app.add_option("--seed", seed, "Seed for reproducible randomness");
  app.add_option("--csv", g.csv, "Write records to this CSV file");
  app.add_flag("--json", g.json, "Print a JSON report");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Run the mechanism once");
  sample->fallthrough();
  sample->add_option("--eta", sa.eta, "Privacy parameter x,y,z");
  sample->add_option("--umin", sa.umin)->required();
  sample->add_option("--umax", sa.umax)->required();
  sample->add_option("--omax", sa.omax)->required();
  sample->add_option("--utilities", sa.utilities, "One utility per line")
      ->required()
      ->check(CLI::ExistingFile);
  sample->add_option("--outcomes", sa.outcomes, "One outcome per line")
      ->check(CLI::ExistingFile);
  sample->add_option("--k", sa.k, "Minimum rejection-loop draws");
  sample->add_option("--variant", sa.variant)
      ->check(CLI::IsMember({"standard", "full-scan", "optimized"}));
  sample->add_option("--precision-strategy", sa.strategy)
      ->check(CLI::IsMember({"theoretical", "empirical"}));

  LaplaceArgs la;
  auto* laplace =
      app.add_subcommand("laplace", "Clamped discrete Laplace samples");
  laplace->fallthrough();
  laplace->add_option("--eta", la.eta);
  laplace->add_option("--lower", la.lower);
  laplace->add_option("--upper", la.upper);
  laplace->add_option("--gamma", la.gamma, "Grid spacing, a power of two");
  laplace->add_option("--target", la.target);
  laplace->add_option("--samples", la.samples);
  laplace->add_option("--k", la.k);
  laplace->add_option("--variant", la.variant)
      ->check(CLI::IsMember({"standard", "full-scan", "optimized"}));
  laplace->add_option("--precision-strategy", la.strategy)
      ->check(CLI::IsMember({"theoretical", "empirical"}));

  AttackArgs aa;
  auto* attack = app.add_subcommand("attack", "Floating-point attacks");
  attack->fallthrough();
  attack->add_option("kind", aa.kind)
      ->required()
      ->check(CLI::IsMember({"zero", "truncated"}));
  attack->add_option("--eps", aa.eps);
  attack->add_option("--outcomes", aa.outcomes);
  attack->add_option("--trials", aa.trials);
  attack->add_option("--target", aa.target)
      ->check(CLI::IsMember({"naive", "exact"}));
  attack->add_option("--eta", aa.eta, "eta for the exact target");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Benchmark scenarios");
  bench->fallthrough();
  bench->add_option("scenario", ba.scenario)
      ->required()
      ->check(CLI::IsMember(b2em::ScenarioNames()));
  bench->add_option("--sizes", ba.sizes)->delimiter(',')->required();
  bench->add_option("--reps", ba.reps);
  bench->add_option("--configs", ba.configs)->delimiter(',');
  bench->add_option("--parallel", ba.parallel);
  bench->add_option("--k", ba.k);

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;

  if (*sample) return RunSample(sa, g);
  if (*laplace) return RunLaplace(la, g);
  if (*attack) return RunAttack(aa, g);
  if (*bench) return RunBench(ba, g);
  return 1;
}
