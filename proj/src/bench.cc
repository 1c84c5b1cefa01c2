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

#include "b2em/bench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "b2em/attacks.h"
#include "b2em/bit_source.h"
#include "b2em/laplace.h"
#include "b2em/mechanism.h"

namespace b2em {
namespace {

uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t TrialSeed(uint64_t seed, uint64_t size, uint64_t trial) {
  return Mix(Mix(Mix(seed) ^ size) ^ trial);
}

// One benchmark instance: the outcome set and its utilities, fixed before
// the clock starts.
struct Instance {
  int64_t u_min = 0;
  int64_t u_max = 0;
  std::vector<double> utilities;
  std::vector<std::string> labels;
};

struct Trial {
  uint64_t elapsed_ns;
  std::string outcome;
};

using Runner = std::function<absl::StatusOr<Trial>(uint64_t seed)>;

template <typename Fn>
absl::StatusOr<Trial> Timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<size_t> index = fn();
  const auto stop = std::chrono::steady_clock::now();
  if (!index.ok()) return index.status();
  const auto ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start);
  return Trial{static_cast<uint64_t>(std::max<int64_t>(ns.count(), 1)),
               std::to_string(*index)};
}

absl::StatusOr<Runner> MakeRunner(const std::string& config,
                                  const Instance& inst, const Eta& eta,
                                  int k) {
  if (config == "naive") {
    const double eps = 2.0 * std::numbers::ln2 * eta.ApproxValue();
    return Runner([&inst, eps](uint64_t seed) -> absl::StatusOr<Trial> {
      std::mt19937_64 rng(seed);
      return Timed([&]() -> absl::StatusOr<size_t> {
        std::optional<size_t> i = NaiveExpMech(eps, inst.utilities, rng);
        if (!i.has_value()) {
          return absl::InternalError("naive mechanism returned nothing");
        }
        return *i;
      });
    });
  }
  MechanismConfig cfg;
  cfg.u_min = inst.u_min;
  cfg.u_max = inst.u_max;
  cfg.o_max = inst.utilities.size();
  cfg.eta = eta;
  cfg.sample.k = k;
  if (config == "base2") {
    cfg.sample.variant = SampleVariant::kFullScan;
  } else if (config == "base2-early") {
    cfg.sample.variant = SampleVariant::kStandard;
  } else if (config == "base2-opt") {
    cfg.sample.variant = SampleVariant::kOptimized;
  } else if (config == "base2-emp") {
    cfg.precision_strategy = PrecisionStrategy::kEmpirical;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown configuration '", config, "'"));
  }
  return Runner([&inst, cfg](uint64_t seed) -> absl::StatusOr<Trial> {
    SeededBitSource src(seed);
    return Timed([&]() -> absl::StatusOr<size_t> {
      absl::StatusOr<ExponentialMechanism> mech =
          ExponentialMechanism::Create(cfg);
      if (!mech.ok()) return mech.status();
      return mech->SampleIndex(std::span<const double>(inst.utilities), src);
    });
  });
}

Instance OutcomeScaling(uint64_t n) {
  Instance inst;
  inst.u_max = static_cast<int64_t>(n);
  for (uint64_t o = 1; o <= n; ++o) {
    inst.utilities.push_back(static_cast<double>(o));
    inst.labels.push_back(std::to_string(o));
  }
  return inst;
}

Instance UtilityRange(uint64_t n) {
  constexpr uint64_t kOthers = 1000;
  Instance inst;
  inst.u_max = static_cast<int64_t>(kOthers + n);
  inst.utilities.push_back(0);
  inst.labels.push_back("0");
  for (uint64_t i = 1; i <= kOthers; ++i) {
    inst.utilities.push_back(static_cast<double>(i + n));
    inst.labels.push_back(std::to_string(i + n));
  }
  return inst;
}

// 256 outcomes with eta = 1. u1 gives every outcome utility 1 (total weight
// 128, never rejects); u0 lowers the first to 0 (total 128.5, rejects about
// half the time).
Instance TimingInstance(bool u0) {
  Instance inst;
  inst.u_max = 1;
  inst.utilities.assign(256, 1.0);
  if (u0) inst.utilities[0] = 0.0;
  for (int i = 0; i < 256; ++i) inst.labels.push_back(std::to_string(i));
  return inst;
}

struct Task {
  uint64_t size;
  uint64_t trial;
  size_t config;
};

absl::StatusOr<std::vector<BenchRecord>> RunTasks(
    const std::string& scenario, const std::vector<std::string>& configs,
    const std::vector<Task>& tasks,
    const std::function<absl::StatusOr<Trial>(const Task&)>& run,
    int parallel) {
  std::vector<BenchRecord> out(tasks.size());
  absl::Status failure;
  std::mutex mu;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      absl::StatusOr<Trial> t = run(tasks[i]);
      if (!t.ok()) {
        std::lock_guard<std::mutex> lock(mu);
        failure.Update(t.status());
        continue;
      }
      out[i] = BenchRecord{scenario, configs[tasks[i].config], tasks[i].size,
                           tasks[i].trial, t->elapsed_ns,
                           std::move(t->outcome)};
    }
  };
  if (parallel <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < parallel; ++i) threads.emplace_back(worker);
    for (std::thread& th : threads) th.join();
  }
  if (!failure.ok()) return failure;
  return out;
}

std::vector<Task> Interleaved(const std::vector<uint64_t>& sizes,
                              uint64_t reps, size_t n_configs) {
  std::vector<Task> tasks;
  for (uint64_t size : sizes) {
    for (uint64_t trial = 0; trial < reps; ++trial) {
      for (size_t c = 0; c < n_configs; ++c) tasks.push_back({size, trial, c});
    }
  }
  return tasks;
}

absl::StatusOr<std::vector<BenchRecord>> RunInstances(
    const std::string& scenario, const BenchOptions& opts,
    std::vector<std::string> default_configs,
    const std::function<Instance(uint64_t)>& make) {
  const std::vector<std::string> configs =
      opts.configs.empty() ? default_configs : opts.configs;
  std::map<uint64_t, Instance> instances;
  for (uint64_t size : opts.sizes) instances[size] = make(size);
  // Runners borrow the instances, which outlive them.
  std::map<std::pair<uint64_t, size_t>, Runner> runners;
  for (uint64_t size : opts.sizes) {
    for (size_t c = 0; c < configs.size(); ++c) {
      absl::StatusOr<Runner> r =
          MakeRunner(configs[c], instances[size], Eta(), opts.k);
      if (!r.ok()) return r.status();
      runners[{size, c}] = std::move(*r);
    }
  }
  auto run = [&](const Task& t) -> absl::StatusOr<Trial> {
    absl::StatusOr<Trial> trial =
        runners.at({t.size, t.config})(TrialSeed(opts.seed, t.size, t.trial));
    if (trial.ok()) {
      const Instance& inst = instances.at(t.size);
      trial->outcome = inst.labels[std::stoul(trial->outcome)];
    }
    return trial;
  };
  return RunTasks(scenario, configs,
                  Interleaved(opts.sizes, opts.reps, configs.size()), run,
                  opts.parallel);
}

absl::StatusOr<std::vector<BenchRecord>> RunLaplace(const BenchOptions& opts) {
  const std::vector<std::string> configs =
      opts.configs.empty()
          ? std::vector<std::string>{"naive", "base2", "base2-emp"}
          : opts.configs;
  struct Setup {
    std::vector<double> grid;
    std::vector<std::unique_ptr<ClampedDiscreteLaplace>> exact;
  };
  std::map<uint64_t, Setup> setups;
  for (uint64_t size : opts.sizes) {
    if (size == 0) return absl::InvalidArgumentError("1/gamma must be positive");
    Setup& s = setups[size];
    for (const std::string& c : configs) {
      LaplaceConfig cfg;
      cfg.gamma = 1.0 / static_cast<double>(size);
      cfg.sample.k = opts.k;
      if (c == "base2-emp") {
        cfg.precision_strategy = PrecisionStrategy::kEmpirical;
      } else if (c == "base2-opt") {
        cfg.sample.variant = SampleVariant::kOptimized;
      } else if (c == "base2-early") {
        cfg.sample.variant = SampleVariant::kStandard;
      } else if (c != "base2" && c != "naive") {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown configuration '", c, "'"));
      }
      absl::StatusOr<ClampedDiscreteLaplace> lap =
          ClampedDiscreteLaplace::Create(cfg);
      if (!lap.ok()) return lap.status();
      s.grid = lap->grid();
      s.exact.push_back(std::make_unique<ClampedDiscreteLaplace>(*lap));
    }
  }
  const double eps = 2.0 * std::numbers::ln2 * Eta().ApproxValue();
  auto run = [&](const Task& t) -> absl::StatusOr<Trial> {
    const Setup& s = setups.at(t.size);
    const uint64_t seed = TrialSeed(opts.seed, t.size, t.trial);
    const auto start = std::chrono::steady_clock::now();
    double value;
    if (configs[t.config] == "naive") {
      std::mt19937_64 rng(seed);
      std::vector<double> u;
      u.reserve(s.grid.size());
      for (double o : s.grid) u.push_back(std::abs(0.0 - o));
      std::optional<size_t> i = NaiveExpMech(eps, u, rng);
      if (!i.has_value()) return absl::InternalError("naive returned nothing");
      value = s.grid[*i];
    } else {
      SeededBitSource src(seed);
      absl::StatusOr<double> v = s.exact[t.config]->Sample(0.0, src);
      if (!v.ok()) return v.status();
      value = *v;
    }
    const auto stop = std::chrono::steady_clock::now();
    const int64_t ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
            .count();
    return Trial{static_cast<uint64_t>(std::max<int64_t>(ns, 1)),
                 absl::StrFormat("%.17g", value)};
  };
  return RunTasks("laplace", configs,
                  Interleaved(opts.sizes, opts.reps, configs.size()), run,
                  opts.parallel);
}

absl::StatusOr<std::vector<BenchRecord>> RunTimingChannel(
    const BenchOptions& opts) {
  const std::vector<std::string> configs = {"u0", "u1"};
  const Instance u0 = TimingInstance(true);
  const Instance u1 = TimingInstance(false);
  std::map<std::pair<uint64_t, size_t>, Runner> runners;
  for (uint64_t k : opts.sizes) {
    if (k < 1 || k > 1024) {
      return absl::InvalidArgumentError("timing-channel k must be in [1, 1024]");
    }
    for (size_t c = 0; c < 2; ++c) {
      absl::StatusOr<Runner> r =
          MakeRunner("base2", c == 0 ? u0 : u1, Eta(), static_cast<int>(k));
      if (!r.ok()) return r.status();
      runners[{k, c}] = std::move(*r);
    }
  }
  auto run = [&](const Task& t) {
    return runners.at({t.size, t.config})(
        TrialSeed(opts.seed, t.size, t.trial));
  };
  // Timing wants an undisturbed core.
  return RunTasks("timing-channel", configs,
                  Interleaved(opts.sizes, opts.reps, 2), run, 1);
}

}  // namespace

const std::vector<std::string>& ScenarioNames() {
  static const std::vector<std::string> kNames = {
      "outcome-scaling", "utility-range", "precision-method", "laplace",
      "timing-channel"};
  return kNames;
}

absl::StatusOr<std::vector<BenchRecord>> RunScenario(
    absl::string_view name, const BenchOptions& opts) {
  if (opts.sizes.empty()) {
    return absl::InvalidArgumentError("no instance sizes given");
  }
  if (name == "outcome-scaling") {
    return RunInstances("outcome-scaling", opts,
                        {"naive", "base2", "base2-early", "base2-opt"},
                        OutcomeScaling);
  }
  if (name == "precision-method") {
    return RunInstances("precision-method", opts, {"base2", "base2-emp"},
                        OutcomeScaling);
  }
  if (name == "utility-range") {
    return RunInstances("utility-range", opts,
                        {"base2", "base2-early", "base2-opt", "base2-emp"},
                        UtilityRange);
  }
  if (name == "laplace") return RunLaplace(opts);
  if (name == "timing-channel") return RunTimingChannel(opts);
  return absl::InvalidArgumentError(
      absl::StrCat("unknown scenario '", name, "'"));
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return (hi + *std::max_element(v.begin(), v.begin() + mid)) / 2;
}

std::map<uint64_t, double> TimingRatios(const std::vector<BenchRecord>& recs) {
  std::map<uint64_t, std::vector<double>> u0, u1;
  for (const BenchRecord& r : recs) {
    if (r.scenario != "timing-channel") continue;
    (r.config == "u0" ? u0 : u1)[r.instance_size].push_back(
        static_cast<double>(r.elapsed_ns));
  }
  std::map<uint64_t, double> out;
  for (const auto& [k, times] : u0) {
    auto it = u1.find(k);
    if (it == u1.end()) continue;
    out[k] = Median(times) / Median(it->second);
  }
  return out;
}

double LinearFitR2(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0;
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0;
  return sxy * sxy / (sxx * syy);
}

}  // namespace b2em
