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

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "b2em/csv.h"
#include "gtest/gtest.h"

namespace b2em {
namespace {

// Outcomes and everything but the timings.
std::vector<BenchRecord> WithoutTimes(std::vector<BenchRecord> r) {
  for (BenchRecord& x : r) x.elapsed_ns = 0;
  return r;
}

BenchOptions Small(std::vector<uint64_t> sizes, uint64_t reps = 3) {
  BenchOptions o;
  o.sizes = std::move(sizes);
  o.reps = reps;
  o.seed = 9;
  return o;
}

TEST(BenchTest, EveryScenarioRuns) {
  for (const std::string& name : ScenarioNames()) {
    const std::vector<uint64_t> sizes =
        name == "laplace" ? std::vector<uint64_t>{4}
        : name == "timing-channel" ? std::vector<uint64_t>{1, 2}
                                   : std::vector<uint64_t>{4, 8};
    absl::StatusOr<std::vector<BenchRecord>> r = RunScenario(name, Small(sizes));
    ASSERT_TRUE(r.ok()) << name << ": " << r.status();
    EXPECT_FALSE(r->empty()) << name;
    for (const BenchRecord& x : *r) {
      EXPECT_EQ(x.scenario, name);
      EXPECT_FALSE(x.config.empty());
      EXPECT_FALSE(x.outcome.empty());
    }
  }
}

TEST(BenchTest, ReplaysIdentically) {
  const BenchOptions o = Small({4, 16});
  const std::vector<BenchRecord> a =
      WithoutTimes(*RunScenario("outcome-scaling", o));
  const std::vector<BenchRecord> b =
      WithoutTimes(*RunScenario("outcome-scaling", o));
  EXPECT_EQ(a, b);

  BenchOptions parallel = o;
  parallel.parallel = 3;
  EXPECT_EQ(WithoutTimes(*RunScenario("outcome-scaling", parallel)), a);

  BenchOptions other = o;
  other.seed = 10;
  other.reps = 20;
  BenchOptions same = o;
  same.reps = 20;
  EXPECT_NE(WithoutTimes(*RunScenario("outcome-scaling", other)),
            WithoutTimes(*RunScenario("outcome-scaling", same)));
}

TEST(BenchTest, ConfigSelection) {
  BenchOptions o = Small({4});
  o.configs = {"base2-opt"};
  const std::vector<BenchRecord> r = *RunScenario("outcome-scaling", o);
  ASSERT_EQ(r.size(), 3u);
  for (const BenchRecord& x : r) EXPECT_EQ(x.config, "base2-opt");
  o.configs = {"nonsense"};
  EXPECT_FALSE(RunScenario("outcome-scaling", o).ok());
}

TEST(BenchTest, Errors) {
  EXPECT_FALSE(RunScenario("no-such-scenario", Small({4})).ok());
  EXPECT_FALSE(RunScenario("outcome-scaling", Small({})).ok());
}

TEST(BenchTest, TimingRatios) {
  std::vector<BenchRecord> r;
  for (uint64_t t = 0; t < 3; ++t) {
    r.push_back({"timing-channel", "u0", 1, t, 300 + t, "0"});
    r.push_back({"timing-channel", "u1", 1, t, 100 + t, "1"});
  }
  r.push_back({"timing-channel", "u0", 4, 0, 50, "0"});
  r.push_back({"outcome-scaling", "u1", 1, 0, 1, "0"});
  const std::map<uint64_t, double> got = TimingRatios(r);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_DOUBLE_EQ(got.at(1), 301.0 / 101.0);
}

TEST(StatsTest, Median) {
  EXPECT_EQ(Median({}), 0);
  EXPECT_EQ(Median({3}), 3);
  EXPECT_EQ(Median({5, 1, 3}), 3);
  EXPECT_EQ(Median({4, 1, 3, 2}), 2.5);
}

TEST(StatsTest, LinearFitR2) {
  EXPECT_DOUBLE_EQ(LinearFitR2({1, 2, 3, 4}, {3, 5, 7, 9}), 1.0);
  EXPECT_NEAR(LinearFitR2({1, 2, 3, 4, 5}, {1, 4, 9, 16, 25}), 360.0 / 374, 1e-12);
  EXPECT_LT(LinearFitR2({1, 2, 3, 4}, {1, -1, 1, -1}), 0.25);
  EXPECT_EQ(LinearFitR2({1}, {1}), 0);
}

TEST(CsvTest, RoundTrip) {
  std::vector<BenchRecord> r;
  for (uint64_t i = 0; i < 10000; ++i) {
    r.push_back({"laplace", i % 2 ? "naive" : "base2", 16 + i % 5, i,
                 i * 1234567, std::to_string(i % 33 * 0.25)});
  }
  std::stringstream ss;
  ASSERT_TRUE(WriteCsv(r, ss).ok());
  absl::StatusOr<std::vector<BenchRecord>> back = ReadCsv(ss);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, r);

  std::stringstream empty;
  ASSERT_TRUE(WriteCsv({}, empty).ok());
  EXPECT_EQ(empty.str(), std::string(kCsvHeader) + "\n");
  EXPECT_TRUE(ReadCsv(empty)->empty());
}

TEST(CsvTest, FileRoundTrip) {
  const std::string path = ::testing::TempDir() + "/bench_test.csv";
  const std::vector<BenchRecord> r = {{"laplace", "base2", 4, 0, 10, "-1.5"}};
  ASSERT_TRUE(WriteCsv(r, path).ok());
  EXPECT_EQ(*ReadCsv(path), r);
  std::remove(path.c_str());
  EXPECT_EQ(ReadCsv(path).status().code(), absl::StatusCode::kNotFound);
}

TEST(CsvTest, RejectsBadInput) {
  std::stringstream no_header("a,b\n");
  EXPECT_FALSE(ReadCsv(no_header).ok());
  std::stringstream short_row(std::string(kCsvHeader) + "\nx,y,1,2\n");
  EXPECT_FALSE(ReadCsv(short_row).ok());
  std::stringstream bad_number(std::string(kCsvHeader) +
                               "\nx,y,one,2,3,z\n");
  EXPECT_FALSE(ReadCsv(bad_number).ok());
  std::stringstream out;
  EXPECT_FALSE(WriteCsv({{"a,b", "c", 1, 1, 1, "d"}}, out).ok());
}

}  // namespace
}  // namespace b2em
