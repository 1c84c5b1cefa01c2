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

// Benchmark records as CSV:
//
//   scenario,config,instance_size,trial,elapsed_ns,outcome
//
// No field may contain a comma, quote or newline; none of ours do.

#ifndef B2EM_CSV_H_
#define B2EM_CSV_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "b2em/bench.h"

namespace b2em {

inline constexpr char kCsvHeader[] =
    "scenario,config,instance_size,trial,elapsed_ns,outcome";

absl::Status WriteCsv(const std::vector<BenchRecord>& records,
                      std::ostream& out);
absl::Status WriteCsv(const std::vector<BenchRecord>& records,
                      const std::string& path);

absl::StatusOr<std::vector<BenchRecord>> ReadCsv(std::istream& in);
absl::StatusOr<std::vector<BenchRecord>> ReadCsv(const std::string& path);

}  // namespace b2em

#endif  // B2EM_CSV_H_
