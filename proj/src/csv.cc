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

#include "b2em/csv.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace b2em {
namespace {

bool Plain(const std::string& field) {
  return field.find_first_of(",\"\r\n") == std::string::npos;
}

}  // namespace

absl::Status WriteCsv(const std::vector<BenchRecord>& records,
                      std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    if (!Plain(r.scenario) || !Plain(r.config) || !Plain(r.outcome)) {
      return absl::InvalidArgumentError("CSV field contains a separator");
    }
    out << r.scenario << ',' << r.config << ',' << r.instance_size << ','
        << r.trial << ',' << r.elapsed_ns << ',' << r.outcome << '\n';
  }
  if (!out) return absl::DataLossError("write failed");
  return absl::OkStatus();
}

absl::Status WriteCsv(const std::vector<BenchRecord>& records,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return WriteCsv(records, out);
}

absl::StatusOr<std::vector<BenchRecord>> ReadCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    return absl::InvalidArgumentError("missing or unexpected CSV header");
  }
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = absl::StrSplit(line, ',');
    BenchRecord r;
    if (f.size() != 6 || !absl::SimpleAtoi(f[2], &r.instance_size) ||
        !absl::SimpleAtoi(f[3], &r.trial) ||
        !absl::SimpleAtoi(f[4], &r.elapsed_ns)) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed CSV row: ", line));
    }
    r.scenario = f[0];
    r.config = f[1];
    r.outcome = f[5];
    out.push_back(std::move(r));
  }
  return out;
}

absl::StatusOr<std::vector<BenchRecord>> ReadCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadCsv(in);
}

}  // namespace b2em
