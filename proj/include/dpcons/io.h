// Copyright 2026 The dpcons Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small text helpers shared by the CSV/JSON exporters.

#ifndef DPCONS_IO_H_
#define DPCONS_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dpcons {

// 17 significant digits ("%.17g"), enough to round-trip any double.
std::string FormatDouble(double value);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

// Parses a decimal number; throws kInvalidConfig naming `what` on failure.
double ParseDouble(std::string_view text, std::string_view what);

std::string_view Trim(std::string_view text);
std::vector<std::string_view> SplitFields(std::string_view line, char sep);

// Row-oriented CSV builder with a header line.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& Cell(double value);
  CsvWriter& Cell(long long value);
  CsvWriter& Cell(std::string_view value);
  CsvWriter& EndRow();

  const std::string& text() const { return text_; }
  void Save(const std::filesystem::path& path) const;

 private:
  std::string text_;
  bool row_open_ = false;
};

// Header-less matrix/vector CSV helpers.
std::vector<std::vector<double>> ParseNumericCsv(std::string_view text);

}  // namespace dpcons

#endif  // DPCONS_IO_H_
