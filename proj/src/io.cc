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

#include "dpcons/io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpcons/error.h"

namespace dpcons {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAsymmetricAdjacency: return "AsymmetricAdjacency";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kNonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::kTooFewNodes: return "TooFewNodes";
    case ErrorCode::kNotSquare: return "NotSquare";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kDisconnected: return "Disconnected";
    case ErrorCode::kStepSizeTooLarge: return "StepSizeTooLarge";
    case ErrorCode::kConnectivityRetriesExhausted:
      return "ConnectivityRetriesExhausted";
    case ErrorCode::kNonpositiveScale: return "NonpositiveScale";
    case ErrorCode::kAgentOutOfRange: return "AgentOutOfRange";
    case ErrorCode::kInvalidSchedule: return "InvalidSchedule";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kScheduleMismatch: return "ScheduleMismatch";
    case ErrorCode::kIsolatedNode: return "IsolatedNode";
    case ErrorCode::kInvalidParameters: return "InvalidParameters";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kDomainViolation: return "DomainViolation";
    case ErrorCode::kInvalidGrid: return "InvalidGrid";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kRunFailure: return "RunFailure";
  }
  return "Unknown";
}

std::string FormatDouble(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string_view Trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(Trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double ParseDouble(std::string_view text, std::string_view what) {
  text = Trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidConfig, "cannot parse '" +
                                               std::string(text) + "' as " +
                                               std::string(what));
  }
  return value;
}

CsvWriter::CsvWriter(std::vector<std::string> header) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

CsvWriter& CsvWriter::Cell(double value) { return Cell(FormatDouble(value)); }

CsvWriter& CsvWriter::Cell(long long value) {
  return Cell(std::to_string(value));
}

CsvWriter& CsvWriter::Cell(std::string_view value) {
  if (row_open_) text_ += ',';
  text_ += value;
  row_open_ = true;
  return *this;
}

CsvWriter& CsvWriter::EndRow() {
  text_ += '\n';
  row_open_ = false;
  return *this;
}

void CsvWriter::Save(const std::filesystem::path& path) const {
  WriteTextFile(path, text_);
}

std::vector<std::vector<double>> ParseNumericCsv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    const auto line = Trim(text.substr(start, pos - start));
    if (!line.empty()) {
      std::vector<double> row;
      for (auto field : SplitFields(line, ',')) {
        row.push_back(ParseDouble(field, "CSV number"));
      }
      rows.push_back(std::move(row));
    }
    start = pos + 1;
  }
  return rows;
}

}  // namespace dpcons
