// Copyright 2026 The pamevo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAMEVO_CSV_H_
#define PAMEVO_CSV_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pamevo {

// Shortest round-trip text for a double; NaN and inf as "nan",
// "inf", "-inf".
std::string FormatDouble(double v);

// RFC-4180 field quoting: fields containing ',', '"', CR or LF are quoted and
// inner quotes doubled.
std::string CsvField(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& operator<<(std::string_view field);
  CsvWriter& operator<<(const char* field) { return *this << std::string_view(field); }
  CsvWriter& operator<<(const std::string& field) { return *this << std::string_view(field); }
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(std::int64_t v);
  CsvWriter& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
  CsvWriter& operator<<(std::uint64_t v);
  CsvWriter& operator<<(bool v) { return *this << static_cast<std::int64_t>(v); }
  void EndRow();

  // Header followed by rows.
  void Row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  bool first_ = true;
};

using CsvTable = std::vector<std::vector<std::string>>;

// Parses RFC-4180 text (quoted fields may span lines). Throws
// std::runtime_error on an unterminated quote.
CsvTable ParseCsv(std::string_view text);

}  // namespace pamevo

#endif  // PAMEVO_CSV_H_
