/*
 Copyright 2026 The Paddle Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace paddle::util {

// Shortest text that parses back to the same double.
std::string format_double(double value);

std::vector<std::string> split(std::string_view line, char sep);

double parse_double(std::string_view field);
long long parse_int(std::string_view field);

// Writes the whole string atomically enough for our purposes (temp + rename).
void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

// Minimal CSV writer: one header row, then rows of already formatted fields.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  // Lines starting with '#' are emitted before the header row.
  void add_comment(std::string comment) { comments_.push_back(std::move(comment)); }
  void add_row(std::vector<std::string> fields);

  const std::vector<std::string>& columns() const { return columns_; }
  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

struct ParsedCsv {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws IoError if absent.
  std::size_t column(std::string_view name) const;
};

ParsedCsv parse_csv(std::string_view text);
ParsedCsv load_csv(const std::filesystem::path& path);

}  // namespace paddle::util
