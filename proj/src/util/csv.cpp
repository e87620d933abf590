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

#include "paddle/util/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "paddle/errors.hpp"

namespace paddle::util {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw IoError("malformed number: '" + std::string(field) + "'");
  }
  return value;
}

long long parse_int(std::string_view field) {
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
  long long value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw IoError("malformed integer: '" + std::string(field) + "'");
  }
  return value;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move into place: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void CsvTable::add_row(std::vector<std::string> fields) {
  if (fields.size() != columns_.size()) {
    throw std::invalid_argument("csv row width does not match header");
  }
  rows_.push_back(std::move(fields));
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& c : comments_) {
    out += "# ";
    out += c;
    out += '\n';
  }
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  emit(columns_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvTable::save(const std::filesystem::path& path) const { write_text_file(path, str()); }

std::size_t ParsedCsv::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw IoError("csv column missing: " + std::string(name));
}

ParsedCsv parse_csv(std::string_view text) {
  ParsedCsv out;
  bool have_header = false;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      out.comments.emplace_back(line);
      continue;
    }
    auto fields = split(line, ',');
    if (!have_header) {
      out.columns = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != out.columns.size()) {
        throw IoError("csv row has " + std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(out.columns.size()));
      }
      out.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw IoError("csv has no header row");
  return out;
}

ParsedCsv load_csv(const std::filesystem::path& path) { return parse_csv(read_text_file(path)); }

}  // namespace paddle::util
