//
// Copyright 2026 The gammaobf Authors
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

#ifndef GAMMAOBF_IO_HPP_
#define GAMMAOBF_IO_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gammaobf/errors.hpp"

namespace gammaobf::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

// Single numeric column. A non-numeric first row is taken as a header; blank
// lines are skipped. Values must be finite.
inline std::vector<double> read_column(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view token = detail::trim(line);
    if (token.empty()) continue;
    if (token.find(',') != std::string_view::npos) {
      throw DataError("expected a single column", line_no);
    }
    double v = 0.0;
    if (!detail::parse_double(token, v)) {
      if (!seen_row) {
        seen_row = true;  // header
        continue;
      }
      throw DataError("not a number: '" + std::string(token) + "'", line_no);
    }
    if (!std::isfinite(v)) throw DataError("non-finite value", line_no);
    seen_row = true;
    values.push_back(v);
  }
  if (values.empty()) throw DataError("no data rows", line_no);
  return values;
}

inline std::vector<double> read_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string(), 0);
  return read_column(in);
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericalError("cannot format value");
  return std::string(buf, ptr);
}

// Writes a header row and the given equally long columns.
inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::span<const double>>& columns) {
  if (header.size() != columns.size()) throw ParameterError("header/column count mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw ParameterError("columns differ in length");
  }
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out << (j ? "," : "") << format_double(columns[j][i]);
    }
    out << '\n';
  }
}

inline void write_column(std::ostream& out, std::span<const double> values) {
  for (double v : values) out << format_double(v) << '\n';
}

// "<dir>/<stem><suffix>" next to the given output path.
inline std::filesystem::path sidecar_path(const std::filesystem::path& output,
                                          std::string_view suffix) {
  auto p = output.parent_path() / (output.stem().string() + std::string(suffix));
  if (p == output) p = output.parent_path() / (output.stem().string() + "_meta" + std::string(suffix));
  return p;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string(), 0);
  return out;
}

}  // namespace gammaobf::io

#endif  // GAMMAOBF_IO_HPP_
