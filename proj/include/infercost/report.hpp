/* Copyright 2026 The infercost Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "infercost/error.hpp"

namespace infercost {

enum class ReportFormat { Markdown, Csv };

inline std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  if (text == "csv") return ReportFormat::Csv;
  return std::nullopt;
}

// A cell keeps its value so each format can render it: markdown rounds
// reals to 2 decimals, CSV writes the shortest round-trip representation.
using Cell = std::variant<std::string, std::uint64_t, double>;

inline std::string render_cell(const Cell& cell, ReportFormat format) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return fmt::format("{}", *u);
  const double v = std::get<double>(cell);
  return format == ReportFormat::Markdown ? fmt::format("{:.2f}", v) : fmt::format("{}", v);
}

class ReportTable {
 public:
  ReportTable(std::string title, std::vector<std::string> headers)
      : title_(std::move(title)), headers_(std::move(headers)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != headers_.size()) {
      throw DimensionMismatchError("report row has " + std::to_string(row.size()) + " cells, header has " +
                                   std::to_string(headers_.size()));
    }
    rows_.push_back(std::move(row));
  }

  const std::string& title() const { return title_; }
  const std::vector<std::string>& headers() const { return headers_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  void write(std::ostream& out, ReportFormat format) const {
    if (format == ReportFormat::Csv) {
      write_csv_line(out, headers_);
      for (const auto& row : rows_) write_csv_line(out, render(row, format));
      return;
    }
    if (!title_.empty()) out << "### " << title_ << "\n\n";
    write_md_line(out, headers_);
    out << '|';
    for (std::size_t i = 0; i < headers_.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
    out << '\n';
    for (const auto& row : rows_) write_md_line(out, render(row, format));
  }

 private:
  static std::vector<std::string> render(const std::vector<Cell>& row, ReportFormat format) {
    std::vector<std::string> out;
    out.reserve(row.size());
    for (const auto& c : row) out.push_back(render_cell(c, format));
    return out;
  }

  static void write_csv_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        out << cells[i];
        continue;
      }
      out << '"';
      for (char c : cells[i]) out << (c == '"' ? "\"\"" : std::string(1, c));
      out << '"';
    }
    out << '\n';
  }

  static void write_md_line(std::ostream& out, const std::vector<std::string>& cells) {
    out << '|';
    for (const auto& c : cells) out << ' ' << c << " |";
    out << '\n';
  }

  std::string title_;
  std::vector<std::string> headers_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace infercost
