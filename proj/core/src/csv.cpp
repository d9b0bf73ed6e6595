#include "wavecurve/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wavecurve/error.hpp"

namespace wavecurve {

CsvTable::CsvTable(std::string file, std::vector<std::string> header, std::vector<std::vector<std::string>> rows)
    : file_(std::move(file)), header_(std::move(header)), rows_(std::move(rows)) {}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw ValidationError(file_, 1, std::string(name), "missing column");
}

std::optional<double> CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& text = rows_[row][col];
  if (text.empty() || text == "NA") return std::nullopt;
  double value = 0.0;
  const char* end = text.data() + text.size();
  const char* begin = text.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ValidationError(file_, line(row), header_[col], "not a number: '" + text + "'");
  }
  return value;
}

double CsvTable::required_number(std::size_t row, std::size_t col) const {
  const auto value = number(row, col);
  if (!value) throw ValidationError(file_, line(row), header_[col], "missing value");
  return *value;
}

void CsvTable::require_header(const std::vector<std::string>& expected) const {
  if (header_ == expected) return;
  std::string want;
  for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
  throw ValidationError(file_, 1, "", "header must be exactly '" + want + "'");
}

namespace {

std::vector<std::vector<std::string>> split_records(std::string_view text, const std::string& file) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool quoted = false;
  bool cell_started = false;
  std::size_t line = 1;
  auto end_record = [&] {
    if (cell_started || !record.empty() || !cell.empty()) {
      record.push_back(std::move(cell));
      records.push_back(std::move(record));
    }
    record.clear();
    cell.clear();
    cell_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        cell_started = true;
        break;
      case ',':
        record.push_back(std::move(cell));
        cell.clear();
        cell_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        cell += c;
        cell_started = true;
    }
  }
  if (quoted) throw ValidationError(file, line, "", "unterminated quoted field");
  end_record();
  return records;
}

}  // namespace

CsvTable parse_csv(std::string_view text, std::string file_label) {
  // Strip a UTF-8 byte order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  auto records = split_records(text, file_label);
  if (records.empty()) throw ValidationError(file_label, 1, "", "empty file");
  std::vector<std::string> header = std::move(records.front());
  for (auto& h : header) {
    while (!h.empty() && (h.back() == ' ' || h.back() == '\t')) h.pop_back();
    while (!h.empty() && (h.front() == ' ' || h.front() == '\t')) h.erase(h.begin());
  }
  std::vector<std::vector<std::string>> rows(std::make_move_iterator(records.begin() + 1),
                                             std::make_move_iterator(records.end()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw ValidationError(file_label, r + 2, "",
                            "expected " + std::to_string(header.size()) + " cells, found " +
                                std::to_string(rows[r].size()));
    }
  }
  return CsvTable(std::move(file_label), std::move(header), std::move(rows));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path.filename().string());
}

std::string format_number(double value) {
  if (std::isnan(value)) return "NA";
  if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
  if (value == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 10);
  if (ec != std::errc()) throw Error("format_number: conversion failed");
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { append(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw ShapeError("CsvWriter: row width differs from the header");
  append(cells);
  return *this;
}

void CsvWriter::append(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) text_ += ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n\r") == std::string::npos) {
      text_ += c;
    } else {
      text_ += '"';
      for (char ch : c) {
        if (ch == '"') text_ += '"';
        text_ += ch;
      }
      text_ += '"';
    }
  }
  text_ += '\n';
}

}  // namespace wavecurve
