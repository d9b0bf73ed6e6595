#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wavecurve {

/// A parsed CSV file. Cells are kept as text; numeric access reports
/// failures with file, line and column.
class CsvTable {
 public:
  CsvTable(std::string file, std::vector<std::string> header, std::vector<std::vector<std::string>> rows);

  const std::string& file() const noexcept { return file_; }
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t size() const noexcept { return rows_.size(); }
  const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  /// 1-based line number of data row `row` (the header is line 1).
  std::size_t line(std::size_t row) const noexcept { return row + 2; }

  /// Index of a named column; throws ValidationError when absent.
  std::size_t column(std::string_view name) const;
  /// Cell as a finite number. Empty or "NA" cells give nullopt; anything
  /// else that does not parse is a ValidationError.
  std::optional<double> number(std::size_t row, std::size_t col) const;
  /// Like number() but a missing value is also an error.
  double required_number(std::size_t row, std::size_t col) const;
  /// Throws ValidationError unless the header equals `expected` exactly.
  void require_header(const std::vector<std::string>& expected) const;

 private:
  std::string file_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// RFC 4180 style: comma separated, optional double quotes with "" escapes,
/// LF or CRLF line endings. Blank lines are ignored. Every row must have as
/// many cells as the header.
CsvTable parse_csv(std::string_view text, std::string file_label);
CsvTable read_csv(const std::filesystem::path& path);

/// Locale-independent decimal text with 10 significant digits. NaN is
/// written as NA and infinities as Inf / -Inf.
std::string format_number(double value);

/// Builds CSV text row by row, quoting cells only where needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  const std::string& str() const noexcept { return text_; }

 private:
  void append(const std::vector<std::string>& cells);
  std::size_t width_;
  std::string text_;
};

}  // namespace wavecurve
