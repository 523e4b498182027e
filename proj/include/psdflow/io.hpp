#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace psdflow::io {

/// Shortest decimal text that parses back to exactly `v` (IEEE-754 round trip).
std::string format_double(double v);

/// Parses text produced by format_double (or any decimal double). Throws ValidationError.
double parse_double(std::string_view text);

/// In-memory CSV: a header plus rows of raw string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws ValidationError if absent.
  std::size_t column(std::string_view name) const;
  /// A column parsed as doubles.
  std::vector<double> numeric_column(std::string_view name) const;
};

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  /// Appends one row; cells are written verbatim. Throws on width mismatch.
  void add_row(std::vector<std::string> cells);

  std::string str() const;
  const CsvTable& table() const { return table_; }

 private:
  CsvTable table_;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes text to `path`, creating parent directories. Throws ValidationError on I/O failure.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace psdflow::io
