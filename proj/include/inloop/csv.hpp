#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace inloop {

/// Shortest text that reads back to the same double; "inf"/"nan" otherwise.
std::string format_number(double v);

/// Comma-separated table headed by "# schema: NAME/VERSION" and a column row.
class CsvTable
{
public:
  CsvTable(std::string schema, std::vector<std::string> columns);

  const std::string& schema() const { return m_schema; }
  const std::vector<std::string>& columns() const { return m_columns; }
  const std::vector<std::vector<std::string>>& rows() const { return m_rows; }

  /// Row width must equal the column count. Cells may not contain commas.
  void add_row(std::vector<std::string> cells);

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

private:
  std::string m_schema;
  std::vector<std::string> m_columns;
  std::vector<std::vector<std::string>> m_rows;
};

/// Parsed CSV with column lookup by name.
class CsvReader
{
public:
  static CsvReader parse(const std::string& text);
  static CsvReader read(const std::filesystem::path& path);

  const std::string& schema() const { return m_schema; }
  std::size_t size() const { return m_rows.size(); }
  const std::string& cell(std::size_t row, std::string_view column) const;
  double number(std::size_t row, std::string_view column) const;
  int integer(std::size_t row, std::string_view column) const;

private:
  std::string m_schema;
  std::map<std::string, std::size_t, std::less<>> m_index;
  std::vector<std::vector<std::string>> m_rows;
};

} // namespace inloop
