#include "inloop/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "inloop/error.hpp"

namespace inloop {

namespace {

constexpr std::string_view kSchemaPrefix = "# schema: ";

std::vector<std::string> split(const std::string& line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

} // namespace

std::string format_number(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CsvTable::CsvTable(std::string schema, std::vector<std::string> columns)
  : m_schema(std::move(schema)), m_columns(std::move(columns))
{
  if (m_columns.empty())
    throw DomainError("CSV table needs columns");
}

void CsvTable::add_row(std::vector<std::string> cells)
{
  if (cells.size() != m_columns.size())
    throw DomainError("CSV row width does not match the header");
  for (const auto& c : cells)
    if (c.find_first_of(",\n") != std::string::npos)
      throw DomainError("CSV cell contains a separator: " + c);
  m_rows.push_back(std::move(cells));
}

std::string CsvTable::to_string() const
{
  std::string out;
  out += kSchemaPrefix;
  out += m_schema + "\n";
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); i++)
      out += (i ? "," : "") + cells[i];
    out += "\n";
  };
  line(m_columns);
  for (const auto& r : m_rows)
    line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << to_string();
  if (!out)
    throw IoError("write failed for " + path.string());
}

CsvReader CsvReader::parse(const std::string& text)
{
  CsvReader r;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line))
  {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.starts_with(kSchemaPrefix))
    {
      r.m_schema = line.substr(kSchemaPrefix.size());
      continue;
    }
    if (line.empty() || line.front() == '#')
      continue;
    auto cells = split(line);
    if (!header)
    {
      for (std::size_t i = 0; i < cells.size(); i++)
        r.m_index.emplace(cells[i], i);
      header = true;
      continue;
    }
    if (cells.size() != r.m_index.size())
      throw IoError("CSV row width does not match the header");
    r.m_rows.push_back(std::move(cells));
  }
  if (!header)
    throw IoError("CSV has no header row");
  return r;
}

CsvReader CsvReader::read(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::stringstream content;
  content << in.rdbuf();
  return parse(content.str());
}

const std::string& CsvReader::cell(std::size_t row, std::string_view column) const
{
  const auto it = m_index.find(column);
  if (it == m_index.end())
    throw IoError("CSV column missing: " + std::string(column));
  if (row >= m_rows.size())
    throw IoError("CSV row out of range");
  return m_rows[row][it->second];
}

double CsvReader::number(std::size_t row, std::string_view column) const
{
  const auto& c = cell(row, column);
  if (c == "inf")
    return HUGE_VAL;
  if (c == "-inf")
    return -HUGE_VAL;
  if (c == "nan")
    return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
  if (ec != std::errc{} || ptr != c.data() + c.size())
    throw IoError("CSV cell is not a number: " + c);
  return v;
}

int CsvReader::integer(std::size_t row, std::string_view column) const
{
  const auto& c = cell(row, column);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
  if (ec != std::errc{} || ptr != c.data() + c.size())
    throw IoError("CSV cell is not an integer: " + c);
  return v;
}

} // namespace inloop
