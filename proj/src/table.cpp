#include "gpcs/table.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>

namespace gpcs {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      if (!field.empty()) {
        throw Error(errc::parse_error,
                    "CSV line " + std::to_string(line_no) + ": stray quote mid-field");
      }
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\r' && i + 1 == line.size()) {
      // trailing CR of a CRLF line
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) {
    throw Error(errc::parse_error, "CSV line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(field);
  return fields;
}

}  // namespace

std::optional<double> parse_double(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(errc::missing_column, "column '" + name + "' not found in CSV header");
  }
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      table.header = split_csv_record(line, line_no);
      for (auto& h : table.header) h = trim(h);
      continue;
    }
    if (trim(line).empty()) continue;
    auto fields = split_csv_record(line, line_no);
    if (fields.size() != table.header.size()) {
      throw Error(errc::parse_error, "CSV line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(table.header.size()) + " fields, got " +
                                         std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw Error(errc::parse_error, "CSV '" + path + "': no header row");
  return table;
}

IngestReport ingest_csv(const std::string& path, const std::string& x_col,
                        const std::string& y_col, const std::optional<std::string>& label_col) {
  const CsvTable table = read_csv(path);
  const std::size_t xi = table.column(x_col);
  const std::size_t yi = table.column(y_col);
  std::optional<std::size_t> li;
  if (label_col) li = table.column(*label_col);

  std::vector<BivariatePoint> points;
  std::vector<int> labels;
  std::map<std::string, int> label_map;
  std::vector<std::pair<std::string, int>> mapping;
  std::size_t dropped = 0;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string xs = trim(row[xi]);
    const std::string ys = trim(row[yi]);
    const std::string ls = li ? trim(row[*li]) : std::string{};
    if (xs.empty() || ys.empty() || (li && ls.empty())) {
      ++dropped;
      continue;
    }
    const auto x = parse_double(xs);
    if (!x) {
      throw Error(errc::parse_error, "row " + std::to_string(r + 2) + ", column '" + x_col +
                                         "': cannot parse '" + xs + "' as a number");
    }
    const auto y = parse_double(ys);
    if (!y) {
      throw Error(errc::parse_error, "row " + std::to_string(r + 2) + ", column '" + y_col +
                                         "': cannot parse '" + ys + "' as a number");
    }
    points.push_back(BivariatePoint{*x, *y});
    if (li) {
      auto it = label_map.find(ls);
      if (it == label_map.end()) {
        it = label_map.emplace(ls, static_cast<int>(label_map.size()) + 1).first;
        mapping.emplace_back(ls, it->second);
      }
      labels.push_back(it->second);
    }
  }
  if (points.empty()) {
    throw Error(errc::insufficient_data, "'" + path + "': no usable rows after ingestion");
  }

  IngestReport report{
      li ? BivariateSample(std::move(points), std::move(labels))
         : BivariateSample(std::move(points)),
      dropped, std::move(mapping)};
  return report;
}

NumericTable load_numeric_table(const std::string& path, const std::vector<std::string>& exclude) {
  const CsvTable table = read_csv(path);

  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (std::find(exclude.begin(), exclude.end(), table.header[c]) != exclude.end()) continue;
    bool numeric = true;
    for (const auto& row : table.rows) {
      const std::string cell = trim(row[c]);
      if (cell.empty()) continue;  // blank handled by row dropping
      if (!parse_double(cell)) {
        numeric = false;
        break;
      }
    }
    if (numeric) keep.push_back(c);
  }

  NumericTable out;
  for (std::size_t c : keep) out.columns.push_back(table.header[c]);
  out.data.resize(keep.size());
  for (const auto& row : table.rows) {
    bool complete = true;
    for (std::size_t c : keep) {
      if (trim(row[c]).empty()) {
        complete = false;
        break;
      }
    }
    if (!complete) {
      ++out.dropped_rows;
      continue;
    }
    for (std::size_t j = 0; j < keep.size(); ++j) {
      out.data[j].push_back(*parse_double(row[keep[j]]));
    }
  }
  return out;
}

}  // namespace gpcs
