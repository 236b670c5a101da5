#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpcs/types.hpp"

namespace gpcs {

/// A parsed CSV file: header row plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws missing_column
};

/// RFC-4180-style reader: quoted fields, doubled quotes, CR/LF endings.
/// A header row is required.
CsvTable read_csv(const std::string& path);

struct IngestReport {
  BivariateSample sample;
  std::size_t dropped_rows = 0;  // rows with blank x/y/label cells
  std::vector<std::pair<std::string, int>> label_mapping;  // first-appearance order
};

/// Builds a bivariate sample from named CSV columns. Blank cells drop the
/// row (count reported); non-numeric x/y cells are parse errors. Label
/// values of any type map to 1..K by first appearance.
IngestReport ingest_csv(const std::string& path, const std::string& x_col,
                        const std::string& y_col,
                        const std::optional<std::string>& label_col = std::nullopt);

/// Numeric view of a CSV for the all-pairs scan: keeps the columns whose
/// non-blank cells all parse as numbers, drops rows with blanks among the
/// kept columns.
struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // column-major, data[c][r]
  std::size_t dropped_rows = 0;

  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
};

NumericTable load_numeric_table(const std::string& path,
                                const std::vector<std::string>& exclude = {});

/// Strict locale-independent double parse of a whole (trimmed) cell.
std::optional<double> parse_double(const std::string& cell);

}  // namespace gpcs
