#pragma once

#include <string>
#include <vector>

#include "spr/data.hpp"
#include "spr/graph.hpp"

namespace spr {

// Minimal CSV table: a header row plus string cells. Numeric access parses
// on demand; "NA" and empty cells read as NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int n_rows() const { return static_cast<int>(rows.size()); }
  int column(const std::string& name) const;       // -1 if absent
  std::vector<double> numeric_column(int idx) const;
};

CsvTable read_csv(const std::string& path);

// Data CSV convention: one `y` column, covariates prefixed `x_`, fixed
// effects prefixed `w_`, optional `offset` column. Row order defines the
// area index.
RawTable parse_data_table(const CsvTable& table, const std::string& path);
RawTable load_data_csv(const std::string& path);

// Adjacency file: one undirected edge per line as two whitespace-separated
// zero-based indices; `#` starts a comment line. Node count is the number
// of data rows, passed in by the caller.
std::vector<std::pair<int, int>> load_edge_list(const std::string& path);
void write_edge_list(const std::string& path, const NeighborhoodGraph& graph);

void write_data_csv(const std::string& path, const Dataset& dataset);

double parse_double(const std::string& cell);  // NA/empty -> NaN

}  // namespace spr
