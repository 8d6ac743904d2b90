#include "spr/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spr/errors.hpp"

namespace spr {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

double parse_double(const std::string& cell) {
  if (cell.empty() || cell == "NA" || cell == "nan" || cell == "NaN")
    return std::numeric_limits<double>::quiet_NaN();
  double value{};
  const auto* begin = cell.data();
  const auto* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw InputError("cannot parse numeric value '" + cell + "'");
  return value;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> CsvTable::numeric_column(int idx) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (idx < 0 || idx >= static_cast<int>(row.size()))
      throw InputError("CSV row is missing column " + std::to_string(idx));
    out.push_back(parse_double(row[idx]));
  }
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open CSV file: " + path);
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    if (!have_header) {
      table.header = split_csv_line(line);
      have_header = true;
    } else {
      auto cells = split_csv_line(line);
      if (cells.size() != table.header.size())
        throw InputError(path + ": row with " + std::to_string(cells.size()) +
                         " cells, expected " + std::to_string(table.header.size()));
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw InputError(path + ": missing header row");
  return table;
}

RawTable parse_data_table(const CsvTable& table, const std::string& path) {
  RawTable raw;
  int y_col = -1;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string& name = table.header[i];
    if (name == "y") {
      y_col = static_cast<int>(i);
    } else if (name.rfind("x_", 0) == 0) {
      raw.x_names.push_back(name);
      raw.x_cols.push_back(table.numeric_column(static_cast<int>(i)));
    } else if (name.rfind("w_", 0) == 0) {
      raw.w_names.push_back(name);
      raw.w_cols.push_back(table.numeric_column(static_cast<int>(i)));
    } else if (name == "offset") {
      raw.offsets = table.numeric_column(static_cast<int>(i));
    } else {
      throw InputError(path + ": unrecognised column '" + name +
                       "' (expected y, x_*, w_*, or offset)");
    }
  }
  if (y_col < 0) throw InputError(path + ": missing response column 'y'");
  raw.y = table.numeric_column(y_col);
  return raw;
}

RawTable load_data_csv(const std::string& path) {
  return parse_data_table(read_csv(path), path);
}

std::vector<std::pair<int, int>> load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open adjacency file: " + path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ss(t);
    long a, b;
    if (!(ss >> a >> b))
      throw InputError(path + ":" + std::to_string(line_no) + ": expected two indices");
    std::string rest;
    if (ss >> rest)
      throw InputError(path + ":" + std::to_string(line_no) + ": trailing tokens");
    edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  return edges;
}

void write_edge_list(const std::string& path, const NeighborhoodGraph& graph) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write adjacency file: " + path);
  out << "# one undirected edge per line, zero-based indices\n";
  for (const auto& [i, j] : graph.edges()) out << i << " " << j << "\n";
}

void write_data_csv(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write data CSV: " + path);
  out.precision(17);
  out << "y";
  for (int j = 0; j < dataset.n_covariates(); ++j) out << ",x_" << j;
  for (int k = 0; k < dataset.n_fixed_effects(); ++k) out << ",w_" << k;
  if (!dataset.offsets.empty()) out << ",offset";
  out << "\n";
  for (int i = 0; i < dataset.n(); ++i) {
    out << dataset.y[i];
    for (int j = 0; j < dataset.n_covariates(); ++j) out << "," << dataset.x[i][j];
    for (int k = 0; k < dataset.n_fixed_effects(); ++k) out << "," << dataset.w[i][k];
    if (!dataset.offsets.empty()) out << "," << dataset.offsets[i];
    out << "\n";
  }
}

}  // namespace spr
