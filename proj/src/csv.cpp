#include "sgm/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

namespace sgm {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io_error", "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io_error", "cannot open '" + path + "' for writing");
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;  // from_chars rejects a leading plus
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Lines of the file with their 1-based numbers; trailing blank lines dropped,
// interior blank lines rejected by the caller via empty field lists.
std::vector<std::pair<int, std::string>> file_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> lines;
  std::size_t start = 0;
  int number = 1;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string line =
        nl == std::string::npos ? text.substr(start) : text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.emplace_back(number, line);
    if (nl == std::string::npos) break;
    start = nl + 1;
    ++number;
  }
  while (!lines.empty() && trim(lines.back().second).empty()) lines.pop_back();
  return lines;
}

// Parsed rows of a comma-separated numeric file, header auto-detected.
std::vector<std::pair<int, std::vector<double>>> numeric_rows(const std::string& path,
                                                              int expected_fields) {
  const auto lines = file_lines(read_file(path));
  if (lines.empty()) fail("empty_file", "'" + path + "' has no rows");

  std::size_t first_row = 0;
  {  // header = first line with any non-numeric field
    double v;
    bool numeric = true;
    for (const auto& f : split_fields(lines[0].second))
      numeric = numeric && parse_double(f, v);
    if (!numeric) first_row = 1;
  }
  if (first_row >= lines.size()) fail("empty_file", "'" + path + "' has a header but no data rows");

  std::vector<std::pair<int, std::vector<double>>> rows;
  rows.reserve(lines.size() - first_row);
  int width = expected_fields;
  for (std::size_t k = first_row; k < lines.size(); ++k) {
    const auto& [lineno, line] = lines[k];
    const auto fields = split_fields(line);
    if (width < 0) width = static_cast<int>(fields.size());
    if (static_cast<int>(fields.size()) != width)
      fail("parse_error", "ragged row at line " + std::to_string(lineno) + ": expected " +
                              std::to_string(width) + " fields, got " +
                              std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!parse_double(fields[j], row[j]))
        fail("parse_error", "line " + std::to_string(lineno) + ", column " + std::to_string(j + 1) +
                                ": cannot parse '" + trim(fields[j]) + "' as a number");
      if (!std::isfinite(row[j]))
        fail("invalid_value", "non-finite value at line " + std::to_string(lineno) + ", column " +
                                  std::to_string(j + 1));
    }
    rows.emplace_back(lineno, std::move(row));
  }
  return rows;
}

void format_g17(char* buf, std::size_t n, double v) { std::snprintf(buf, n, "%.17g", v); }

int edge_index(double v, int p, int lineno, const char* which) {
  const int k = static_cast<int>(v);
  if (static_cast<double>(k) != v)
    fail("parse_error", std::string("line ") + std::to_string(lineno) + ": " + which +
                            " endpoint is not an integer");
  if (k < 0 || k >= p)
    fail("invalid_argument", std::string("line ") + std::to_string(lineno) + ": " + which +
                                 " endpoint " + std::to_string(k) + " outside [0, " +
                                 std::to_string(p) + ")");
  return k;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  const auto rows = numeric_rows(path, -1);
  Eigen::MatrixXd m(rows.size(), rows[0].second.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].second.size(); ++j) m(i, j) = rows[i].second[j];
  return Dataset(std::move(m));
}

void save_csv(const std::string& path, const Dataset& data,
              const std::vector<std::string>& col_names) {
  if (!col_names.empty() && static_cast<int>(col_names.size()) != data.p())
    fail("invalid_argument", "column name count does not match the data width");
  auto out = open_out(path);
  if (!col_names.empty()) {
    for (std::size_t j = 0; j < col_names.size(); ++j)
      out << (j ? "," : "") << col_names[j];
    out << '\n';
  }
  char buf[64];
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) {
      format_g17(buf, sizeof buf, data.values(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) fail("io_error", "failed writing '" + path + "'");
}

void save_edge_list(const std::string& path, const Graph& g) {
  auto out = open_out(path);
  out << "i,j\n";
  for (const auto& [i, j] : g.edges()) out << i << ',' << j << '\n';
  if (!out) fail("io_error", "failed writing '" + path + "'");
}

Graph load_edge_list(const std::string& path, int p) {
  Graph g(p);
  const auto lines = file_lines(read_file(path));
  if (lines.empty()) fail("empty_file", "'" + path + "' has no rows");
  for (const auto& [lineno, line] : lines) {
    const auto fields = split_fields(line);
    if (fields.size() != 2)
      fail("parse_error", "line " + std::to_string(lineno) + ": expected 'i,j'");
    double a, b;
    if (!parse_double(fields[0], a) || !parse_double(fields[1], b)) {
      if (lineno == lines[0].first) continue;  // header
      fail("parse_error", "line " + std::to_string(lineno) + ": cannot parse edge endpoints");
    }
    g.add_edge(edge_index(a, p, lineno, "first"), edge_index(b, p, lineno, "second"));
  }
  return g;
}

void save_frequency_matrix(const std::string& path, const Eigen::MatrixXd& freq) {
  if (freq.rows() != freq.cols()) fail("invalid_argument", "frequency matrix must be square");
  auto out = open_out(path);
  out << "i,j,frequency\n";
  char buf[64];
  for (int i = 0; i < freq.rows(); ++i)
    for (int j = i + 1; j < freq.cols(); ++j) {
      format_g17(buf, sizeof buf, freq(i, j));
      out << i << ',' << j << ',' << buf << '\n';
    }
  if (!out) fail("io_error", "failed writing '" + path + "'");
}

Eigen::MatrixXd load_frequency_matrix(const std::string& path, int p) {
  if (p < 1) fail("invalid_argument", "need at least one node");
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(p, p);
  const auto rows = numeric_rows(path, 3);
  for (const auto& [lineno, row] : rows) {
    const int i = edge_index(row[0], p, lineno, "first");
    const int j = edge_index(row[1], p, lineno, "second");
    if (i == j) fail("invalid_argument", "line " + std::to_string(lineno) + ": diagonal entry");
    if (row[2] < 0.0 || row[2] > 1.0)
      fail("invalid_value", "line " + std::to_string(lineno) + ": frequency outside [0,1]");
    freq(i, j) = freq(j, i) = row[2];
  }
  return freq;
}

}  // namespace sgm
