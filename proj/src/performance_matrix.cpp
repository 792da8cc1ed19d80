#include "absrank/performance_matrix.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <unordered_set>

#include "absrank/errors.hpp"

namespace absrank {

namespace {

void check_unique(const std::vector<std::string>& labels, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) {
      throw LabelError(std::string(what) + " label is empty");
    }
    if (!seen.insert(l).second) {
      throw LabelError("duplicate " + std::string(what) + " label '" + l + "'");
    }
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_cell(const std::string& cell, const std::string& row_label,
                  const std::string& col_label) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("cell (" + row_label + ", " + col_label +
                     ") is not a finite number: '" + cell + "'");
  }
  return value;
}

std::string format_value(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::scientific);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Eigen::Index PerformanceMatrix::algorithm_index(const std::string& label) const {
  for (Eigen::Index i = 0; i < n(); ++i) {
    if (algorithms[static_cast<size_t>(i)] == label) return i;
  }
  throw LabelError("unknown algorithm label '" + label + "'");
}

Eigen::Index PerformanceMatrix::problem_index(const std::string& label) const {
  for (Eigen::Index j = 0; j < p(); ++j) {
    if (problems[static_cast<size_t>(j)] == label) return j;
  }
  throw LabelError("unknown problem label '" + label + "'");
}

PerformanceMatrix make_matrix(std::vector<std::string> algorithms,
                              std::vector<std::string> problems,
                              Eigen::MatrixXd values, bool lower_is_better) {
  if (static_cast<Eigen::Index>(algorithms.size()) != values.rows() ||
      static_cast<Eigen::Index>(problems.size()) != values.cols()) {
    throw ShapeError("label counts do not match matrix dimensions");
  }
  if (values.rows() < 2 || values.cols() < 1) {
    throw SizeError("matrix needs at least 2 algorithms and 1 problem, got " +
                    std::to_string(values.rows()) + "x" +
                    std::to_string(values.cols()));
  }
  check_unique(algorithms, "algorithm");
  check_unique(problems, "problem");
  if (!values.allFinite()) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      for (Eigen::Index j = 0; j < values.cols(); ++j) {
        if (!std::isfinite(values(i, j))) {
          throw ParseError("cell (" + algorithms[static_cast<size_t>(i)] + ", " +
                           problems[static_cast<size_t>(j)] + ") is not finite");
        }
      }
    }
  }
  if (!lower_is_better) values = -values;
  PerformanceMatrix m;
  m.algorithms = std::move(algorithms);
  m.problems = std::move(problems);
  m.values = std::move(values);
  m.lower_is_better = lower_is_better;
  return m;
}

PerformanceMatrix load_matrix(std::istream& in, bool lower_is_better) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.size() < 2) {
    throw ShapeError("CSV header must name at least one problem column");
  }
  std::vector<std::string> problems(header.begin() + 1, header.end());
  std::vector<std::string> algorithms;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ShapeError("row '" + (cells.empty() ? "" : cells[0]) + "' has " +
                       std::to_string(cells.size() - 1) + " cells, expected " +
                       std::to_string(header.size() - 1));
    }
    algorithms.push_back(cells[0]);
    std::vector<double> row;
    row.reserve(cells.size() - 1);
    for (size_t j = 1; j < cells.size(); ++j) {
      row.push_back(parse_cell(cells[j], cells[0], problems[j - 1]));
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(problems.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return make_matrix(std::move(algorithms), std::move(problems),
                     std::move(values), lower_is_better);
}

PerformanceMatrix load_matrix_file(const std::string& path,
                                   bool lower_is_better) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  return load_matrix(in, lower_is_better);
}

void save_matrix(const PerformanceMatrix& m, std::ostream& out,
                 const std::string& comment) {
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << "\n";
  }
  out << "algorithm";
  for (const auto& p : m.problems) out << "," << p;
  out << "\n";
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    out << m.algorithms[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < m.p(); ++j) {
      out << "," << format_value(m.values(i, j));
    }
    out << "\n";
  }
}

void save_matrix_file(const PerformanceMatrix& m, const std::string& path,
                      const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  save_matrix(m, out, comment);
}

PerformanceMatrix project(const PerformanceMatrix& m,
                          const std::vector<std::string>& keep) {
  check_unique(keep, "projection");
  std::unordered_set<std::string> wanted;
  for (const auto& label : keep) {
    m.algorithm_index(label);  // throws on unknown labels
    wanted.insert(label);
  }
  if (wanted.size() < 2) {
    throw SizeError("projection must keep at least 2 algorithms, got " +
                    std::to_string(wanted.size()));
  }
  std::vector<std::string> labels;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    const auto& label = m.algorithms[static_cast<size_t>(i)];
    if (wanted.count(label)) {
      labels.push_back(label);
      rows.push_back(i);
    }
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), m.p());
  for (size_t i = 0; i < rows.size(); ++i) {
    values.row(static_cast<Eigen::Index>(i)) = m.values.row(rows[i]);
  }
  PerformanceMatrix out;
  out.algorithms = std::move(labels);
  out.problems = m.problems;
  out.values = std::move(values);
  out.lower_is_better = m.lower_is_better;
  return out;
}

}  // namespace absrank
