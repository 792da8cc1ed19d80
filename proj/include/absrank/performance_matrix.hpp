#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace absrank {

// Labeled n x p matrix of metric values: one row per algorithm, one column
// per problem.  Values are stored in lower-is-better orientation; matrices
// loaded as higher-is-better are negated on construction and keep the flag
// for provenance.  Immutable by convention after construction.
struct PerformanceMatrix {
  std::vector<std::string> algorithms;  // n unique row labels
  std::vector<std::string> problems;    // p unique column labels
  Eigen::MatrixXd values;               // n x p, finite
  bool lower_is_better = true;          // orientation of the original data

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index p() const { return values.cols(); }

  // Index of an algorithm label; throws LabelError when absent.
  Eigen::Index algorithm_index(const std::string& label) const;
  // Index of a problem label; throws LabelError when absent.
  Eigen::Index problem_index(const std::string& label) const;
};

// Validates labels and values and assembles a matrix.  When lower_is_better
// is false the values are negated so downstream math can assume
// lower-is-better throughout.
PerformanceMatrix make_matrix(std::vector<std::string> algorithms,
                              std::vector<std::string> problems,
                              Eigen::MatrixXd values,
                              bool lower_is_better = true);

// CSV reader.  Expected layout: header `algorithm,<p1>,<p2>,...`, one row
// per algorithm with its label in the first cell.  Lines starting with '#'
// are skipped (artifact manifests ride in such comments).  Malformed cells
// raise ParseError naming the cell, ragged rows ShapeError, duplicate
// labels LabelError.
PerformanceMatrix load_matrix(std::istream& in, bool lower_is_better = true);
PerformanceMatrix load_matrix_file(const std::string& path,
                                   bool lower_is_better = true);

// CSV writer emitting shortest round-trip scientific literals, so that
// load(save(M)) reproduces M bit for bit.  A non-empty comment is written
// as leading '#' lines.
void save_matrix(const PerformanceMatrix& m, std::ostream& out,
                 const std::string& comment = "");
void save_matrix_file(const PerformanceMatrix& m, const std::string& path,
                      const std::string& comment = "");

// Row-subset projection.  keep must name at least two distinct existing
// algorithms; the original row order is preserved regardless of the order
// of keep.
PerformanceMatrix project(const PerformanceMatrix& m,
                          const std::vector<std::string>& keep);

}  // namespace absrank
