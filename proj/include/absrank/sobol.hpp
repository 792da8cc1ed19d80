#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace absrank {

// Identifier of the direction-number table compiled into this build.
// Recorded in sample artifacts so results stay auditable.
extern const char* const kSobolTableId;

struct SobolConfig {
  int dim = 1;
  int log2n = 10;          // N = 2^log2n points are generated
  std::uint32_t skip = 1;  // leading points dropped; 1 skips the origin
  std::string table = "";  // empty means the built-in table

  std::int64_t count() const { return std::int64_t{1} << log2n; }
};

// Incremental Sobol generator (Gray-code construction, 32-bit state).
// Dimension 1 is the van der Corput sequence; higher dimensions use the
// embedded published direction-number table.  Fully deterministic.
class SobolSequence {
 public:
  static constexpr int kMaxDimension = 64;
  static constexpr int kBits = 32;

  // skip = number of leading sequence elements to drop (index 0 is the
  // all-zeros point).
  explicit SobolSequence(int dim, std::uint32_t skip = 1);

  int dim() const { return dim_; }

  // Writes the next point into out (size dim) and advances the state.
  void next(Eigen::Ref<Eigen::VectorXd> out);

 private:
  int dim_;
  std::uint32_t index_;                 // index of the point held in state_
  Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic> v_;  // dim x 32
  Eigen::Matrix<std::uint32_t, Eigen::Dynamic, 1> state_;

  void advance();
};

// Materializes N x dim points for the given config.  Throws CapabilityError
// when dim exceeds the table, DomainError for invalid log2n/skip.
Eigen::MatrixXd sobol_points(const SobolConfig& cfg);

}  // namespace absrank
