#include "absrank/sobol.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "absrank/errors.hpp"
#include "sobol_directions.hpp"

namespace absrank {

SobolSequence::SobolSequence(int dim, std::uint32_t skip) : dim_(dim) {
  if (dim < 1) throw DomainError("sobol: dimension must be >= 1");
  if (dim > kMaxDimension) {
    throw CapabilityError("sobol: dimension " + std::to_string(dim) +
                          " exceeds the built-in direction-number table (" +
                          std::to_string(kMaxDimension) + " dimensions, " +
                          kSobolTableId + ")");
  }
  v_.resize(dim, kBits);
  // Dimension 1: van der Corput, m_i = 1 for all i.
  for (int i = 0; i < kBits; ++i) {
    v_(0, i) = std::uint32_t{1} << (kBits - 1 - i);
  }
  for (int d = 1; d < dim; ++d) {
    const auto& row = detail::kDirectionRows[d - 1];
    const int s = row.s;
    for (int i = 0; i < s && i < kBits; ++i) {
      v_(d, i) = row.m[i] << (kBits - 1 - i);
    }
    // Recurrence for the remaining bits:
    //   V_i = V_{i-s} ^ (V_{i-s} >> s) ^ sum_{k=1..s-1} a_k V_{i-k}
    // where a_k is bit (s-1-k) of the encoded polynomial coefficients.
    for (int i = s; i < kBits; ++i) {
      std::uint32_t value = v_(d, i - s) ^ (v_(d, i - s) >> s);
      for (int k = 1; k < s; ++k) {
        if ((row.a >> (s - 1 - k)) & 1u) value ^= v_(d, i - k);
      }
      v_(d, i) = value;
    }
  }
  state_ = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, 1>::Zero(dim);
  index_ = 0;
  for (std::uint32_t i = 0; i < skip; ++i) advance();
}

void SobolSequence::advance() {
  // Gray-code step: flip along the direction of the lowest zero bit of the
  // current index.
  const int bit = std::countr_zero(~index_);
  for (int d = 0; d < dim_; ++d) state_(d) ^= v_(d, bit);
  ++index_;
}

void SobolSequence::next(Eigen::Ref<Eigen::VectorXd> out) {
  constexpr double scale = 1.0 / 4294967296.0;  // 2^-32
  for (int d = 0; d < dim_; ++d) out(d) = static_cast<double>(state_(d)) * scale;
  advance();
}

Eigen::MatrixXd sobol_points(const SobolConfig& cfg) {
  if (!cfg.table.empty() && cfg.table != kSobolTableId) {
    throw CapabilityError("sobol: unknown direction-number table '" +
                          cfg.table + "'; this build embeds " + kSobolTableId);
  }
  if (cfg.log2n < 0 || cfg.log2n > 31) {
    throw DomainError("sobol: log2n must lie in [0, 31], got " +
                      std::to_string(cfg.log2n));
  }
  SobolSequence seq(cfg.dim, cfg.skip);
  const std::int64_t n = cfg.count();
  Eigen::MatrixXd pts(n, cfg.dim);
  Eigen::VectorXd row(cfg.dim);
  for (std::int64_t i = 0; i < n; ++i) {
    seq.next(row);
    pts.row(i) = row;
  }
  return pts;
}

}  // namespace absrank
