#pragma once

#include <cstdint>

namespace absrank::detail {

// Primitive-polynomial row for one Sobol dimension: degree s, the encoded
// middle coefficients a of the polynomial, and the first s initial direction
// integers m_1..m_s (all odd, m_i < 2^i).  Dimension 1 needs no row: it is
// the van der Corput sequence (every m_i = 1).
struct DirectionRow {
  int s;
  std::uint32_t a;
  std::uint32_t m[9];
};

// Rows for dimensions 2..64 in order.
extern const DirectionRow kDirectionRows[63];
extern const int kDirectionRowCount;

}  // namespace absrank::detail
