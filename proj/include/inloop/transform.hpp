#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "inloop/error.hpp"

namespace inloop {

inline constexpr int kTransformSize = 4;

/// 4x4 block, row-major: element (row r, column c) at index 4*r + c.
using Block4 = std::array<double, 16>;
using Matrix4 = std::array<std::array<double, 4>, 4>;

/// Orthonormal DCT-II basis; row u is the u-th basis vector.
const Matrix4& dct4_basis();

/// H * block * H^T.
Block4 dct4_forward(const Block4& block);

/// H^T * coeffs * H.
Block4 dct4_inverse(const Block4& coeffs);

/// The 16x16 operator that maps a column-vectorized 4x4 block to its
/// column-vectorized coefficients, built by transforming unit blocks.
std::array<std::array<double, 16>, 16> block_transform_operator();

/// Kronecker product of two 4x4 matrices.
std::array<std::array<double, 16>, 16> kronecker(const Matrix4& lhs, const Matrix4& rhs);

struct QuantizerSpec
{
  int qp = 0;
  double step = 1.0;

  friend bool operator==(const QuantizerSpec&, const QuantizerSpec&) = default;
};

/// H.264/AVC QP -> quantization step; doubles every 6 QP.
QuantizerSpec quantizer_for_qp(int qp);

/// QP {18, 24, 30, 36, 42, 48, 51} -> step {5, 10, 20, 40, 80, 160, 224}.
std::vector<QuantizerSpec> canonical_ladder();

/// Nearest integer with ties toward +infinity.
inline double round_half_up(double v) { return std::floor(v + 0.5); }

/// round(v) - v, in (-1/2, 1/2].
inline double rounding_residue(double v) { return round_half_up(v) - v; }

inline std::int32_t codeword_index(double x, double step)
{
  if (!(step > 0.0))
    throw DomainError("quantization step must be positive");
  return static_cast<std::int32_t>(round_half_up(x / step));
}

/// q * round(x / q).
inline double quantize(double x, double step)
{
  return step * static_cast<double>(codeword_index(x, step));
}

} // namespace inloop
