#include "inloop/transform.hpp"

#include <numbers>

namespace inloop {

const Matrix4& dct4_basis()
{
  static const Matrix4 basis = [] {
    Matrix4 h{};
    for (int u = 0; u < 4; u++)
    {
      const double scale = u == 0 ? std::sqrt(0.25) : std::sqrt(0.5);
      for (int n = 0; n < 4; n++)
        h[u][n] = scale * std::cos(std::numbers::pi * (2 * n + 1) * u / 8.0);
    }
    return h;
  }();
  return basis;
}

Block4 dct4_forward(const Block4& block)
{
  const auto& h = dct4_basis();
  Block4 tmp{};
  // tmp = H * block
  for (int r = 0; r < 4; r++)
    for (int c = 0; c < 4; c++)
    {
      double s = 0.0;
      for (int k = 0; k < 4; k++)
        s += h[r][k] * block[4 * k + c];
      tmp[4 * r + c] = s;
    }
  Block4 out{};
  // out = tmp * H^T
  for (int r = 0; r < 4; r++)
    for (int c = 0; c < 4; c++)
    {
      double s = 0.0;
      for (int k = 0; k < 4; k++)
        s += tmp[4 * r + k] * h[c][k];
      out[4 * r + c] = s;
    }
  return out;
}

Block4 dct4_inverse(const Block4& coeffs)
{
  const auto& h = dct4_basis();
  Block4 tmp{};
  // tmp = H^T * coeffs
  for (int r = 0; r < 4; r++)
    for (int c = 0; c < 4; c++)
    {
      double s = 0.0;
      for (int k = 0; k < 4; k++)
        s += h[k][r] * coeffs[4 * k + c];
      tmp[4 * r + c] = s;
    }
  Block4 out{};
  // out = tmp * H
  for (int r = 0; r < 4; r++)
    for (int c = 0; c < 4; c++)
    {
      double s = 0.0;
      for (int k = 0; k < 4; k++)
        s += tmp[4 * r + k] * h[k][c];
      out[4 * r + c] = s;
    }
  return out;
}

std::array<std::array<double, 16>, 16> block_transform_operator()
{
  std::array<std::array<double, 16>, 16> op{};
  // Column-major vectorization: vector slot j holds (row j % 4, column j / 4).
  for (int j = 0; j < 16; j++)
  {
    Block4 unit{};
    unit[4 * (j % 4) + j / 4] = 1.0;
    const Block4 coeffs = dct4_forward(unit);
    for (int i = 0; i < 16; i++)
      op[i][j] = coeffs[4 * (i % 4) + i / 4];
  }
  return op;
}

std::array<std::array<double, 16>, 16> kronecker(const Matrix4& lhs, const Matrix4& rhs)
{
  std::array<std::array<double, 16>, 16> out{};
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < 4; j++)
      for (int k = 0; k < 4; k++)
        for (int l = 0; l < 4; l++)
          out[4 * i + k][4 * j + l] = lhs[i][j] * rhs[k][l];
  return out;
}

QuantizerSpec quantizer_for_qp(int qp)
{
  if (qp < 0 || qp > 51)
    throw DomainError("QP must be in [0, 51]");
  static constexpr double kBase[6] = {0.625, 0.6875, 0.8125, 0.875, 1.0, 1.125};
  return {qp, kBase[qp % 6] * static_cast<double>(1 << (qp / 6))};
}

std::vector<QuantizerSpec> canonical_ladder()
{
  std::vector<QuantizerSpec> ladder;
  for (int qp : {18, 24, 30, 36, 42, 48, 51})
    ladder.push_back(quantizer_for_qp(qp));
  return ladder;
}

} // namespace inloop
