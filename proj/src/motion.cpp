#include "inloop/motion.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace inloop {

MotionField MotionField::zero(int width, int height)
{
  return {(width + kMacroblockSize - 1) / kMacroblockSize, (height + kMacroblockSize - 1) / kMacroblockSize, 0};
}

double macroblock_sad(const RealPlane& current, const RealPlane& reference, int column, int row, MotionVector mv)
{
  const int x0 = column * kMacroblockSize;
  const int y0 = row * kMacroblockSize;
  const int x1 = std::min(x0 + kMacroblockSize, current.width());
  const int y1 = std::min(y0 + kMacroblockSize, current.height());
  const bool interior = x0 - mv.dx >= 0 && y0 - mv.dy >= 0 && x1 - mv.dx <= reference.width() &&
                        y1 - mv.dy <= reference.height();
  double sad = 0.0;
  for (int y = y0; y < y1; y++)
  {
    const auto cur = current.row(y);
    if (interior)
    {
      const auto ref = reference.row(y - mv.dy);
      for (int x = x0; x < x1; x++)
        sad += std::abs(cur[x] - ref[x - mv.dx]);
    }
    else
    {
      for (int x = x0; x < x1; x++)
        sad += std::abs(cur[x] - reference.clamped(x - mv.dx, y - mv.dy));
    }
  }
  return sad;
}

MotionField full_search(const RealPlane& current, const RealPlane& reference, int range)
{
  if (!current.same_geometry(reference))
    throw DomainError("motion search needs planes of identical geometry");
  if (range < 0)
    throw DomainError("search range must be nonnegative");

  MotionField field(MotionField::zero(current.width(), current.height()).columns(),
                    MotionField::zero(current.width(), current.height()).rows(), range);
  for (int r = 0; r < field.rows(); r++)
  {
    for (int c = 0; c < field.columns(); c++)
    {
      MotionVector best{};
      double best_sad = std::numeric_limits<double>::infinity();
      int best_len = std::numeric_limits<int>::max();
      for (int dy = -range; dy <= range; dy++)
      {
        for (int dx = -range; dx <= range; dx++)
        {
          const double sad = macroblock_sad(current, reference, c, r, {dx, dy});
          const int len = std::abs(dx) + std::abs(dy);
          if (sad < best_sad || (sad == best_sad && len < best_len))
          {
            best = {dx, dy};
            best_sad = sad;
            best_len = len;
          }
        }
      }
      field.at(c, r) = best;
    }
  }
  return field;
}

RealPlane compensate(const RealPlane& reference, const MotionField& field)
{
  const auto expected = MotionField::zero(reference.width(), reference.height());
  if (field.columns() != expected.columns() || field.rows() != expected.rows())
    throw DomainError("motion field does not cover the reference plane");

  RealPlane out(reference.width(), reference.height(), reference.bit_depth());
  for (int y = 0; y < reference.height(); y++)
  {
    for (int x = 0; x < reference.width(); x++)
    {
      const auto mv = field.at(x / kMacroblockSize, y / kMacroblockSize);
      out.at(x, y) = reference.clamped(x - mv.dx, y - mv.dy);
    }
  }
  return out;
}

int default_search_range(std::string_view sequence_name)
{
  struct Entry
  {
    std::string_view name;
    int range;
  };
  static constexpr Entry kTable[] = {
    {"BasketballDrill", 12}, {"BQMall", 10}, {"FourPeople", 7},
    {"KristenAndSara", 3},   {"PartyScene", 10}, {"Vidyo", 7},
  };
  for (const auto& e : kTable)
  {
    if (sequence_name.find(e.name) != std::string_view::npos)
      return e.range;
  }
  return 8;
}

} // namespace inloop
