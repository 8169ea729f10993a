#pragma once

#include <string_view>
#include <vector>

#include "inloop/signal.hpp"

namespace inloop {

/// Displacement of content from the reference to the current frame:
/// the prediction of current pixel (x, y) is reference(x - dx, y - dy).
struct MotionVector
{
  int dx = 0;
  int dy = 0;

  friend bool operator==(const MotionVector&, const MotionVector&) = default;
};

class MotionField
{
public:
  MotionField() = default;
  MotionField(int columns, int rows, int search_range)
    : m_columns(columns), m_rows(rows), m_searchRange(search_range),
      m_vectors(static_cast<std::size_t>(columns) * rows)
  {
  }

  /// Zero field covering a plane of the given size.
  static MotionField zero(int width, int height);

  int columns() const { return m_columns; }
  int rows() const { return m_rows; }
  int search_range() const { return m_searchRange; }

  MotionVector& at(int column, int row) { return m_vectors[static_cast<std::size_t>(row) * m_columns + column]; }
  const MotionVector& at(int column, int row) const
  {
    return m_vectors[static_cast<std::size_t>(row) * m_columns + column];
  }
  const std::vector<MotionVector>& vectors() const { return m_vectors; }

  friend bool operator==(const MotionField&, const MotionField&) = default;

private:
  int m_columns = 0;
  int m_rows = 0;
  int m_searchRange = 0;
  std::vector<MotionVector> m_vectors;
};

/// SAD of one 16x16 macroblock against the displaced, edge-clamped reference.
double macroblock_sad(const RealPlane& current, const RealPlane& reference, int column, int row, MotionVector mv);

/// Exhaustive +-range search per macroblock minimizing SAD. Ties go to the
/// smallest |dx| + |dy|, then to the earliest candidate in raster order.
MotionField full_search(const RealPlane& current, const RealPlane& reference, int range);

RealPlane compensate(const RealPlane& reference, const MotionField& field);

/// Search ranges chosen for the standard test sequences; 8 for anything else.
int default_search_range(std::string_view sequence_name);

} // namespace inloop
