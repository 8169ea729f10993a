#pragma once

#include <span>
#include <string>
#include <variant>

#include "inloop/signal.hpp"

namespace inloop {

/// Single active segment: [aM, bM] is stretched linearly onto [0, M].
/// Breakpoints are fractions of the code range; clip levels of the
/// backward map are aM and bM in intensity units.
class OnePieceReshaper
{
public:
  /// Requires 0 <= a < b <= 1 and max_value > 0.
  OnePieceReshaper(double a, double b, double max_value);

  static OnePieceReshaper identity(double max_value) { return {0.0, 1.0, max_value}; }

  double forward(double x) const
  {
    if (x <= m_low)
      return 0.0;
    if (x <= m_high)
      return m_slope * (x - m_low);
    return m_max;
  }

  double backward(double y) const
  {
    if (y <= 0.0)
      return m_low;
    if (y <= m_max)
      return y / m_slope + m_low;
    return m_high;
  }

  double a() const { return m_a; }
  double b() const { return m_b; }
  double slope() const { return m_slope; }
  double max_value() const { return m_max; }
  double lower_clip() const { return m_low; }
  double upper_clip() const { return m_high; }
  bool is_identity() const { return m_a == 0.0 && m_b == 1.0; }

private:
  double m_a;
  double m_b;
  double m_max;
  double m_slope;
  double m_low;
  double m_high;
};

/// Two active segments meeting at alpha2*M, whose forward image is the pivot beta2.
class TwoPieceReshaper
{
public:
  /// Checks continuity k1*(alpha2 - alpha1)*M == k2*(alpha2 - alpha3)*M + M.
  TwoPieceReshaper(double alpha1, double alpha2, double alpha3, double k1, double k2, double max_value);

  /// Derives k2 from continuity.
  static TwoPieceReshaper from_first_slope(double alpha1, double alpha2, double alpha3, double k1, double max_value);

  double forward(double x) const
  {
    if (x <= m_x1)
      return 0.0;
    if (x <= m_x2)
      return m_k1 * (x - m_x1);
    if (x <= m_x3)
      return m_k2 * (x - m_x3) + m_max;
    return m_max;
  }

  double backward(double y) const
  {
    if (y <= 0.0)
      return m_x1;
    if (y <= m_pivot)
      return y / m_k1 + m_x1;
    if (y <= m_max)
      return (y - m_max) / m_k2 + m_x3;
    return m_x3;
  }

  double alpha1() const { return m_alpha1; }
  double alpha2() const { return m_alpha2; }
  double alpha3() const { return m_alpha3; }
  double k1() const { return m_k1; }
  double k2() const { return m_k2; }
  double max_value() const { return m_max; }
  double pivot() const { return m_pivot; }
  double lower_clip() const { return m_x1; }
  double break_point() const { return m_x2; }
  double upper_clip() const { return m_x3; }

private:
  double m_alpha1, m_alpha2, m_alpha3;
  double m_k1, m_k2;
  double m_max;
  double m_x1, m_x2, m_x3;
  double m_pivot;
};

/// Either reshaper kind behind one forward/backward interface.
class Reshaper
{
public:
  Reshaper(OnePieceReshaper r) : m_impl(r) {}
  Reshaper(TwoPieceReshaper r) : m_impl(r) {}

  double forward(double x) const
  {
    return std::visit([x](const auto& r) { return r.forward(x); }, m_impl);
  }
  double backward(double y) const
  {
    return std::visit([y](const auto& r) { return r.backward(y); }, m_impl);
  }
  double max_value() const
  {
    return std::visit([](const auto& r) { return r.max_value(); }, m_impl);
  }

  bool is_two_piece() const { return std::holds_alternative<TwoPieceReshaper>(m_impl); }
  const OnePieceReshaper* one_piece() const { return std::get_if<OnePieceReshaper>(&m_impl); }
  const TwoPieceReshaper* two_piece() const { return std::get_if<TwoPieceReshaper>(&m_impl); }

private:
  std::variant<OnePieceReshaper, TwoPieceReshaper> m_impl;
};

struct ReshaperEstimate
{
  OnePieceReshaper reshaper;
  // Set when the content already spans the full range and no expansion is possible.
  bool degraded_to_identity = false;
};

/// Reshaper from the histogram support of `frames`, widened by `margin`
/// (fraction of the code range) on each side. Throws on flat content.
ReshaperEstimate estimate_params(std::span<const Plane> frames, double margin = 0.0);

/// Mass fraction of samples at or below the two-piece breakpoint amongst
/// samples inside the active range; the w1 weight of the entropy-gain formula.
double lower_segment_weight(std::span<const Plane> frames, const TwoPieceReshaper& reshaper);

/// Reshaper parameters as key = value lines.
std::string to_config_text(const Reshaper& reshaper);

} // namespace inloop
