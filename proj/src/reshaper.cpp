#include "inloop/reshaper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace inloop {

OnePieceReshaper::OnePieceReshaper(double a, double b, double max_value)
  : m_a(a), m_b(b), m_max(max_value)
{
  if (!(a >= 0.0 && a < b && b <= 1.0))
    throw DomainError("one-piece reshaper needs 0 <= a < b <= 1");
  if (!(max_value > 0.0))
    throw DomainError("max code value must be positive");
  m_slope = 1.0 / (b - a);
  m_low = a * max_value;
  m_high = b * max_value;
}

TwoPieceReshaper::TwoPieceReshaper(double alpha1, double alpha2, double alpha3, double k1, double k2,
                                   double max_value)
  : m_alpha1(alpha1), m_alpha2(alpha2), m_alpha3(alpha3), m_k1(k1), m_k2(k2), m_max(max_value)
{
  if (!(alpha1 >= 0.0 && alpha1 < alpha2 && alpha2 < alpha3 && alpha3 <= 1.0))
    throw DomainError("two-piece reshaper needs 0 <= alpha1 < alpha2 < alpha3 <= 1");
  if (!(k1 > 0.0 && k2 > 0.0))
    throw DomainError("two-piece slopes must be positive");
  if (!(max_value > 0.0))
    throw DomainError("max code value must be positive");
  const double left = k1 * (alpha2 - alpha1) * max_value;
  const double right = k2 * (alpha2 - alpha3) * max_value + max_value;
  if (std::abs(left - right) > 1e-9 * max_value)
    throw DomainError("two-piece slopes violate continuity at the breakpoint");
  m_x1 = alpha1 * max_value;
  m_x2 = alpha2 * max_value;
  m_x3 = alpha3 * max_value;
  m_pivot = left;
}

TwoPieceReshaper TwoPieceReshaper::from_first_slope(double alpha1, double alpha2, double alpha3, double k1,
                                                    double max_value)
{
  if (!(alpha1 < alpha2 && alpha2 < alpha3))
    throw DomainError("two-piece reshaper needs alpha1 < alpha2 < alpha3");
  const double pivot = k1 * (alpha2 - alpha1);
  if (!(pivot > 0.0 && pivot < 1.0))
    throw DomainError("first slope maps the breakpoint outside (0, M)");
  const double k2 = (1.0 - pivot) / (alpha3 - alpha2);
  return {alpha1, alpha2, alpha3, k1, k2, max_value};
}

ReshaperEstimate estimate_params(std::span<const Plane> frames, double margin)
{
  if (frames.empty())
    throw DomainError("reshaper estimation needs at least one frame");
  if (margin < 0.0)
    throw DomainError("support margin must be nonnegative");

  std::uint16_t lo = std::numeric_limits<std::uint16_t>::max();
  std::uint16_t hi = 0;
  for (const auto& f : frames)
  {
    const auto [mn, mx] = std::ranges::minmax_element(f.samples());
    lo = std::min(lo, *mn);
    hi = std::max(hi, *mx);
  }
  const double maxv = frames.front().max_value();
  if (lo == hi)
    throw DomainError("flat content has no histogram support to expand");

  const double a = std::max(0.0, lo / maxv - margin);
  const double b = std::min(1.0, hi / maxv + margin);
  if (1.0 / (b - a) <= 1.0 + 1e-12)
    return {OnePieceReshaper::identity(maxv), true};
  return {OnePieceReshaper(a, b, maxv), false};
}

double lower_segment_weight(std::span<const Plane> frames, const TwoPieceReshaper& reshaper)
{
  std::size_t lower = 0;
  std::size_t total = 0;
  for (const auto& f : frames)
  {
    for (auto v : f.samples())
    {
      if (v <= reshaper.lower_clip() || v > reshaper.upper_clip())
        continue;
      total++;
      if (v <= reshaper.break_point())
        lower++;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(lower) / static_cast<double>(total);
}

std::string to_config_text(const Reshaper& reshaper)
{
  std::ostringstream os;
  os.precision(17);
  if (const auto* r = reshaper.one_piece())
  {
    os << "reshaper = " << (r->is_identity() ? "identity" : "one-piece") << "\n";
    os << "a = " << r->a() << "\nb = " << r->b() << "\n";
  }
  else if (const auto* r = reshaper.two_piece())
  {
    os << "reshaper = two-piece\n";
    os << "alpha1 = " << r->alpha1() << "\nalpha2 = " << r->alpha2() << "\nalpha3 = " << r->alpha3() << "\n";
    os << "k1 = " << r->k1() << "\nk2 = " << r->k2() << "\n";
  }
  return os.str();
}

} // namespace inloop
