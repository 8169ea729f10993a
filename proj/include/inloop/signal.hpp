#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inloop/error.hpp"

namespace inloop {

inline constexpr int kMacroblockSize = 16;

/// Largest code value of an n-bit sample, M = 2^n - 1.
constexpr int max_code_value(int bit_depth) { return (1 << bit_depth) - 1; }

/// Single-component raster, row-major. Integer planes hold source frames;
/// real-valued planes hold predictions and reconstructions.
template <typename T>
class BasicPlane
{
public:
  using value_type = T;

  BasicPlane() = default;
  BasicPlane(int width, int height, int bit_depth, T fill = T{})
    : m_width(width), m_height(height), m_bitDepth(bit_depth),
      m_samples(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill)
  {
    if (width <= 0 || height <= 0)
      throw DomainError("plane dimensions must be positive");
    if (bit_depth < 1 || bit_depth > 16)
      throw DomainError("bit depth must be in [1, 16]");
  }

  int width() const { return m_width; }
  int height() const { return m_height; }
  int bit_depth() const { return m_bitDepth; }
  double max_value() const { return max_code_value(m_bitDepth); }
  std::size_t size() const { return m_samples.size(); }

  T& at(int x, int y) { return m_samples[index(x, y)]; }
  const T& at(int x, int y) const { return m_samples[index(x, y)]; }

  /// Edge-replicated access for coordinates outside the raster.
  const T& clamped(int x, int y) const
  {
    x = x < 0 ? 0 : (x >= m_width ? m_width - 1 : x);
    y = y < 0 ? 0 : (y >= m_height ? m_height - 1 : y);
    return m_samples[index(x, y)];
  }

  std::span<T> samples() { return m_samples; }
  std::span<const T> samples() const { return m_samples; }
  std::span<const T> row(int y) const { return std::span<const T>(m_samples).subspan(index(0, y), m_width); }

  bool same_geometry(const auto& other) const
  {
    return m_width == other.width() && m_height == other.height() && m_bitDepth == other.bit_depth();
  }

  friend bool operator==(const BasicPlane&, const BasicPlane&) = default;

private:
  std::size_t index(int x, int y) const
  {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(m_width) + static_cast<std::size_t>(x);
  }

  int m_width = 0;
  int m_height = 0;
  int m_bitDepth = 8;
  std::vector<T> m_samples;
};

using Plane = BasicPlane<std::uint16_t>;
using RealPlane = BasicPlane<double>;

RealPlane to_real(const Plane& plane);

/// Throws if any sample exceeds 2^n - 1.
void validate_range(const Plane& plane);

/// Pads right/bottom by edge replication up to the next multiple of `block`.
Plane pad_to_multiple(const Plane& plane, int block = kMacroblockSize);

struct Sequence
{
  std::vector<Plane> frames;
  double frame_rate = 30.0;
  std::string name;

  int width() const;
  int height() const;
  int bit_depth() const;

  /// Throws unless nonempty and all frames share geometry and bit depth.
  void validate() const;
};

/// Reads the luma planes of a raw planar 4:2:0 file. 10-bit (and wider)
/// samples are two bytes, little-endian, LSB-aligned.
Sequence load_yuv(const std::filesystem::path& path, int width, int height, int bit_depth);

/// Writes luma planes with mid-level chroma so the file is a valid 4:2:0 raw stream.
void save_yuv(const std::filesystem::path& path, const Sequence& sequence);

enum class SyntheticKind
{
  ramp,
  moving_block,
  noise_texture,
};

SyntheticKind parse_synthetic_kind(std::string_view name);
std::string_view to_string(SyntheticKind kind);

struct SyntheticSpec
{
  SyntheticKind kind = SyntheticKind::moving_block;
  int width = 64;
  int height = 64;
  int bit_depth = 10;
  int frame_count = 20;
  std::uint64_t seed = 1;
  // Every sample lies in [round(low_fraction*M), round(high_fraction*M)].
  double low_fraction = 0.2;
  double high_fraction = 0.7;
  // Per-frame content motion for ramp and moving-block.
  int motion_x = 2;
  int motion_y = -1;
  // Std-dev of i.i.d. Gaussian noise added to every frame (ramp, moving-block).
  double noise_sigma = 0.0;
  // noise-texture only: 0 draws uniform intensities, > 0 draws a clamped Gaussian.
  double texture_sigma = 0.0;
};

Sequence make_synthetic(const SyntheticSpec& spec);

} // namespace inloop
