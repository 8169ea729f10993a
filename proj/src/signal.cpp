#include "inloop/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace inloop {

RealPlane to_real(const Plane& plane)
{
  RealPlane out(plane.width(), plane.height(), plane.bit_depth());
  std::ranges::copy(plane.samples(), out.samples().begin());
  return out;
}

void validate_range(const Plane& plane)
{
  const auto limit = static_cast<std::uint32_t>(max_code_value(plane.bit_depth()));
  for (auto v : plane.samples())
  {
    if (v > limit)
      throw DomainError("sample value " + std::to_string(v) + " exceeds " + std::to_string(limit) +
                        " for " + std::to_string(plane.bit_depth()) + "-bit content");
  }
}

Plane pad_to_multiple(const Plane& plane, int block)
{
  const int w = (plane.width() + block - 1) / block * block;
  const int h = (plane.height() + block - 1) / block * block;
  if (w == plane.width() && h == plane.height())
    return plane;
  Plane out(w, h, plane.bit_depth());
  for (int y = 0; y < h; y++)
    for (int x = 0; x < w; x++)
      out.at(x, y) = plane.clamped(x, y);
  return out;
}

int Sequence::width() const { return frames.empty() ? 0 : frames.front().width(); }
int Sequence::height() const { return frames.empty() ? 0 : frames.front().height(); }
int Sequence::bit_depth() const { return frames.empty() ? 0 : frames.front().bit_depth(); }

void Sequence::validate() const
{
  if (frames.empty())
    throw DomainError("sequence has no frames");
  for (const auto& f : frames)
  {
    if (!f.same_geometry(frames.front()))
      throw DomainError("sequence frames differ in geometry or bit depth");
  }
}

namespace {

int bytes_per_sample(int bit_depth) { return bit_depth > 8 ? 2 : 1; }

void check_geometry(int width, int height, int bit_depth)
{
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0)
    throw DomainError("4:2:0 geometry must be positive and even");
  if (bit_depth < 8 || bit_depth > 16)
    throw DomainError("raw YUV bit depth must be in [8, 16]");
}

} // namespace

Sequence load_yuv(const std::filesystem::path& path, int width, int height, int bit_depth)
{
  check_geometry(width, height, bit_depth);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());

  const std::size_t bps = bytes_per_sample(bit_depth);
  const std::size_t luma = static_cast<std::size_t>(width) * height;
  const std::size_t chroma = 2 * (luma / 4);
  const std::size_t frame_bytes = (luma + chroma) * bps;

  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  if (ec)
    throw IoError("cannot stat " + path.string());
  if (file_size == 0 || file_size % frame_bytes != 0)
    throw IoError("file size " + std::to_string(file_size) + " is not a multiple of the " +
                      std::to_string(width) + "x" + std::to_string(height) + " frame size " +
                      std::to_string(frame_bytes));

  Sequence seq;
  seq.name = path.stem().string();
  std::vector<unsigned char> buf(luma * bps);
  const auto frame_count = file_size / frame_bytes;
  for (std::size_t f = 0; f < frame_count; f++)
  {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    in.ignore(static_cast<std::streamsize>(chroma * bps));
    if (!in)
      throw IoError("short read in " + path.string());
    Plane plane(width, height, bit_depth);
    auto s = plane.samples();
    for (std::size_t i = 0; i < luma; i++)
      s[i] = bps == 1 ? buf[i] : static_cast<std::uint16_t>(buf[2 * i] | (buf[2 * i + 1] << 8));
    validate_range(plane);
    seq.frames.push_back(std::move(plane));
  }
  return seq;
}

void save_yuv(const std::filesystem::path& path, const Sequence& sequence)
{
  sequence.validate();
  check_geometry(sequence.width(), sequence.height(), sequence.bit_depth());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot create " + path.string());

  const int bps = bytes_per_sample(sequence.bit_depth());
  const std::size_t chroma = 2 * (static_cast<std::size_t>(sequence.width()) * sequence.height() / 4);
  const auto mid = static_cast<std::uint16_t>(1u << (sequence.bit_depth() - 1));

  std::vector<unsigned char> buf;
  auto put = [&](std::uint16_t v) {
    buf.push_back(static_cast<unsigned char>(v & 0xff));
    if (bps == 2)
      buf.push_back(static_cast<unsigned char>(v >> 8));
  };
  for (const auto& frame : sequence.frames)
  {
    validate_range(frame);
    buf.clear();
    for (auto v : frame.samples())
      put(v);
    for (std::size_t i = 0; i < chroma; i++)
      put(mid);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!out)
    throw IoError("write failed for " + path.string());
}

SyntheticKind parse_synthetic_kind(std::string_view name)
{
  if (name == "ramp")
    return SyntheticKind::ramp;
  if (name == "moving-block")
    return SyntheticKind::moving_block;
  if (name == "noise-texture")
    return SyntheticKind::noise_texture;
  throw DomainError("unknown synthetic kind '" + std::string(name) + "'");
}

std::string_view to_string(SyntheticKind kind)
{
  switch (kind)
  {
  case SyntheticKind::ramp: return "ramp";
  case SyntheticKind::moving_block: return "moving-block";
  case SyntheticKind::noise_texture: return "noise-texture";
  }
  return "unknown";
}

namespace {

int wrap(int v, int n) { return ((v % n) + n) % n; }

// Triangle wave with period 1, range [0, 1].
double triangle(double u)
{
  const double f = u - std::floor(u);
  return 1.0 - std::abs(2.0 * f - 1.0);
}

} // namespace

Sequence make_synthetic(const SyntheticSpec& spec)
{
  if (spec.width <= 0 || spec.height <= 0 || spec.width % kMacroblockSize || spec.height % kMacroblockSize)
    throw DomainError("synthetic geometry must be a positive multiple of 16");
  if (spec.frame_count < 1)
    throw DomainError("synthetic sequence needs at least one frame");
  if (!(spec.low_fraction >= 0.0 && spec.low_fraction < spec.high_fraction && spec.high_fraction <= 1.0))
    throw DomainError("synthetic intensity fractions must satisfy 0 <= low < high <= 1");

  const int maxv = max_code_value(spec.bit_depth);
  const int lo = static_cast<int>(std::lround(spec.low_fraction * maxv));
  const int hi = static_cast<int>(std::lround(spec.high_fraction * maxv));
  const int w = spec.width;
  const int h = spec.height;

  std::seed_seq seq_seed{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                         static_cast<std::uint32_t>(spec.kind)};
  std::mt19937_64 rng(seq_seed);

  auto clamp_level = [&](double v) {
    return static_cast<std::uint16_t>(std::clamp(static_cast<int>(std::lround(v)), lo, hi));
  };

  // Periodic texture tile for the moving-block window.
  std::vector<int> tile;
  if (spec.kind == SyntheticKind::moving_block)
  {
    std::uniform_int_distribution<int> level(lo, hi);
    tile.resize(static_cast<std::size_t>(w) * h);
    for (auto& t : tile)
      t = level(rng);
  }

  Sequence out;
  out.name = std::string(to_string(spec.kind));
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0 ? spec.noise_sigma : 1.0);
  const double span = hi - lo;

  for (int t = 0; t < spec.frame_count; t++)
  {
    Plane frame(w, h, spec.bit_depth);
    for (int y = 0; y < h; y++)
    {
      for (int x = 0; x < w; x++)
      {
        double v = 0.0;
        switch (spec.kind)
        {
        case SyntheticKind::ramp: {
          const double u = static_cast<double>((x - t * spec.motion_x) + (y - t * spec.motion_y)) / w;
          v = lo + span * triangle(u);
          break;
        }
        case SyntheticKind::moving_block: {
          const bool inside = x >= w / 4 && x < 3 * w / 4 && y >= h / 4 && y < 3 * h / 4;
          if (inside)
          {
            const int sx = wrap(x - t * spec.motion_x, w);
            const int sy = wrap(y - t * spec.motion_y, h);
            v = tile[static_cast<std::size_t>(sy) * w + sx];
          }
          else
          {
            v = lo + span * (0.5 + 0.25 * std::sin(2.0 * std::numbers::pi * 2.0 * x / w) +
                             0.25 * std::cos(2.0 * std::numbers::pi * 3.0 * y / h));
          }
          break;
        }
        case SyntheticKind::noise_texture: {
          if (spec.texture_sigma > 0)
          {
            std::normal_distribution<double> g(0.5 * (lo + hi), spec.texture_sigma);
            v = g(rng);
          }
          else
          {
            std::uniform_int_distribution<int> level(lo, hi);
            v = level(rng);
          }
          break;
        }
        }
        if (spec.noise_sigma > 0 && spec.kind != SyntheticKind::noise_texture)
          v += noise(rng);
        frame.at(x, y) = clamp_level(v);
      }
    }
    out.frames.push_back(std::move(frame));
  }
  return out;
}

} // namespace inloop
