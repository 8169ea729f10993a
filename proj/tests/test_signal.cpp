#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "inloop/signal.hpp"
#include "support.hpp"

using namespace inloop;

TEST_CASE("plane geometry and edge replication")
{
  Plane p(4, 3, 10, 7);
  CHECK(p.size() == 12);
  CHECK(p.max_value() == 1023.0);
  p.at(0, 0) = 1;
  p.at(3, 2) = 9;
  CHECK(p.clamped(-5, -1) == 1);
  CHECK(p.clamped(10, 10) == 9);
  CHECK(p.row(2).size() == 4);
  CHECK_THROWS_AS(Plane(0, 3, 10), DomainError);
  CHECK_THROWS_AS(Plane(3, 3, 17), DomainError);
}

TEST_CASE("range validation rejects out-of-range samples")
{
  Plane p(2, 2, 8, 255);
  CHECK_NOTHROW(validate_range(p));
  p.at(1, 1) = 256;
  CHECK_THROWS_AS(validate_range(p), DomainError);
}

TEST_CASE("padding replicates the last row and column")
{
  Plane p(18, 5, 8);
  for (int y = 0; y < 5; y++)
    for (int x = 0; x < 18; x++)
      p.at(x, y) = static_cast<std::uint16_t>(x + 20 * y);
  const auto q = pad_to_multiple(p, 16);
  CHECK(q.width() == 32);
  CHECK(q.height() == 16);
  CHECK(q.at(31, 15) == p.at(17, 4));
  CHECK(q.at(5, 10) == p.at(5, 4));
  CHECK(q.at(20, 2) == p.at(17, 2));
  CHECK(pad_to_multiple(q, 16) == q);
}

TEST_CASE("raw 4:2:0 round trip at 8 and 10 bits")
{
  test::TempDir dir;
  for (int depth : {8, 10})
  {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::noise_texture;
    spec.bit_depth = depth;
    spec.width = 32;
    spec.height = 16;
    spec.frame_count = 3;
    const auto seq = make_synthetic(spec);
    const auto path = dir / ("clip" + std::to_string(depth) + ".yuv");
    save_yuv(path, seq);
    const std::size_t bps = depth > 8 ? 2 : 1;
    CHECK(std::filesystem::file_size(path) == 3 * (32 * 16 * 3 / 2) * bps);
    const auto back = load_yuv(path, 32, 16, depth);
    REQUIRE(back.frames.size() == 3);
    for (std::size_t i = 0; i < 3; i++)
      CHECK(back.frames[i] == seq.frames[i]);
  }
}

TEST_CASE("raw reader rejects truncated files and oversized samples")
{
  test::TempDir dir;
  {
    std::ofstream f(dir / "short.yuv", std::ios::binary);
    f << std::string(100, '\0');
  }
  CHECK_THROWS_AS(load_yuv(dir / "short.yuv", 16, 16, 8), IoError);
  CHECK_THROWS_AS(load_yuv(dir / "missing.yuv", 16, 16, 8), IoError);
  {
    std::ofstream f(dir / "hot.yuv", std::ios::binary);
    std::string frame(2 * 16 * 16 * 3 / 2, '\0');
    frame[0] = '\xff';
    frame[1] = '\x0f'; // 4095 in a 10-bit file
    f << frame;
  }
  CHECK_THROWS_AS(load_yuv(dir / "hot.yuv", 16, 16, 10), DomainError);
}

TEST_CASE("synthetic content is deterministic and respects its level range")
{
  for (auto kind : {SyntheticKind::ramp, SyntheticKind::moving_block, SyntheticKind::noise_texture})
  {
    SyntheticSpec spec;
    spec.kind = kind;
    spec.frame_count = 4;
    spec.noise_sigma = 12.0;
    const auto a = make_synthetic(spec);
    const auto b = make_synthetic(spec);
    CHECK(a.frames == b.frames);
    spec.seed = 99;
    const auto c = make_synthetic(spec);
    CHECK(a.frames != c.frames);
    for (const auto& f : a.frames)
    {
      const auto [mn, mx] = std::ranges::minmax_element(f.samples());
      CHECK(*mn >= 205);
      CHECK(*mx <= 716);
    }
  }
}

TEST_CASE("moving block scrolls by the configured motion")
{
  SyntheticSpec spec;
  spec.kind = SyntheticKind::moving_block;
  spec.motion_x = 3;
  spec.motion_y = -2;
  spec.frame_count = 2;
  const auto seq = make_synthetic(spec);
  // Interior of the window: frame1(x, y) == frame0(x - 3, y + 2).
  for (int y = 24; y < 40; y++)
    for (int x = 24; x < 40; x++)
      CHECK(seq.frames[1].at(x, y) == seq.frames[0].at(x - 3, y + 2));
}

TEST_CASE("synthetic kind names")
{
  CHECK(parse_synthetic_kind("moving-block") == SyntheticKind::moving_block);
  CHECK(to_string(SyntheticKind::noise_texture) == "noise-texture");
  CHECK_THROWS_AS(parse_synthetic_kind("checkerboard"), DomainError);
  SyntheticSpec spec;
  spec.width = 40;
  CHECK_THROWS_AS(make_synthetic(spec), DomainError);
}

TEST_CASE("sequence validation")
{
  Sequence s;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.frames.emplace_back(16, 16, 10);
  s.frames.emplace_back(16, 16, 8);
  CHECK_THROWS_AS(s.validate(), DomainError);
}
