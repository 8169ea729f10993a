#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "inloop/codec.hpp"
#include "inloop/entropy.hpp"

using namespace inloop;

namespace {

Sequence texture(int frames, double low, double high, std::uint64_t seed = 1)
{
  SyntheticSpec spec;
  spec.kind = SyntheticKind::noise_texture;
  spec.frame_count = frames;
  spec.low_fraction = low;
  spec.high_fraction = high;
  spec.seed = seed;
  return make_synthetic(spec);
}

CodecConfig single_qp(int qp, int granularity = 100)
{
  CodecConfig cfg;
  cfg.ladder = {quantizer_for_qp(qp)};
  cfg.granularities = {granularity};
  return cfg;
}

double mean_mse(const std::vector<FrameResult>& frames)
{
  double s = 0.0;
  for (const auto& f : frames)
    s += f.mse;
  return s / static_cast<double>(frames.size());
}

} // namespace

TEST_CASE("subsequence structure is I followed by nineteen P frames")
{
  SyntheticSpec spec;
  spec.kind = SyntheticKind::moving_block;
  spec.frame_count = 40;
  spec.width = 32;
  spec.height = 32;
  const auto seq = make_synthetic(spec);
  const auto cfg = single_qp(36);
  const auto frames = encode_sequence(seq, cfg, cfg.ladder.front());
  REQUIRE(frames.size() == 40);
  for (int i = 0; i < 40; i++)
  {
    CHECK(frames[i].frame_index == i);
    CHECK(frames[i].subsequence == i / 20);
    CHECK(frames[i].type == (i % 20 == 0 ? FrameType::I : FrameType::P));
  }
  CHECK(subsequence_count(seq, cfg) == 2);
}

TEST_CASE("reconstruction error follows (q/k)^2/12")
{
  const auto seq = texture(6, 0.25, 0.75);
  const auto cfg = single_qp(30); // q = 20
  const auto reshaped = encode_sequence(seq, cfg, cfg.ladder.front(), true);
  const auto base = encode_sequence(seq, cfg, cfg.ladder.front(), false);
  const double k = reshaped.front().k_used;
  CHECK(k == doctest::Approx(2.0).epsilon(0.01));
  for (const auto& f : reshaped)
    CHECK(f.mse == doctest::Approx(400.0 / 12.0 / (k * k)).epsilon(0.10));
  for (const auto& f : base)
  {
    CHECK(f.k_used == 1.0);
    CHECK(f.mse == doctest::Approx(400.0 / 12.0).epsilon(0.10));
  }
  CHECK(mean_mse(base) / mean_mse(reshaped) == doctest::Approx(k * k).epsilon(0.15));
}

TEST_CASE("entropy rises by about log2 k")
{
  // Support fractions chosen so the support-derived slope is 1.95.
  const auto seq = texture(6, 0.24, 0.7528);
  const auto cfg = single_qp(36);
  const auto reshaped = encode_sequence(seq, cfg, cfg.ladder.front(), true);
  const auto base = encode_sequence(seq, cfg, cfg.ladder.front(), false);
  const double k = reshaped.front().k_used;
  CHECK(k == doctest::Approx(1.95).epsilon(0.005));
  for (std::size_t i = 0; i < base.size(); i++)
    CHECK(reshaped[i].entropy - base[i].entropy == doctest::Approx(std::log2(k)).epsilon(0.15 / 0.96));
}

TEST_CASE("fine quantization of a static scene approaches lossless")
{
  Sequence seq;
  for (int i = 0; i < 3; i++)
    seq.frames.push_back(texture(1, 0.2, 0.7).frames.front());
  double previous = 1e300;
  for (int qp : {30, 18, 6, 0})
  {
    const auto cfg = single_qp(qp);
    const auto frames = encode_sequence(seq, cfg, cfg.ladder.front(), false);
    const double mse = mean_mse(frames);
    CHECK(mse < previous);
    previous = mse;
  }
  CHECK(previous < 0.05);
}

TEST_CASE("standalone decoding reproduces the encoder's references exactly")
{
  SyntheticSpec spec;
  spec.kind = SyntheticKind::moving_block;
  spec.frame_count = 8;
  spec.noise_sigma = 20.0;
  const auto seq = make_synthetic(spec);
  CodecConfig cfg = single_qp(36);

  for (auto mode : {ReshaperMode::identity, ReshaperMode::one_piece, ReshaperMode::two_piece})
  {
    ReshaperSetting setting;
    setting.mode = mode;
    const auto resolved = resolve_reshaper(seq.frames, setting);
    RealPlane enc_ref;
    RealPlane dec_ref;
    for (std::size_t i = 0; i < seq.frames.size(); i++)
    {
      const auto coded =
        encode_frame(seq.frames[i], i == 0 ? nullptr : &enc_ref, resolved.reshaper, cfg.ladder.front(), cfg);
      const auto decoded = decode_frame(coded.indices, coded.motion, i == 0 ? nullptr : &dec_ref, resolved.reshaper,
                                        cfg.ladder.front().step, coded.reconstruction.width(),
                                        coded.reconstruction.height(), seq.bit_depth());
      REQUIRE(decoded == coded.reconstruction);
      enc_ref = coded.reconstruction;
      dec_ref = decoded;
      for (double v : coded.reconstruction.samples())
      {
        CHECK(v >= 0.0);
        CHECK(v <= 1023.0);
      }
    }
  }
}

TEST_CASE("odd geometry is padded and scored on the visible area")
{
  Plane p(40, 24, 10, 500);
  for (int y = 0; y < 24; y++)
    for (int x = 0; x < 40; x++)
      p.at(x, y) = static_cast<std::uint16_t>(300 + 5 * x + 3 * y);
  const auto cfg = single_qp(30);
  const Reshaper id = OnePieceReshaper::identity(1023.0);
  const auto coded = encode_frame(p, nullptr, id, cfg.ladder.front(), cfg);
  CHECK(coded.reconstruction.width() == 48);
  CHECK(coded.reconstruction.height() == 32);
  CHECK(coded.result.pixel_count == 40 * 24);
  CHECK(coded.result.symbol_count == 48 * 32);
  double sse = 0.0;
  for (int y = 0; y < 24; y++)
    for (int x = 0; x < 40; x++)
      sse += std::pow(coded.reconstruction.at(x, y) - p.at(x, y), 2);
  CHECK(coded.result.mse == doctest::Approx(sse / (40 * 24)));
  CHECK(coded.result.psnr == doctest::Approx(10 * std::log10(1023.0 * 1023.0 / coded.result.mse)));
  CHECK(coded.result.entropy == doctest::Approx(measure_entropy(coded.indices)));

  RealPlane wrong(32, 32, 10);
  CHECK_THROWS_AS(encode_frame(p, &wrong, id, cfg.ladder.front(), cfg), DomainError);
}

TEST_CASE("rates are reported per configured granularity")
{
  const auto seq = texture(2, 0.25, 0.75);
  CodecConfig cfg = single_qp(36);
  cfg.granularities = {1, 10, 100, 1000};
  const auto frames = encode_sequence(seq, cfg, cfg.ladder.front());
  for (const auto& f : frames)
  {
    REQUIRE(f.rates.size() == 4);
    CHECK(f.granularity == std::vector<int>{1, 10, 100, 1000});
    CHECK(f.rates[0] >= f.entropy - 1e-9);
    CHECK(f.rates[1] >= f.rates[0] - 0.01);
    CHECK(f.rates[2] >= f.rates[1] - 0.01);
    CHECK(f.rates[3] >= f.rates[2] - 0.01);
  }
}

TEST_CASE("two-piece resolution reports the effective slope")
{
  const auto seq = texture(2, 0.2, 0.7);
  ReshaperSetting s;
  s.mode = ReshaperMode::two_piece;
  const auto r = resolve_reshaper(seq.frames, s);
  REQUIRE(r.reshaper.is_two_piece());
  const auto* two = r.reshaper.two_piece();
  const double w1 = lower_segment_weight(seq.frames, *two);
  CHECK(w1 == doctest::Approx(0.5).epsilon(0.05));
  CHECK(r.k == doctest::Approx(std::sqrt(w1 * two->k1() * two->k1() + (1 - w1) * two->k2() * two->k2())));
  CHECK(two->k1() == doctest::Approx(1.25 * two->k2() / 0.75).epsilon(0.02));

  s.first_slope_factor = 2.5;
  CHECK_THROWS_AS(resolve_reshaper(seq.frames, s), ConfigError);
}

TEST_CASE("explicit support overrides estimation")
{
  const auto seq = texture(2, 0.3, 0.6);
  ReshaperSetting s;
  s.a = 0.25;
  s.b = 0.75;
  const auto r = resolve_reshaper(seq.frames, s);
  CHECK(r.k == doctest::Approx(2.0));
  ReshaperSetting id;
  id.mode = ReshaperMode::identity;
  CHECK(resolve_reshaper(seq.frames, id).k == 1.0);
}

TEST_CASE("experiments are ordered and independent of the worker count")
{
  SyntheticSpec spec;
  spec.kind = SyntheticKind::ramp;
  spec.frame_count = 24;
  spec.width = 32;
  spec.height = 32;
  spec.noise_sigma = 30.0;
  const auto seq = make_synthetic(spec);
  CodecConfig cfg;
  cfg.ladder = {quantizer_for_qp(30), quantizer_for_qp(42)};

  setenv("INLOOP_WORKERS", "1", 1);
  const auto serial = run_experiment(seq, cfg);
  setenv("INLOOP_WORKERS", "3", 1);
  const auto threaded = run_experiment(seq, cfg);
  unsetenv("INLOOP_WORKERS");

  REQUIRE(serial.frames.size() == 2 * 2 * 24);
  REQUIRE(threaded.frames.size() == serial.frames.size());
  CHECK(serial.reshapers.size() == 2);
  for (std::size_t i = 0; i < serial.frames.size(); i++)
  {
    const auto& a = serial.frames[i];
    const auto& b = threaded.frames[i];
    CHECK(a.mse == b.mse);
    CHECK(a.rates == b.rates);
    CHECK(a.reshaped == (i >= 48));
    CHECK(a.qp == (i % 48 < 24 ? 30 : 42));
  }
}

TEST_CASE("codec configuration checks")
{
  CodecConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.mid_index() == 3);
  cfg.ladder = {quantizer_for_qp(36), quantizer_for_qp(30)};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.ladder.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.granularities = {0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.search_range = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.gop_length = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(psnr_from_mse(0.0, 1023.0) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(parse_reshaper_mode("three-piece"), ConfigError);
  CHECK(to_string(parse_reshaper_mode("two-piece")) == "two-piece");
}
