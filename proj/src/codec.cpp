#include "inloop/codec.hpp"

#include <cmath>
#include <limits>

#include "inloop/entropy.hpp"
#include "inloop/parallel.hpp"

namespace inloop {

namespace {

constexpr int kBlock = 4;

RealPlane forward_plane(const RealPlane& plane, const Reshaper& reshaper)
{
  RealPlane out(plane.width(), plane.height(), plane.bit_depth());
  auto src = plane.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < src.size(); i++)
    dst[i] = reshaper.forward(src[i]);
  return out;
}

// Reshaped-domain prediction: g(motion-compensated reference), or mid-level for I frames.
RealPlane reshaped_prediction(const RealPlane* reference, const MotionField& motion, const Reshaper& reshaper,
                              int width, int height, int bit_depth)
{
  if (reference == nullptr)
    return RealPlane(width, height, bit_depth, reshaper.max_value() / 2.0);
  return forward_plane(compensate(*reference, motion), reshaper);
}

Block4 load_block(const RealPlane& plane, int bx, int by)
{
  Block4 b{};
  for (int y = 0; y < kBlock; y++)
    for (int x = 0; x < kBlock; x++)
      b[static_cast<std::size_t>(y * kBlock + x)] = plane.at(bx + x, by + y);
  return b;
}

RealPlane reconstruct(std::span<const std::int32_t> indices, const RealPlane& prediction, const Reshaper& reshaper,
                      double step)
{
  const int w = prediction.width();
  const int h = prediction.height();
  if (indices.size() != prediction.size())
    throw DomainError("index count does not match frame geometry");
  RealPlane recon(w, h, prediction.bit_depth());
  std::size_t pos = 0;
  for (int by = 0; by < h; by += kBlock)
  {
    for (int bx = 0; bx < w; bx += kBlock)
    {
      Block4 coeffs{};
      for (auto& c : coeffs)
        c = step * static_cast<double>(indices[pos++]);
      const Block4 residual = dct4_inverse(coeffs);
      for (int y = 0; y < kBlock; y++)
        for (int x = 0; x < kBlock; x++)
          recon.at(bx + x, by + y) =
            reshaper.backward(residual[static_cast<std::size_t>(y * kBlock + x)] + prediction.at(bx + x, by + y));
    }
  }
  return recon;
}

} // namespace

std::string_view to_string(FrameType type) { return type == FrameType::I ? "I" : "P"; }

ReshaperMode parse_reshaper_mode(std::string_view name)
{
  if (name == "identity")
    return ReshaperMode::identity;
  if (name == "one-piece")
    return ReshaperMode::one_piece;
  if (name == "two-piece")
    return ReshaperMode::two_piece;
  throw ConfigError("unknown reshaper mode: " + std::string(name));
}

std::string_view to_string(ReshaperMode mode)
{
  switch (mode)
  {
  case ReshaperMode::identity:
    return "identity";
  case ReshaperMode::one_piece:
    return "one-piece";
  case ReshaperMode::two_piece:
    return "two-piece";
  }
  return "identity";
}

void CodecConfig::validate() const
{
  if (ladder.empty())
    throw ConfigError("QP ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); i++)
  {
    if (!(ladder[i].step > 0.0))
      throw ConfigError("quantization steps must be positive");
    if (i > 0 && !(ladder[i].step > ladder[i - 1].step))
      throw ConfigError("QP ladder must be strictly increasing in step");
  }
  if (granularities.empty())
    throw ConfigError("at least one entropy granularity is required");
  for (int g : granularities)
    if (g < 1)
      throw ConfigError("entropy granularity must be at least 1");
  if (search_range < 0)
    throw ConfigError("search range must be nonnegative");
  if (gop_length < 1)
    throw ConfigError("GOP length must be positive");
  if (reshaper.margin < 0.0 || reshaper.margin >= 0.5)
    throw ConfigError("reshaper margin must be in [0, 0.5)");
  if (!(reshaper.split > 0.0 && reshaper.split < 1.0))
    throw ConfigError("two-piece split must be in (0, 1)");
  if (!(reshaper.first_slope_factor > 0.0))
    throw ConfigError("two-piece slope factor must be positive");
  auto frac_ok = [](const std::optional<double>& v) { return !v || (*v >= 0.0 && *v <= 1.0); };
  if (!frac_ok(reshaper.a) || !frac_ok(reshaper.b))
    throw ConfigError("reshaper support fractions must be in [0, 1]");
}

double psnr_from_mse(double mse, double max_value)
{
  if (mse < 0.0)
    throw DomainError("negative MSE");
  if (mse == 0.0)
    return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / mse);
}

ResolvedReshaper resolve_reshaper(std::span<const Plane> frames, const ReshaperSetting& setting)
{
  if (frames.empty())
    throw DomainError("cannot resolve a reshaper without frames");
  const double maxv = frames.front().max_value();
  if (setting.mode == ReshaperMode::identity)
    return {OnePieceReshaper::identity(maxv), 1.0, false};

  double a = 0.0;
  double b = 1.0;
  if (setting.a && setting.b)
  {
    a = *setting.a;
    b = *setting.b;
  }
  else
  {
    const auto est = estimate_params(frames, setting.margin);
    if (est.degraded_to_identity && !setting.a && !setting.b)
      return {OnePieceReshaper::identity(maxv), 1.0, true};
    a = setting.a.value_or(est.reshaper.a());
    b = setting.b.value_or(est.reshaper.b());
  }
  if (!(a < b))
    throw ConfigError("reshaper support is empty");
  if (1.0 / (b - a) <= 1.0 + 1e-12)
    return {OnePieceReshaper::identity(maxv), 1.0, true};

  if (setting.mode == ReshaperMode::one_piece)
  {
    OnePieceReshaper r(a, b, maxv);
    return {r, r.slope(), false};
  }

  const double alpha2 = a + setting.split * (b - a);
  const double k1 = setting.first_slope_factor / (b - a);
  if (k1 * (alpha2 - a) >= 1.0)
    throw ConfigError("two-piece first segment exhausts the code range");
  const auto r = TwoPieceReshaper::from_first_slope(a, alpha2, b, k1, maxv);
  const double w1 = lower_segment_weight(frames, r);
  const double k = std::sqrt(w1 * r.k1() * r.k1() + (1.0 - w1) * r.k2() * r.k2());
  return {r, k, false};
}

FrameCoding encode_frame(const Plane& current, const RealPlane* reference, const Reshaper& reshaper,
                         const QuantizerSpec& quantizer, const CodecConfig& cfg)
{
  const Plane padded = pad_to_multiple(current, kMacroblockSize);
  const RealPlane cur = to_real(padded);
  const int w = cur.width();
  const int h = cur.height();
  if (reference != nullptr && !reference->same_geometry(cur))
    throw DomainError("reference frame geometry does not match the current frame");

  FrameCoding out;
  out.motion = reference != nullptr ? full_search(cur, *reference, cfg.search_range) : MotionField::zero(w, h);
  const RealPlane pred = reshaped_prediction(reference, out.motion, reshaper, w, h, cur.bit_depth());
  const RealPlane target = forward_plane(cur, reshaper);

  out.indices.reserve(cur.size());
  for (int by = 0; by < h; by += kBlock)
  {
    for (int bx = 0; bx < w; bx += kBlock)
    {
      Block4 r = load_block(target, bx, by);
      const Block4 p = load_block(pred, bx, by);
      for (std::size_t i = 0; i < r.size(); i++)
        r[i] -= p[i];
      for (double c : dct4_forward(r))
        out.indices.push_back(codeword_index(c, quantizer.step));
    }
  }
  out.reconstruction = reconstruct(out.indices, pred, reshaper, quantizer.step);

  auto& res = out.result;
  res.type = reference != nullptr ? FrameType::P : FrameType::I;
  res.qp = quantizer.qp;
  res.step = quantizer.step;
  double sse = 0.0;
  for (int y = 0; y < current.height(); y++)
  {
    for (int x = 0; x < current.width(); x++)
    {
      const double d = out.reconstruction.at(x, y) - static_cast<double>(current.at(x, y));
      sse += d * d;
    }
  }
  res.pixel_count = current.size();
  res.symbol_count = out.indices.size();
  res.mse = sse / static_cast<double>(res.pixel_count);
  res.psnr = psnr_from_mse(res.mse, current.max_value());
  res.entropy = measure_entropy(out.indices);
  for (int g : cfg.granularities)
  {
    const auto model = SymbolModel::build(out.indices, g, quantizer.step);
    res.rates.push_back(static_cast<double>(encode(out.indices, model).bit_count) /
                        static_cast<double>(res.symbol_count));
    res.granularity.push_back(g);
    res.model_granularity.push_back(model.granularity());
  }
  return out;
}

RealPlane decode_frame(std::span<const std::int32_t> indices, const MotionField& motion, const RealPlane* reference,
                       const Reshaper& reshaper, double step, int padded_width, int padded_height, int bit_depth)
{
  if (reference != nullptr && (reference->width() != padded_width || reference->height() != padded_height))
    throw DomainError("reference frame geometry does not match the coded frame");
  const RealPlane pred = reshaped_prediction(reference, motion, reshaper, padded_width, padded_height, bit_depth);
  return reconstruct(indices, pred, reshaper, step);
}

int subsequence_count(const Sequence& seq, const CodecConfig& cfg)
{
  const int n = static_cast<int>(seq.frames.size());
  return (n + cfg.gop_length - 1) / cfg.gop_length;
}

SubsequenceCoding encode_subsequence(const Sequence& seq, int subsequence, const ResolvedReshaper& reshaper,
                                     const QuantizerSpec& quantizer, const CodecConfig& cfg, bool reshaped)
{
  const int first = subsequence * cfg.gop_length;
  const int last = std::min<int>(first + cfg.gop_length, static_cast<int>(seq.frames.size()));
  if (first < 0 || first >= last)
    throw DomainError("subsequence index out of range");

  SubsequenceCoding out{{}, reshaper};
  RealPlane reference;
  for (int i = first; i < last; i++)
  {
    auto coded = encode_frame(seq.frames[static_cast<std::size_t>(i)], i == first ? nullptr : &reference,
                              reshaper.reshaper, quantizer, cfg);
    coded.result.frame_index = i;
    coded.result.subsequence = subsequence;
    coded.result.reshaped = reshaped;
    coded.result.k_used = reshaper.k;
    out.frames.push_back(std::move(coded.result));
    reference = std::move(coded.reconstruction);
  }
  return out;
}

namespace {

std::span<const Plane> subsequence_frames(const Sequence& seq, int subsequence, const CodecConfig& cfg)
{
  const auto first = static_cast<std::size_t>(subsequence) * static_cast<std::size_t>(cfg.gop_length);
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(cfg.gop_length), seq.frames.size() - first);
  return std::span<const Plane>(seq.frames).subspan(first, count);
}

} // namespace

std::vector<FrameResult> encode_sequence(const Sequence& seq, const CodecConfig& cfg, const QuantizerSpec& quantizer,
                                         bool reshaped)
{
  seq.validate();
  cfg.validate();
  ReshaperSetting identity;
  identity.mode = ReshaperMode::identity;
  std::vector<FrameResult> out;
  for (int s = 0; s < subsequence_count(seq, cfg); s++)
  {
    const auto resolved = resolve_reshaper(subsequence_frames(seq, s, cfg), reshaped ? cfg.reshaper : identity);
    auto coded = encode_subsequence(seq, s, resolved, quantizer, cfg, reshaped);
    for (auto& f : coded.frames)
      out.push_back(std::move(f));
  }
  return out;
}

ExperimentResult run_experiment(const Sequence& seq, const CodecConfig& cfg)
{
  seq.validate();
  cfg.validate();
  const int subs = subsequence_count(seq, cfg);
  const std::size_t qps = cfg.ladder.size();

  ExperimentResult out;
  ReshaperSetting identity;
  identity.mode = ReshaperMode::identity;
  std::vector<ResolvedReshaper> base;
  for (int s = 0; s < subs; s++)
  {
    const auto frames = subsequence_frames(seq, s, cfg);
    base.push_back(resolve_reshaper(frames, identity));
    out.reshapers.push_back(resolve_reshaper(frames, cfg.reshaper));
  }

  const std::size_t jobs = 2 * qps * static_cast<std::size_t>(subs);
  std::vector<std::vector<FrameResult>> slots(jobs);
  parallel_for(jobs, [&](std::size_t job) {
    const auto s = static_cast<int>(job % static_cast<std::size_t>(subs));
    const auto q = (job / static_cast<std::size_t>(subs)) % qps;
    const bool reshaped = job / (static_cast<std::size_t>(subs) * qps) == 1;
    const auto& resolved = reshaped ? out.reshapers[static_cast<std::size_t>(s)] : base[static_cast<std::size_t>(s)];
    slots[job] = encode_subsequence(seq, s, resolved, cfg.ladder[q], cfg, reshaped).frames;
  });
  for (auto& slot : slots)
    for (auto& f : slot)
      out.frames.push_back(std::move(f));
  return out;
}

} // namespace inloop
