#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "inloop/motion.hpp"
#include "inloop/reshaper.hpp"
#include "inloop/signal.hpp"
#include "inloop/transform.hpp"

namespace inloop {

enum class FrameType
{
  I,
  P,
};

std::string_view to_string(FrameType type);

enum class ReshaperMode
{
  identity,
  one_piece,
  two_piece,
};

ReshaperMode parse_reshaper_mode(std::string_view name);
std::string_view to_string(ReshaperMode mode);

/// How the reshaped run chooses its mapping for each subsequence.
struct ReshaperSetting
{
  ReshaperMode mode = ReshaperMode::one_piece;
  // Fixed support fractions; estimated from each subsequence when unset.
  std::optional<double> a;
  std::optional<double> b;
  double margin = 0.0;
  // Two-piece: breakpoint position inside [a, b] and first slope relative to 1/(b - a).
  double split = 0.5;
  double first_slope_factor = 1.25;
};

struct CodecConfig
{
  std::vector<QuantizerSpec> ladder = canonical_ladder();
  ReshaperSetting reshaper;
  std::vector<int> granularities{100};
  int search_range = 8;
  int gop_length = 20;

  /// Throws ConfigError on an empty or non-increasing ladder, bad granularity,
  /// negative search range or nonpositive GOP length.
  void validate() const;

  /// Index of the mid-ladder quantizer used for gain evaluation.
  std::size_t mid_index() const { return ladder.size() / 2; }
};

struct FrameResult
{
  int frame_index = 0;
  int subsequence = 0;
  FrameType type = FrameType::I;
  bool reshaped = false;
  int qp = 0;
  double step = 0.0;
  double mse = 0.0;
  double psnr = 0.0;
  // Bits/symbol over the quantized coefficients of the frame.
  double entropy = 0.0;
  std::vector<int> granularity;       // as configured
  std::vector<double> rates;          // one per configured granularity
  std::vector<int> model_granularity; // after the 1000 -> 500 fallback
  double k_used = 1.0;
  std::size_t symbol_count = 0;
  std::size_t pixel_count = 0;
};

/// Reshaper in effect for one subsequence with its effective slope.
struct ResolvedReshaper
{
  Reshaper reshaper;
  double k = 1.0;
  bool degraded_to_identity = false;
};

ResolvedReshaper resolve_reshaper(std::span<const Plane> frames, const ReshaperSetting& setting);

struct FrameCoding
{
  RealPlane reconstruction; // padded to whole macroblocks
  FrameResult result;
  std::vector<std::int32_t> indices;
  MotionField motion;
};

/// Codes one frame. `reference` is the previous padded reconstruction for P
/// frames and null for I frames.
FrameCoding encode_frame(const Plane& current, const RealPlane* reference, const Reshaper& reshaper,
                         const QuantizerSpec& quantizer, const CodecConfig& cfg);

/// Rebuilds the reconstruction from the coded indices and motion field alone.
RealPlane decode_frame(std::span<const std::int32_t> indices, const MotionField& motion, const RealPlane* reference,
                       const Reshaper& reshaper, double step, int padded_width, int padded_height, int bit_depth);

struct SubsequenceCoding
{
  std::vector<FrameResult> frames;
  ResolvedReshaper reshaper;
};

/// Codes frames[first, first + count) as I followed by P frames.
SubsequenceCoding encode_subsequence(const Sequence& seq, int subsequence, const ResolvedReshaper& reshaper,
                                     const QuantizerSpec& quantizer, const CodecConfig& cfg, bool reshaped);

int subsequence_count(const Sequence& seq, const CodecConfig& cfg);

/// Subsequence-wise coding with a reshaper estimated per subsequence from
/// the original frames (identity when `reshaped` is false).
std::vector<FrameResult> encode_sequence(const Sequence& seq, const CodecConfig& cfg, const QuantizerSpec& quantizer,
                                         bool reshaped = true);

struct ExperimentResult
{
  // Ordered by mode (base first), ladder position, subsequence, frame.
  std::vector<FrameResult> frames;
  std::vector<ResolvedReshaper> reshapers; // one per subsequence
};

/// Base and reshaped runs over the whole ladder; jobs run in parallel and
/// are merged in a fixed order.
ExperimentResult run_experiment(const Sequence& seq, const CodecConfig& cfg);

double psnr_from_mse(double mse, double max_value);

} // namespace inloop
