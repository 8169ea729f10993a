#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "inloop/codec.hpp"
#include "inloop/signal.hpp"

namespace inloop {

/// Flat key = value settings. Later assignments win.
using ConfigMap = std::map<std::string, std::string>;

/// '#' starts a comment; `include = other.cfg` splices a file relative to
/// `base_dir` at that point.
ConfigMap parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
ConfigMap read_config_file(const std::filesystem::path& path);

struct RunConfig
{
  // Raw file path or synthetic:KIND.
  std::string input = "synthetic:moving-block";
  int width = 64;
  int height = 64;
  int bit_depth = 10;
  int frames = 40; // 0 reads every frame of a file
  std::vector<int> qps{18, 24, 30, 36, 42, 48, 51};
  ReshaperSetting reshaper;
  std::vector<int> granularities{100};
  std::optional<int> search_range; // per-sequence default when unset
  int gop_length = 20;
  std::filesystem::path output = "run";
  std::uint64_t seed = 1;

  // Synthetic content.
  double low_fraction = 0.2;
  double high_fraction = 0.7;
  int motion_x = 2;
  int motion_y = -1;
  double noise_sigma = 0.0;
  double texture_sigma = 0.0;

  void validate() const;
  bool is_synthetic() const;
  std::string sequence_name() const;
  int effective_search_range() const;

  CodecConfig codec_config() const;
  Sequence load_sequence() const;

  /// Canonical key = value text; parsing it back yields an equal config.
  std::string to_text() const;
};

/// Applies `map` on top of `base`; unknown keys are a ConfigError.
RunConfig apply_config(const ConfigMap& map, RunConfig base = {});

std::vector<int> parse_int_list(const std::string& text);

} // namespace inloop
