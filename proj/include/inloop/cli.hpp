#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inloop/codec.hpp"
#include "inloop/config.hpp"
#include "inloop/csv.hpp"
#include "inloop/rd_analysis.hpp"

namespace inloop {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config = 2;
inline constexpr int io = 3;
inline constexpr int analysis = 4;
} // namespace exit_code

CsvTable frames_table(const ExperimentResult& experiment);
CsvTable summary_table(const ExperimentResult& experiment, std::size_t slot);
CsvTable reshaper_table(const ExperimentResult& experiment);
CsvTable gains_table(std::span<const GainReport> reports);
CsvTable gain_summary_table(std::span<const GainReport> reports);

/// Frame results stored in a frames.csv, slots ordered as `granularities`.
std::vector<FrameResult> read_frames(const std::filesystem::path& path, const std::vector<int>& granularities);

struct EncodeOutputs
{
  ExperimentResult experiment;
  std::vector<std::filesystem::path> files;
};

/// Codes the configured input in both modes and writes run.cfg, frames.csv,
/// reshaper.csv and summary_g{g}.csv into the output directory.
EncodeOutputs cmd_encode(const RunConfig& cfg);

/// Writes gains_g{g}.csv and gain_summary_g{g}.csv next to an encode run.
std::vector<std::filesystem::path> cmd_analyze(const std::filesystem::path& run_dir);

struct OracleRequest
{
  std::string which; // table1 | table3 | appendixB | appendixC
  std::uint64_t seed = 2024;
  // table3
  std::uint64_t trials = 10'000'000;
  int a_step = 20;
  // appendixB
  std::uint64_t samples = 100'000;
  double k = 2.0;
  // appendixC
  double alpha1 = 0.2;
  double alpha2 = 0.45;
  double alpha3 = 0.7;
  double k1 = 2.5;
  std::optional<double> w1; // from the uniform input when unset
  std::uint64_t crosstalk_trials = 1'000'000;
  std::optional<std::filesystem::path> histogram;
};

CsvTable cmd_oracle(const OracleRequest& request);

/// Parses arguments, dispatches and maps failures to exit codes.
int run_cli(int argc, const char* const* argv);

} // namespace inloop
