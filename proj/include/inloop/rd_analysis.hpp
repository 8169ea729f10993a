#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "inloop/codec.hpp"
#include "inloop/error.hpp"

namespace inloop {

struct RDPoint
{
  double rate = 0.0;
  double psnr = 0.0;
};

/// Piecewise-linear PSNR over rate; queries outside the sampled rate range throw.
class RDCurve
{
public:
  /// Needs at least two points with distinct rates.
  explicit RDCurve(std::vector<RDPoint> points);

  double psnr_at(double rate) const;
  double min_rate() const { return m_points.front().rate; }
  double max_rate() const { return m_points.back().rate; }
  const std::vector<RDPoint>& points() const { return m_points; }

private:
  std::vector<RDPoint> m_points;
};

/// PSNR(reshaped) - PSNR(base) at `eval_rate`.
double measure_gain(const RDCurve& base, const RDCurve& reshaped, double eval_rate);

struct RatePoint
{
  double entropy = 0.0;
  double rate = 0.0;
  int qp = 0;
  bool reshaped = false;
};

/// Coded rate as a piecewise-linear function of entropy over pooled samples.
class RateEntropyCurve
{
public:
  explicit RateEntropyCurve(std::vector<RatePoint> points);

  double rate_at(double entropy) const;
  /// Entropy on the first segment (in entropy order) whose rate span contains `rate`.
  double entropy_at(double rate) const;
  const std::vector<RatePoint>& points() const { return m_points; }

private:
  std::vector<RatePoint> m_points;
};

struct EtaEstimate
{
  double eta = 1.0;
  double raw_eta = 1.0;
  bool clamped = false;
  double h0 = 0.0;
  double h1 = 0.0;
  double r0 = 0.0;
  double r1 = 0.0;
};

/// Reads H0 at r0, shifts it by log2(k), reads R1 back and forms
/// eta = (R1/R0 - 1) * H0 / log2(k), clamped into (0, 1].
EtaEstimate estimate_eta(const RateEntropyCurve& curve, double r0, double k);

/// Smallest eta a clamped estimate can take.
inline constexpr double kMinEta = 1e-6;

/// 20 (1 - eta) log10(k) dB.
double predict_gain(double eta, double k);

/// Throws AnalysisError on mismatched lengths, empty input or a zero vector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct FrameGain
{
  int frame_index = 0;
  double measured = 0.0;
  double predicted = 0.0;
  double eval_rate = 0.0;           // bits/symbol
  double eval_rate_per_pixel = 0.0; // bits/pixel of the visible frame
  EtaEstimate eta;
  bool eta_defined = true; // false when the reshaper is the identity
};

struct GainReport
{
  int subsequence = 0;
  int granularity = 0;
  double k_hat = 1.0;
  std::vector<FrameGain> frames; // P frames only
  std::optional<double> cosine;  // undefined when either vector is all zero
  double measured_mean = 0.0;
  double measured_std = 0.0;
  double predicted_mean = 0.0;
  double predicted_std = 0.0;
  double eval_rate_mean = 0.0;
  double eval_rate_per_pixel_mean = 0.0;
  std::size_t clamped_count = 0;
  std::size_t fallback_count = 0; // reshaped P frames coded at the fallback granularity
};

/// Gain reports for every subsequence of an experiment, using the coded
/// rates of granularity slot `slot`.
std::vector<GainReport> analyze_experiment(std::span<const FrameResult> frames, std::size_t slot);

struct GainSummary
{
  int granularity = 0;
  std::size_t subsequences = 0;
  double k_hat = 1.0;
  double eval_rate = 0.0;
  double eval_rate_per_pixel = 0.0;
  double measured_mean = 0.0;
  double measured_std = 0.0;
  double predicted_mean = 0.0;
  double predicted_std = 0.0;
  std::optional<double> cosine; // mean over subsequences where defined
};

GainSummary summarize(std::span<const GainReport> reports);

double mean_of(std::span<const double> v);
/// Sample standard deviation; 0 for fewer than two values.
double stddev_of(std::span<const double> v);

} // namespace inloop
