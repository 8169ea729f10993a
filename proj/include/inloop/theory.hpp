#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "inloop/reshaper.hpp"

namespace inloop {

/// Standard normal CDF.
double normal_cdf(double x);

/// Distortion reached at entropy H (bits/symbol) by an n-bit source: (1/12) 2^(-2(H - n)).
double hd_curve(double entropy, double bit_depth);

struct TheoryParams
{
  double n = 10.0;   // bit depth
  double q = 20.0;   // quantization step
  double k = 2.0;    // range expansion
  double m0 = 1.2;   // secant slope of the rate function from the origin
  double eta = 0.83; // slope ratio
  double h0 = 0.0;   // differential entropy of the normalized transformed residue, bits

  /// Throws DomainError unless q > 0, k >= 1, m0 > 1 and 0 < eta <= 1.
  void validate() const;
};

struct DistortionPair
{
  double base = 0.0;
  double reshaped = 0.0;
};

/// Distortion of a suboptimal coder at rate R without and with reshaping.
DistortionPair rd_curves(double rate, const TheoryParams& params);

/// Entropy increase from a one-piece expansion by k: log2(k).
double entropy_gain_one_piece(double k);

/// 0.5 log2(w1 k1^2 + w2 k2^2).
double entropy_gain_two_piece(double w1, double w2, double k1, double k2);

/// Probability mass over integer intensities lo..hi.
class InputPmf
{
public:
  static InputPmf uniform(int lo, int hi);
  /// weights[i] is the mass of lo + i; normalized internally.
  static InputPmf weighted(int lo, std::vector<double> weights);

  int lo() const { return m_lo; }
  int hi() const { return m_lo + static_cast<int>(m_probs.size()) - 1; }
  double probability(int x) const;
  const std::vector<double>& probabilities() const { return m_probs; }
  bool is_uniform() const { return m_uniform; }

  template <typename Rng>
  int sample(Rng& rng) const
  {
    if (m_uniform)
      return std::uniform_int_distribution<int>(lo(), hi())(rng);
    return m_lo + static_cast<int>(std::discrete_distribution<std::size_t>(m_probs.begin(), m_probs.end())(rng));
  }

private:
  int m_lo = 0;
  bool m_uniform = true;
  std::vector<double> m_probs;
};

/// Uniform over the integers of [aM, bM].
InputPmf support_pmf(double a, double b, double max_value);

/// P[g(I) + e < 0] for e ~ N(0, q^2/12).
double clipping_probability(const OnePieceReshaper& reshaper, double q, const InputPmf& pmf);
/// P[g(I) + e > M]; equals the lower probability when a = 1 - b.
double upper_clipping_probability(const OnePieceReshaper& reshaper, double q, const InputPmf& pmf);

/// Three-event reconstruction error: clip-low and clip-high terms plus the
/// interior term (q/k)^2/12 weighted by its probability.
double approximated_recon_error(const OnePieceReshaper& reshaper, double q, const InputPmf& pmf);

/// |(q/k)^2/12 - E| / E for the three-event error E.
double approximation_relative_error(const OnePieceReshaper& reshaper, double q, const InputPmf& pmf);

struct ReconErrorStats
{
  std::uint64_t trials = 0;
  double theory = 0.0; // (q/k)^2/12
  // Literal simulation of E[(I_hat - I)^2].
  double empirical_mse = 0.0;
  double empirical_relative_error = 0.0;
  // Event frequencies and conditional errors of the three-event decomposition.
  double p_low = 0.0;
  double p_interior = 0.0;
  double p_high = 0.0;
  double low_error = 0.0;      // E[(I_hat - I)^2 | E1]
  double interior_error = 0.0; // E[(I_hat - I)^2 | E2]
  double high_error = 0.0;     // E[(I_hat - I)^2 | E3]
  // Three-event estimate with the interior term at (q/k)^2/12.
  double three_event_error = 0.0;
  double relative_error = 0.0; // |theory - three_event| / three_event
};

/// Monte-Carlo over I ~ pmf and e ~ N(0, q^2/12), deterministic in `seed`
/// for any worker count.
ReconErrorStats montecarlo_recon_error(double a, double b, double max_value, double q, const InputPmf& pmf,
                                       std::uint64_t trials, std::uint64_t seed, int workers = 0);

struct TwoPieceStats
{
  std::uint64_t trials = 0;
  double mse = 0.0;
  double crosstalk_12 = 0.0; // g(I) < pivot < g(I) + e
  double crosstalk_21 = 0.0; // g(I) + e < pivot < g(I)
  double p_low = 0.0;
  double p_high = 0.0;
};

/// Draws e = z q / sqrt(12) from a fixed stream of z, so runs at different q
/// with the same seed share their random numbers.
TwoPieceStats montecarlo_two_piece(const TwoPieceReshaper& reshaper, double q, const InputPmf& pmf,
                                   std::uint64_t trials, std::uint64_t seed, int workers = 0);

/// Histogram differential entropy in bits with Freedman-Diaconis bins.
double differential_entropy(std::span<const double> samples);

struct EntropyShift
{
  double h0 = 0.0;
  double h1 = 0.0;
  double shift = 0.0;
};

/// Entropies of X and kX; needs at least 10^4 samples.
EntropyShift differential_entropy_shift(std::span<const double> samples, double k);

struct GainTableRow
{
  double eta = 0.0;
  std::optional<double> k; // empty means any slope
  double gain = 0.0;
  double printed = 0.0;
};

/// Rows of predicted PSNR gain for representative (eta, k) pairs.
std::vector<GainTableRow> theoretical_gain_table();

struct PrecisionRow
{
  int qp = 0;
  double step = 0.0;
  double printed_low = 0.0; // percent
  double printed_high = 0.0;
  double closed_low = 0.0; // closed-form three-event error, percent
  double closed_high = 0.0;
  double mc_low = 0.0; // Monte-Carlo three-event error, percent
  double mc_high = 0.0;
  double literal_low = 0.0; // literal simulation, percent
  double literal_high = 0.0;
};

struct PrecisionSweep
{
  double max_value = 1023.0;
  int a_first = 100;
  int a_last = 280;
  int a_step = 20;
  std::uint64_t trials = 10'000'000;
  std::uint64_t seed = 2024;
};

/// Relative error of (q/k)^2/12 over a symmetric support sweep
/// a = j/M, b = 1 - a, at every canonical quantizer.
std::vector<PrecisionRow> reconstruction_precision_table(const PrecisionSweep& sweep, int workers = 0);

struct HistogramBin
{
  double center = 0.0;
  std::uint64_t count = 0;
  double gaussian = 0.0; // expected count under N(0, q^2/12)
};

/// Pixel-domain residue of uniform coefficient rounding errors after the
/// inverse 4x4 transform.
std::vector<HistogramBin> transformed_residue_histogram(double q, std::uint64_t blocks, std::uint64_t seed,
                                                        int bins = 41);

/// Deterministic per-chunk seed.
std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk);

} // namespace inloop
