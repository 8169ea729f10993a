#include "inloop/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "inloop/error.hpp"
#include "inloop/parallel.hpp"
#include "inloop/rd_analysis.hpp"
#include "inloop/transform.hpp"

namespace inloop {

namespace {

constexpr std::uint64_t kChunkTrials = 1ull << 20;

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t chunk_count(std::uint64_t trials) { return (trials + kChunkTrials - 1) / kChunkTrials; }

std::uint64_t chunk_trials(std::uint64_t trials, std::uint64_t chunk)
{
  return std::min(kChunkTrials, trials - chunk * kChunkTrials);
}

void require_trials(std::uint64_t trials)
{
  if (trials == 0)
    throw DomainError("Monte-Carlo needs at least one trial");
}

double noise_sigma(double q) { return q / std::sqrt(12.0); }

} // namespace

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk)
{
  return splitmix64(splitmix64(seed) ^ (chunk * 0xd1b54a32d192ed03ull));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double hd_curve(double entropy, double bit_depth) { return std::exp2(-2.0 * (entropy - bit_depth)) / 12.0; }

void TheoryParams::validate() const
{
  if (!(q > 0.0))
    throw DomainError("q must be positive");
  if (!(k >= 1.0))
    throw DomainError("k must be at least 1");
  if (!(m0 > 1.0))
    throw DomainError("m0 must exceed 1");
  if (!(eta > 0.0 && eta <= 1.0))
    throw DomainError("eta must be in (0, 1]");
}

DistortionPair rd_curves(double rate, const TheoryParams& params)
{
  params.validate();
  DistortionPair d;
  d.base = std::exp2(-2.0 * (rate / params.m0 - (params.n + params.h0))) / 12.0;
  d.reshaped = d.base * std::pow(params.k, 2.0 * (params.eta - 1.0));
  return d;
}

double entropy_gain_one_piece(double k)
{
  if (!(k >= 1.0))
    throw DomainError("range compression (k < 1) is not supported");
  return std::log2(k);
}

double entropy_gain_two_piece(double w1, double w2, double k1, double k2)
{
  if (w1 < 0.0 || w2 < 0.0 || std::abs(w1 + w2 - 1.0) > 1e-12)
    throw DomainError("segment weights must be nonnegative and sum to 1");
  if (!(k1 > 0.0 && k2 > 0.0))
    throw DomainError("segment slopes must be positive");
  if (w2 == 0.0)
    return std::log2(k1);
  if (w1 == 0.0)
    return std::log2(k2);
  if (k1 == k2)
    return std::log2(k1);
  return 0.5 * std::log2(w1 * k1 * k1 + w2 * k2 * k2);
}

// ---------------------------------------------------------------------------
// Input distributions
// ---------------------------------------------------------------------------

InputPmf InputPmf::uniform(int lo, int hi)
{
  if (hi < lo)
    throw DomainError("empty input support");
  InputPmf pmf;
  pmf.m_lo = lo;
  pmf.m_uniform = true;
  pmf.m_probs.assign(static_cast<std::size_t>(hi - lo + 1), 1.0 / static_cast<double>(hi - lo + 1));
  return pmf;
}

InputPmf InputPmf::weighted(int lo, std::vector<double> weights)
{
  double total = 0.0;
  for (double w : weights)
  {
    if (!(w >= 0.0))
      throw DomainError("input weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0))
    throw DomainError("input weights must have positive mass");
  InputPmf pmf;
  pmf.m_lo = lo;
  pmf.m_uniform = false;
  for (auto& w : weights)
    w /= total;
  pmf.m_probs = std::move(weights);
  return pmf;
}

double InputPmf::probability(int x) const
{
  if (x < lo() || x > hi())
    return 0.0;
  return m_probs[static_cast<std::size_t>(x - m_lo)];
}

InputPmf support_pmf(double a, double b, double max_value)
{
  const int lo = static_cast<int>(std::ceil(a * max_value - 1e-9));
  const int hi = static_cast<int>(std::floor(b * max_value + 1e-9));
  return InputPmf::uniform(lo, hi);
}

// ---------------------------------------------------------------------------
// Clipping events
// ---------------------------------------------------------------------------

double clipping_probability(const OnePieceReshaper& reshaper, double q, const InputPmf& pmf)
{
  if (!(q > 0.0))
    throw DomainError("q must be positive");
  const double s = noise_sigma(q);
  double p = 0.0;
  for (int x = pmf.lo(); x <= pmf.hi(); x++)
    p += normal_cdf(-reshaper.forward(x) / s) * pmf.probability(x);
  return p;
}

double upper_clipping_probability(const OnePieceReshaper& reshaper, double q, const InputPmf& pmf)
{
  if (!(q > 0.0))
    throw DomainError("q must be positive");
  const double s = noise_sigma(q);
  double p = 0.0;
  for (int x = pmf.lo(); x <= pmf.hi(); x++)
    p += normal_cdf(-(reshaper.max_value() - reshaper.forward(x)) / s) * pmf.probability(x);
  return p;
}

double approximated_recon_error(const OnePieceReshaper& reshaper, double q, const InputPmf& pmf)
{
  if (!(q > 0.0))
    throw DomainError("q must be positive");
  const double s = noise_sigma(q);
  const double theory = (q / reshaper.slope()) * (q / reshaper.slope()) / 12.0;
  double p1 = 0.0;
  double p3 = 0.0;
  double e1 = 0.0;
  double e3 = 0.0;
  for (int x = pmf.lo(); x <= pmf.hi(); x++)
  {
    const double px = pmf.probability(x);
    const double g = reshaper.forward(x);
    const double c1 = normal_cdf(-g / s) * px;
    const double c3 = normal_cdf(-(reshaper.max_value() - g) / s) * px;
    const double d1 = x - reshaper.lower_clip();
    const double d3 = reshaper.upper_clip() - x;
    p1 += c1;
    p3 += c3;
    e1 += d1 * d1 * c1;
    e3 += d3 * d3 * c3;
  }
  return theory * (1.0 - p1 - p3) + e1 + e3;
}

double approximation_relative_error(const OnePieceReshaper& reshaper, double q, const InputPmf& pmf)
{
  const double theory = (q / reshaper.slope()) * (q / reshaper.slope()) / 12.0;
  const double e = approximated_recon_error(reshaper, q, pmf);
  return std::abs(theory - e) / e;
}

// ---------------------------------------------------------------------------
// Monte-Carlo
// ---------------------------------------------------------------------------

ReconErrorStats montecarlo_recon_error(double a, double b, double max_value, double q, const InputPmf& pmf,
                                       std::uint64_t trials, std::uint64_t seed, int workers)
{
  if (!(a > 0.0 && a < b && b < 1.0))
    throw DomainError("Monte-Carlo needs 0 < a < b < 1");
  if (!(q > 0.0))
    throw DomainError("q must be positive");
  require_trials(trials);
  const OnePieceReshaper g(a, b, max_value);
  const double s = noise_sigma(q);

  struct Partial
  {
    std::uint64_t n1 = 0, n2 = 0, n3 = 0;
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  };
  const auto chunks = chunk_count(trials);
  std::vector<Partial> partial(chunks);
  parallel_for(
    chunks,
    [&](std::size_t c) {
      std::mt19937_64 rng(chunk_seed(seed, c));
      std::normal_distribution<double> noise(0.0, s);
      Partial p;
      const auto n = chunk_trials(trials, c);
      for (std::uint64_t t = 0; t < n; t++)
      {
        const int x = pmf.sample(rng);
        const double y = g.forward(x) + noise(rng);
        const double d = g.backward(y) - x;
        if (y <= 0.0)
        {
          p.n1++;
          p.s1 += d * d;
        }
        else if (y > max_value)
        {
          p.n3++;
          p.s3 += d * d;
        }
        else
        {
          p.n2++;
          p.s2 += d * d;
        }
      }
      partial[c] = p;
    },
    workers);

  Partial total;
  for (const auto& p : partial)
  {
    total.n1 += p.n1;
    total.n2 += p.n2;
    total.n3 += p.n3;
    total.s1 += p.s1;
    total.s2 += p.s2;
    total.s3 += p.s3;
  }
  const double n = static_cast<double>(trials);
  ReconErrorStats r;
  r.trials = trials;
  r.theory = (q / g.slope()) * (q / g.slope()) / 12.0;
  r.empirical_mse = (total.s1 + total.s2 + total.s3) / n;
  r.empirical_relative_error = std::abs(r.empirical_mse / r.theory - 1.0);
  r.p_low = static_cast<double>(total.n1) / n;
  r.p_interior = static_cast<double>(total.n2) / n;
  r.p_high = static_cast<double>(total.n3) / n;
  auto cond = [](double sum, std::uint64_t count) { return count == 0 ? 0.0 : sum / static_cast<double>(count); };
  r.low_error = cond(total.s1, total.n1);
  r.interior_error = cond(total.s2, total.n2);
  r.high_error = cond(total.s3, total.n3);
  r.three_event_error = (total.s1 + total.s3) / n + r.p_interior * r.theory;
  r.relative_error = std::abs(r.theory - r.three_event_error) / r.three_event_error;
  return r;
}

TwoPieceStats montecarlo_two_piece(const TwoPieceReshaper& reshaper, double q, const InputPmf& pmf,
                                   std::uint64_t trials, std::uint64_t seed, int workers)
{
  if (!(q > 0.0))
    throw DomainError("q must be positive");
  require_trials(trials);
  const double s = noise_sigma(q);
  const double pivot = reshaper.pivot();
  const double maxv = reshaper.max_value();

  struct Partial
  {
    std::uint64_t c12 = 0, c21 = 0, low = 0, high = 0;
    double sse = 0.0;
  };
  const auto chunks = chunk_count(trials);
  std::vector<Partial> partial(chunks);
  parallel_for(
    chunks,
    [&](std::size_t c) {
      std::mt19937_64 rng(chunk_seed(seed, c));
      std::normal_distribution<double> unit(0.0, 1.0);
      Partial p;
      const auto n = chunk_trials(trials, c);
      for (std::uint64_t t = 0; t < n; t++)
      {
        const int x = pmf.sample(rng);
        const double gx = reshaper.forward(x);
        const double y = gx + s * unit(rng);
        if (gx < pivot && pivot < y)
          p.c12++;
        if (y < pivot && pivot < gx)
          p.c21++;
        if (y <= 0.0)
          p.low++;
        if (y > maxv)
          p.high++;
        const double d = reshaper.backward(y) - x;
        p.sse += d * d;
      }
      partial[c] = p;
    },
    workers);

  Partial total;
  for (const auto& p : partial)
  {
    total.c12 += p.c12;
    total.c21 += p.c21;
    total.low += p.low;
    total.high += p.high;
    total.sse += p.sse;
  }
  const double n = static_cast<double>(trials);
  TwoPieceStats r;
  r.trials = trials;
  r.mse = total.sse / n;
  r.crosstalk_12 = static_cast<double>(total.c12) / n;
  r.crosstalk_21 = static_cast<double>(total.c21) / n;
  r.p_low = static_cast<double>(total.low) / n;
  r.p_high = static_cast<double>(total.high) / n;
  return r;
}

// ---------------------------------------------------------------------------
// Differential entropy
// ---------------------------------------------------------------------------

double differential_entropy(std::span<const double> samples)
{
  if (samples.size() < 2)
    throw DomainError("differential entropy needs at least two samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::ranges::sort(sorted);
  const auto n = sorted.size();
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(n - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < n ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac : sorted[i];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double span = sorted.back() - sorted.front();
  if (!(span > 0.0))
    throw DomainError("differential entropy of a constant sample is undefined");
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  if (!(width > 0.0))
    width = span / std::sqrt(static_cast<double>(n));

  const auto bins = static_cast<std::size_t>(std::floor(span / width)) + 1;
  std::vector<std::uint64_t> counts(bins, 0);
  for (double v : sorted)
    counts[std::min(bins - 1, static_cast<std::size_t>((v - sorted.front()) / width))]++;
  double h = 0.0;
  const double total = static_cast<double>(n);
  for (auto c : counts)
  {
    if (c == 0)
      continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p / width);
  }
  return h;
}

EntropyShift differential_entropy_shift(std::span<const double> samples, double k)
{
  if (samples.size() < 10'000)
    throw DomainError("differential entropy shift needs at least 10^4 samples");
  if (!(k > 0.0))
    throw DomainError("scale must be positive");
  std::vector<double> scaled(samples.begin(), samples.end());
  for (auto& v : scaled)
    v *= k;
  EntropyShift r;
  r.h0 = differential_entropy(samples);
  r.h1 = differential_entropy(scaled);
  r.shift = r.h1 - r.h0;
  return r;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

std::vector<GainTableRow> theoretical_gain_table()
{
  struct Entry
  {
    double eta;
    std::optional<double> k;
    double printed;
  };
  const Entry entries[] = {
    {0.95, 2.0, 0.30}, {0.98, 2.0, 0.12}, {0.95, 1.8, 0.26}, {0.98, 1.8, 0.10}, {1.0, std::nullopt, 0.0},
  };
  std::vector<GainTableRow> rows;
  for (const auto& e : entries)
    rows.push_back({e.eta, e.k, predict_gain(e.eta, e.k.value_or(2.0)), e.printed});
  return rows;
}

std::vector<PrecisionRow> reconstruction_precision_table(const PrecisionSweep& sweep, int workers)
{
  struct Printed
  {
    double lo, hi;
  };
  const Printed printed[] = {{0.11, 0.18}, {0.14, 0.19}, {0.21, 0.26}, {0.36, 0.41},
                             {0.67, 0.71}, {1.28, 1.32}, {1.77, 1.82}};
  if (sweep.a_step < 1 || sweep.a_first > sweep.a_last)
    throw DomainError("invalid support sweep");
  std::vector<int> js;
  for (int j = sweep.a_first; j < sweep.a_last; j += sweep.a_step)
    js.push_back(j);
  js.push_back(sweep.a_last);

  const auto ladder = canonical_ladder();
  std::vector<PrecisionRow> rows;
  for (std::size_t qi = 0; qi < ladder.size(); qi++)
  {
    const double q = ladder[qi].step;
    PrecisionRow row;
    row.qp = ladder[qi].qp;
    row.step = q;
    if (qi < std::size(printed))
    {
      row.printed_low = printed[qi].lo;
      row.printed_high = printed[qi].hi;
    }
    row.closed_low = row.mc_low = row.literal_low = std::numeric_limits<double>::infinity();
    row.closed_high = row.mc_high = row.literal_high = -std::numeric_limits<double>::infinity();
    for (int j : js)
    {
      const double a = j / sweep.max_value;
      const double b = 1.0 - a;
      const auto pmf = support_pmf(a, b, sweep.max_value);
      const OnePieceReshaper g(a, b, sweep.max_value);
      const double closed = 100.0 * approximation_relative_error(g, q, pmf);
      const auto mc = montecarlo_recon_error(a, b, sweep.max_value, q, pmf, sweep.trials,
                                             sweep.seed + static_cast<std::uint64_t>(j) * 131 + qi, workers);
      const double est = 100.0 * mc.relative_error;
      const double lit = 100.0 * mc.empirical_relative_error;
      row.closed_low = std::min(row.closed_low, closed);
      row.closed_high = std::max(row.closed_high, closed);
      row.mc_low = std::min(row.mc_low, est);
      row.mc_high = std::max(row.mc_high, est);
      row.literal_low = std::min(row.literal_low, lit);
      row.literal_high = std::max(row.literal_high, lit);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<HistogramBin> transformed_residue_histogram(double q, std::uint64_t blocks, std::uint64_t seed, int bins)
{
  if (!(q > 0.0) || blocks == 0 || bins < 3)
    throw DomainError("invalid residue histogram request");
  const double s = noise_sigma(q);
  const double lo = -4.0 * s;
  const double width = 8.0 * s / bins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; i++)
    out[static_cast<std::size_t>(i)].center = lo + (i + 0.5) * width;

  std::mt19937_64 rng(chunk_seed(seed, 0));
  std::uniform_real_distribution<double> residue(-0.5, 0.5);
  std::uint64_t total = 0;
  for (std::uint64_t n = 0; n < blocks; n++)
  {
    Block4 c{};
    for (auto& v : c)
      v = q * residue(rng);
    for (double v : dct4_inverse(c))
    {
      total++;
      const double pos = (v - lo) / width;
      if (pos >= 0.0 && pos < bins)
        out[static_cast<std::size_t>(pos)].count++;
    }
  }
  for (auto& bin : out)
  {
    const double p = normal_cdf((bin.center + width / 2) / s) - normal_cdf((bin.center - width / 2) / s);
    bin.gaussian = p * static_cast<double>(total);
  }
  return out;
}

} // namespace inloop
