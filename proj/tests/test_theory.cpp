#include <doctest.h>

#include <cmath>
#include <random>

#include "inloop/entropy.hpp"
#include "inloop/rd_analysis.hpp"
#include "inloop/theory.hpp"
#include "inloop/transform.hpp"

using namespace inloop;

namespace {

constexpr double kM = 1023.0;

std::vector<double> gaussian_samples(std::size_t n, std::uint64_t seed, double sigma = 1.0)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> v(n);
  for (auto& x : v)
    x = g(rng);
  return v;
}

std::vector<std::int32_t> quantized(const std::vector<double>& v, double q)
{
  std::vector<std::int32_t> out;
  for (double x : v)
    out.push_back(codeword_index(x, q));
  return out;
}

} // namespace

TEST_CASE("entropy-distortion curve")
{
  CHECK(hd_curve(10.0, 10.0) == doctest::Approx(1.0 / 12.0));
  CHECK(hd_curve(11.0, 10.0) == doctest::Approx(1.0 / 48.0));
  // Base and reshaped operating points share the curve.
  const double q = 20.0;
  const double k = 2.0;
  const double h0 = 10.0 - std::log2(q);
  CHECK(hd_curve(h0, 10.0) == doctest::Approx(q * q / 12.0));
  CHECK(hd_curve(h0 + std::log2(k), 10.0) == doctest::Approx((q / k) * (q / k) / 12.0));
}

TEST_CASE("closed-form R-D pair")
{
  TheoryParams p;
  p.eta = 1.0;
  p.k = 1.7;
  for (double r = 1.0; r < 12.0; r += 1.3)
  {
    const auto d = rd_curves(r, p);
    CHECK(d.base == d.reshaped);
    // Optimal slope relation R = m0 H with h0 = 0 recovers the H-D curve.
    CHECK(d.base == doctest::Approx(hd_curve(r / p.m0, p.n)));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; i++)
  {
    p.m0 = 1.01 + 2 * u(rng);
    p.eta = 0.05 + 0.95 * u(rng);
    p.k = 1.0 + 3 * u(rng);
    p.h0 = 4 * u(rng) - 2;
    for (double r : {1.3, 4.4, 8.8})
    {
      const auto d = rd_curves(r, p);
      CHECK(10 * std::log10(d.base / d.reshaped) == doctest::Approx(predict_gain(p.eta, p.k)).epsilon(1e-9));
    }
  }
  p.m0 = 1.0;
  CHECK_THROWS_AS(rd_curves(1.0, p), DomainError);
}

TEST_CASE("entropy gains of one- and two-piece reshaping")
{
  CHECK(entropy_gain_one_piece(1.0) == 0.0);
  CHECK(entropy_gain_one_piece(2.0) == 1.0);
  CHECK(entropy_gain_one_piece(1.95) == doctest::Approx(0.9635).epsilon(1e-3));
  CHECK_THROWS_AS(entropy_gain_one_piece(0.5), DomainError);

  CHECK(entropy_gain_two_piece(0.5, 0.5, 1.0, 3.0) == doctest::Approx(0.5 * std::log2(5.0)));
  for (double w = 0.0; w <= 1.0; w += 0.125)
    for (double k : {1.0, 1.3, 2.0, 3.7})
      CHECK(entropy_gain_two_piece(w, 1.0 - w, k, k) == entropy_gain_one_piece(k));
  CHECK(entropy_gain_two_piece(1.0, 0.0, 2.5, 0.7) == std::log2(2.5));
  CHECK_THROWS_AS(entropy_gain_two_piece(0.6, 0.6, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(entropy_gain_two_piece(0.5, 0.5, 0.0, 2.0), DomainError);
}

TEST_CASE("clipping probability and approximated error match an independent evaluation")
{
  // Frozen from a separate scipy evaluation over x in {100..923}.
  const double a = 100.0 / kM;
  const OnePieceReshaper g(a, 1.0 - a, kM);
  const auto pmf = support_pmf(a, 1.0 - a, kM);
  CHECK(pmf.lo() == 100);
  CHECK(pmf.hi() == 923);
  CHECK(clipping_probability(g, 80.0, pmf) == doctest::Approx(0.0093006785311).epsilon(1e-9));
  CHECK(upper_clipping_probability(g, 80.0, pmf) == doctest::Approx(clipping_probability(g, 80.0, pmf)));

  const double a2 = 200.0 / kM;
  const OnePieceReshaper g2(a2, 1.0 - a2, kM);
  CHECK(approximated_recon_error(g2, 40.0, support_pmf(a2, 1.0 - a2, kM)) ==
        doctest::Approx(49.2611038448).epsilon(1e-9));

  CHECK(clipping_probability(g, 224.0, pmf) > clipping_probability(g, 20.0, pmf));
  // Samples at aM and bM clip half the time for any q; half their mass is the floor.
  CHECK(clipping_probability(g, 1e-3, pmf) == doctest::Approx(0.5 / 824.0));
  const auto open = InputPmf::uniform(101, 922);
  CHECK(clipping_probability(g, 1e-3, open) < 1e-12);
  CHECK(approximation_relative_error(g, 1e-3, open) < 1e-12);
}

TEST_CASE("closed-form precision rows over the support sweep")
{
  // Min/max of |(q/k)^2/12 - E| / E over a = j/1023, j = 100, 120, ..., 280 (percent), frozen.
  const double expected[7][2] = {{0.105861, 0.175406}, {0.139384, 0.194781}, {0.212797, 0.263809},
                                 {0.362697, 0.411755}, {0.665183, 0.713291}, {1.276329, 1.323961},
                                 {1.770731, 1.818221}};
  const auto ladder = canonical_ladder();
  for (std::size_t qi = 0; qi < 7; qi++)
  {
    double lo = 1e9;
    double hi = -1e9;
    for (int j = 100; j <= 280; j += 20)
    {
      const double a = j / kM;
      const OnePieceReshaper g(a, 1.0 - a, kM);
      const double r = 100.0 * approximation_relative_error(g, ladder[qi].step, support_pmf(a, 1.0 - a, kM));
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(lo == doctest::Approx(expected[qi][0]).epsilon(1e-5));
    CHECK(hi == doctest::Approx(expected[qi][1]).epsilon(1e-5));
  }
}

TEST_CASE("Monte-Carlo reconstruction error")
{
  const double a = 150.0 / kM;
  const auto pmf = support_pmf(a, 1.0 - a, kM);
  const OnePieceReshaper g(a, 1.0 - a, kM);
  const double q = 80.0;
  const std::uint64_t n = 2'000'000;
  const auto mc = montecarlo_recon_error(a, 1.0 - a, kM, q, pmf, n, 42);

  CHECK(mc.theory == doctest::Approx(std::pow(q / g.slope(), 2) / 12.0));
  CHECK(mc.p_low + mc.p_interior + mc.p_high == doctest::Approx(1.0));
  // Event frequency within three binomial standard errors.
  const double p1 = clipping_probability(g, q, pmf);
  CHECK(std::abs(mc.p_low - p1) < 3.0 * std::sqrt(p1 * (1 - p1) / n));
  CHECK(std::abs(mc.p_high - p1) < 3.0 * std::sqrt(p1 * (1 - p1) / n));
  // Decomposition adds back up to the literal error.
  CHECK(mc.p_low * mc.low_error + mc.p_interior * mc.interior_error + mc.p_high * mc.high_error ==
        doctest::Approx(mc.empirical_mse).epsilon(1e-9));
  // Three-event estimate agrees with its closed form.
  CHECK(mc.three_event_error == doctest::Approx(approximated_recon_error(g, q, pmf)).epsilon(2e-3));
  CHECK(100 * std::abs(mc.relative_error - approximation_relative_error(g, q, pmf)) < 0.03);

  const auto fine = montecarlo_recon_error(a, 1.0 - a, kM, 0.01, InputPmf::uniform(151, 872), 200'000, 1);
  CHECK(fine.relative_error < 1e-6);
  CHECK(fine.empirical_relative_error < 0.01);

  CHECK_THROWS_AS(montecarlo_recon_error(0.0, 0.5, kM, q, pmf, 10, 1), DomainError);
  CHECK_THROWS_AS(montecarlo_recon_error(0.1, 0.9, kM, q, pmf, 0, 1), DomainError);
}

TEST_CASE("Monte-Carlo results do not depend on the worker count")
{
  const double a = 0.2;
  const auto pmf = support_pmf(a, 0.8, kM);
  const auto one = montecarlo_recon_error(a, 0.8, kM, 40.0, pmf, 3'500'000, 9, 1);
  const auto three = montecarlo_recon_error(a, 0.8, kM, 40.0, pmf, 3'500'000, 9, 3);
  CHECK(one.empirical_mse == three.empirical_mse);
  CHECK(one.p_low == three.p_low);
  const auto other = montecarlo_recon_error(a, 0.8, kM, 40.0, pmf, 3'500'000, 10, 1);
  CHECK(other.empirical_mse != one.empirical_mse);
}

TEST_CASE("two-piece Monte-Carlo")
{
  const auto pmf = support_pmf(0.2, 0.7, kM);
  // Equal slopes: the one-piece simulation with the same random numbers.
  const auto same = TwoPieceReshaper::from_first_slope(0.2, 0.45, 0.7, 2.0, kM);
  const auto s = montecarlo_two_piece(same, 40.0, pmf, 1'000'000, 5);
  const auto one = montecarlo_recon_error(0.2, 0.7, kM, 40.0, pmf, 1'000'000, 6);
  CHECK(s.mse == doctest::Approx(one.empirical_mse).epsilon(0.01));

  const auto r = TwoPieceReshaper::from_first_slope(0.2, 0.45, 0.7, 2.5, kM);
  double prev12 = -1.0;
  double prev21 = -1.0;
  for (const auto& quant : canonical_ladder())
  {
    const auto t = montecarlo_two_piece(r, quant.step, pmf, 300'000, 8);
    CHECK(t.crosstalk_12 >= prev12);
    CHECK(t.crosstalk_21 >= prev21);
    prev12 = t.crosstalk_12;
    prev21 = t.crosstalk_21;
  }
  CHECK(prev12 > 0.0);
}

TEST_CASE("transformed residue looks Gaussian")
{
  const auto hist = transformed_residue_histogram(20.0, 200'000, 3);
  double total = 0.0;
  double dev = 0.0;
  for (const auto& b : hist)
  {
    total += static_cast<double>(b.count);
    dev += std::abs(static_cast<double>(b.count) - b.gaussian);
  }
  CHECK(total > 0.99 * 200'000 * 16);
  // Total variation distance to N(0, q^2/12) stays small.
  CHECK(0.5 * dev / total < 0.02);
}

TEST_CASE("differential entropy shift")
{
  const auto x = gaussian_samples(100'000, 1);
  const auto s2 = differential_entropy_shift(x, 2.0);
  CHECK(s2.shift == doctest::Approx(1.0).epsilon(0.05));
  CHECK(s2.h0 == doctest::Approx(0.5 * std::log2(2 * M_PI * M_E)).epsilon(0.02));
  const auto s1 = differential_entropy_shift(x, 1.0);
  CHECK(std::abs(s1.shift) < 0.02);

  // Discrete link: H(X_q) ~ h(X) - log2 q once q is fine.
  const double q = 1.0 / 8.0;
  std::vector<double> kx(x);
  for (auto& v : kx)
    v *= 2.0;
  const double dh = measure_entropy(quantized(kx, q)) - measure_entropy(quantized(x, q));
  CHECK(std::abs(dh - s2.shift) < 0.1);
  CHECK(measure_entropy(quantized(x, q)) == doctest::Approx(s2.h0 - std::log2(q)).epsilon(0.01));

  CHECK_THROWS_AS(differential_entropy_shift(gaussian_samples(100, 2), 2.0), DomainError);
  CHECK_THROWS_AS(differential_entropy(std::vector<double>(500, 1.0)), DomainError);
}

TEST_CASE("gain table rows")
{
  const auto rows = theoretical_gain_table();
  REQUIRE(rows.size() == 5);
  for (const auto& r : rows)
    CHECK(std::abs(r.gain - r.printed) <= 0.005);
  CHECK_FALSE(rows.back().k.has_value());
  CHECK(rows.back().gain == 0.0);
}

TEST_CASE("input distributions")
{
  const auto u = InputPmf::uniform(3, 6);
  CHECK(u.probability(4) == 0.25);
  CHECK(u.probability(7) == 0.0);
  const auto w = InputPmf::weighted(10, {1.0, 3.0});
  CHECK(w.probability(11) == 0.75);
  std::mt19937_64 rng(1);
  int ones = 0;
  for (int i = 0; i < 10000; i++)
    ones += w.sample(rng) == 11;
  CHECK(ones == doctest::Approx(7500).epsilon(0.03));
  CHECK_THROWS_AS(InputPmf::uniform(5, 4), DomainError);
  CHECK_THROWS_AS(InputPmf::weighted(0, {0.0, 0.0}), DomainError);
}
