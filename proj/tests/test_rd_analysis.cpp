#include <doctest.h>

#include <cmath>
#include <random>

#include "inloop/rd_analysis.hpp"
#include "inloop/theory.hpp"

using namespace inloop;

namespace {

RDCurve curve_from(std::vector<std::pair<double, double>> pts)
{
  std::vector<RDPoint> v;
  for (auto [r, p] : pts)
    v.push_back({r, p});
  return RDCurve(v);
}

// PSNR of a closed-form operating point at rate R, peak M.
double closed_psnr(double d, double m = 1023.0) { return 10.0 * std::log10(m * m / d); }

} // namespace

TEST_CASE("piecewise-linear R-D interpolation")
{
  const auto c = curve_from({{3.0, 40.0}, {1.0, 30.0}, {2.0, 36.0}});
  CHECK(c.min_rate() == 1.0);
  CHECK(c.max_rate() == 3.0);
  CHECK(c.psnr_at(1.0) == 30.0);
  CHECK(c.psnr_at(1.5) == doctest::Approx(33.0));
  CHECK(c.psnr_at(2.5) == doctest::Approx(38.0));
  CHECK_THROWS_AS(c.psnr_at(0.99), OutOfHullError);
  CHECK_THROWS_AS(c.psnr_at(3.01), OutOfHullError);
  CHECK_THROWS_AS(curve_from({{1.0, 30.0}, {1.0, 31.0}}), AnalysisError);
  CHECK_THROWS_AS(curve_from({{1.0, 30.0}}), AnalysisError);
}

TEST_CASE("measured gain basics")
{
  const auto base = curve_from({{1.0, 30.0}, {2.0, 35.0}, {4.0, 41.0}});
  const auto up = curve_from({{1.0, 30.7}, {2.0, 35.7}, {4.0, 41.7}});
  CHECK(measure_gain(base, base, 2.7) == 0.0);
  CHECK(measure_gain(base, up, 1.3) == doctest::Approx(0.7));
  CHECK(measure_gain(base, up, 3.9) == doctest::Approx(0.7));
  CHECK(measure_gain(up, base, 3.1) == doctest::Approx(-measure_gain(base, up, 3.1)));
  const auto narrow = curve_from({{2.0, 35.0}, {3.0, 38.0}});
  CHECK_THROWS_AS(measure_gain(base, narrow, 1.5), OutOfHullError);
}

TEST_CASE("gain on closed-form curves with m0 = 1.2, eta = 0.83, k = 1.5")
{
  TheoryParams p;
  p.m0 = 1.2;
  p.eta = 0.83;
  p.k = 1.5;
  p.n = 10;
  std::vector<RDPoint> base;
  std::vector<RDPoint> resh;
  for (double r = 1.0; r <= 10.0; r += 0.5)
  {
    const auto d = rd_curves(r, p);
    base.push_back({r, closed_psnr(d.base)});
    resh.push_back({r, closed_psnr(d.reshaped)});
  }
  const RDCurve b(base);
  const RDCurve s(resh);
  for (double r = 1.25; r < 10.0; r += 0.7)
    CHECK(measure_gain(b, s, r) == doctest::Approx(0.5990).epsilon(1e-3));
  CHECK(predict_gain(0.83, 1.5) == doctest::Approx(20 * 0.17 * std::log10(1.5)));
}

TEST_CASE("slope ratio from the pooled R-H curve")
{
  const RateEntropyCurve curve({{3.0, 3.9, 0, false}, {4.0, 5.0, 1, false}, {5.0, 6.0, 2, true}, {6.0, 7.1, 3, true}});
  const auto e = estimate_eta(curve, 5.0, 2.0);
  CHECK(e.h0 == doctest::Approx(4.0));
  CHECK(e.h1 == doctest::Approx(5.0));
  CHECK(e.r1 == doctest::Approx(6.0));
  CHECK(e.eta == doctest::Approx(0.8));
  CHECK_FALSE(e.clamped);

  // Rate equal to entropy: optimal coder.
  std::vector<RatePoint> ideal;
  for (double h = 1.0; h <= 8.0; h += 1.0)
    ideal.push_back({h, h, 0, false});
  CHECK(estimate_eta(RateEntropyCurve(ideal), 3.3, 1.7).eta == doctest::Approx(1.0));

  // Scaling the rate axis leaves eta unchanged.
  std::vector<RatePoint> scaled;
  for (const auto& pt : curve.points())
    scaled.push_back({pt.entropy, 3.0 * pt.rate, 0, false});
  CHECK(estimate_eta(RateEntropyCurve(scaled), 15.0, 2.0).eta == doctest::Approx(0.8));

  CHECK_THROWS_AS(estimate_eta(curve, 6.5, 2.0), OutOfHullError);
  CHECK_THROWS_AS(estimate_eta(curve, 5.0, 1.0), DomainError);
}

TEST_CASE("eta outside (0, 1] is clamped and flagged")
{
  // Rate climbs steeply above the operating point.
  const RateEntropyCurve steep({{3.0, 4.0, 0, false}, {4.0, 5.0, 0, false}, {5.0, 8.0, 0, false}});
  const auto e = estimate_eta(steep, 4.5, 2.0);
  CHECK(e.clamped);
  CHECK(e.eta == 1.0);
  CHECK(e.raw_eta > 1.0);
  const RateEntropyCurve down({{3.0, 4.0, 0, false}, {4.0, 5.0, 0, false}, {5.0, 4.9, 0, false}});
  const auto d = estimate_eta(down, 4.95, 2.0);
  CHECK(d.clamped);
  CHECK(d.eta == kMinEta);
}

TEST_CASE("predicted gain")
{
  CHECK(predict_gain(0.95, 2.0) == doctest::Approx(0.30103).epsilon(1e-4));
  CHECK(predict_gain(0.98, 1.8) == doctest::Approx(0.10211).epsilon(1e-4));
  CHECK(predict_gain(1.0, 7.0) == 0.0);
  CHECK_THROWS_AS(predict_gain(0.0, 2.0), DomainError);
  CHECK_THROWS_AS(predict_gain(1.1, 2.0), DomainError);
  CHECK_THROWS_AS(predict_gain(0.9, 0.9), DomainError);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 500; i++)
  {
    const double eta = u(rng);
    const double k = 1.0 + 3.0 * u(rng);
    CHECK(predict_gain(eta, k + 0.1) > predict_gain(eta, k));
    CHECK(predict_gain(eta + 0.005, k) < predict_gain(eta, k));
  }
}

TEST_CASE("cosine similarity")
{
  const std::vector<double> u{1.0, 2.0, -0.5};
  const std::vector<double> v{2.0, 4.0, -1.0};
  CHECK(cosine_similarity(u, u) == doctest::Approx(1.0));
  CHECK(cosine_similarity(u, v) == doctest::Approx(1.0));
  CHECK(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == doctest::Approx(0.0));
  CHECK(cosine_similarity(std::vector<double>{1, 1}, std::vector<double>{-1, -1}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 2}),
                  AnalysisError);
  CHECK_THROWS_AS(cosine_similarity(u, std::vector<double>{1.0}), AnalysisError);
}

TEST_CASE("experiment analysis on a coded fixture")
{
  SyntheticSpec spec;
  spec.kind = SyntheticKind::noise_texture;
  spec.frame_count = 20;
  spec.width = 32;
  spec.height = 32;
  spec.low_fraction = 0.25;
  spec.high_fraction = 0.75;
  const auto seq = make_synthetic(spec);
  CodecConfig cfg;
  cfg.granularities = {1, 100};
  const auto exp = run_experiment(seq, cfg);
  for (std::size_t slot = 0; slot < 2; slot++)
  {
    const auto reports = analyze_experiment(exp.frames, slot);
    REQUIRE(reports.size() == 1);
    const auto& r = reports.front();
    CHECK(r.frames.size() == 19);
    CHECK(r.granularity == cfg.granularities[slot]);
    CHECK(r.k_hat == doctest::Approx(2.0).epsilon(0.01));
    for (const auto& g : r.frames)
    {
      CHECK(g.frame_index >= 1);
      CHECK(g.eval_rate > 0.0);
      CHECK(g.eta.eta > 0.0);
      CHECK(g.eta.eta <= 1.0);
    }
    const auto s = summarize(reports);
    CHECK(s.subsequences == 1);
    CHECK(s.measured_mean == doctest::Approx(r.measured_mean));
  }
}

TEST_CASE("identity reshaping yields zero gains and an undefined similarity")
{
  SyntheticSpec spec;
  spec.kind = SyntheticKind::noise_texture;
  spec.frame_count = 20;
  spec.width = 32;
  spec.height = 32;
  const auto seq = make_synthetic(spec);
  CodecConfig cfg;
  cfg.reshaper.mode = ReshaperMode::identity;
  const auto exp = run_experiment(seq, cfg);
  const auto reports = analyze_experiment(exp.frames, 0);
  REQUIRE(reports.size() == 1);
  for (const auto& g : reports.front().frames)
  {
    CHECK(g.measured == 0.0);
    CHECK(g.predicted == 0.0);
    CHECK_FALSE(g.eta_defined);
  }
  CHECK_FALSE(reports.front().cosine.has_value());
  CHECK_FALSE(summarize(reports).cosine.has_value());
}

TEST_CASE("analysis requires both modes")
{
  SyntheticSpec spec;
  spec.kind = SyntheticKind::noise_texture;
  spec.frame_count = 3;
  spec.width = 16;
  spec.height = 16;
  const auto seq = make_synthetic(spec);
  CodecConfig cfg;
  auto exp = run_experiment(seq, cfg);
  std::vector<FrameResult> base_only;
  for (const auto& f : exp.frames)
    if (!f.reshaped)
      base_only.push_back(f);
  CHECK_THROWS_AS(analyze_experiment(base_only, 0), AnalysisError);
  CHECK_THROWS_AS(analyze_experiment(exp.frames, 4), AnalysisError);
  CHECK_THROWS_AS(summarize(std::span<const GainReport>{}), AnalysisError);
}

TEST_CASE("summary statistics")
{
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(mean_of(v) == 2.5);
  CHECK(stddev_of(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(stddev_of(std::vector<double>{3.0}) == 0.0);
}
