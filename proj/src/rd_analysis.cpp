#include "inloop/rd_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>

namespace inloop {

namespace {

double lerp(double x0, double y0, double x1, double y1, double x)
{
  if (x == x0)
    return y0;
  if (x == x1)
    return y1;
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

} // namespace

RDCurve::RDCurve(std::vector<RDPoint> points) : m_points(std::move(points))
{
  if (m_points.size() < 2)
    throw AnalysisError("an R-D curve needs at least two points");
  for (const auto& p : m_points)
    if (!std::isfinite(p.rate) || std::isnan(p.psnr))
      throw AnalysisError("R-D point is not finite");
  std::ranges::sort(m_points, {}, &RDPoint::rate);
  for (std::size_t i = 1; i < m_points.size(); i++)
    if (!(m_points[i].rate > m_points[i - 1].rate))
      throw AnalysisError("R-D curve rates must be distinct");
}

double RDCurve::psnr_at(double rate) const
{
  if (!(rate >= min_rate() && rate <= max_rate()))
    throw OutOfHullError("rate outside the sampled R-D range");
  auto it = std::ranges::lower_bound(m_points, rate, {}, &RDPoint::rate);
  if (it == m_points.begin())
    return it->psnr;
  const auto& hi = *it;
  const auto& lo = *std::prev(it);
  return lerp(lo.rate, lo.psnr, hi.rate, hi.psnr, rate);
}

double measure_gain(const RDCurve& base, const RDCurve& reshaped, double eval_rate)
{
  return reshaped.psnr_at(eval_rate) - base.psnr_at(eval_rate);
}

RateEntropyCurve::RateEntropyCurve(std::vector<RatePoint> points) : m_points(std::move(points))
{
  if (m_points.size() < 2)
    throw AnalysisError("an R-H curve needs at least two points");
  for (const auto& p : m_points)
    if (!std::isfinite(p.rate) || !std::isfinite(p.entropy))
      throw AnalysisError("R-H point is not finite");
  std::ranges::sort(m_points, [](const RatePoint& l, const RatePoint& r) {
    return std::tie(l.entropy, l.rate) < std::tie(r.entropy, r.rate);
  });
  if (!(m_points.back().entropy > m_points.front().entropy))
    throw AnalysisError("R-H curve has no entropy spread");
}

double RateEntropyCurve::rate_at(double entropy) const
{
  if (!(entropy >= m_points.front().entropy && entropy <= m_points.back().entropy))
    throw OutOfHullError("entropy outside the sampled R-H range");
  for (std::size_t i = 1; i < m_points.size(); i++)
  {
    const auto& lo = m_points[i - 1];
    const auto& hi = m_points[i];
    if (entropy <= hi.entropy && hi.entropy > lo.entropy)
      return lerp(lo.entropy, lo.rate, hi.entropy, hi.rate, entropy);
    if (entropy == lo.entropy)
      return lo.rate;
  }
  return m_points.back().rate;
}

double RateEntropyCurve::entropy_at(double rate) const
{
  for (std::size_t i = 1; i < m_points.size(); i++)
  {
    const auto& lo = m_points[i - 1];
    const auto& hi = m_points[i];
    const double rmin = std::min(lo.rate, hi.rate);
    const double rmax = std::max(lo.rate, hi.rate);
    if (rate < rmin || rate > rmax)
      continue;
    if (hi.rate == lo.rate)
      return lo.entropy;
    return lerp(lo.rate, lo.entropy, hi.rate, hi.entropy, rate);
  }
  throw OutOfHullError("rate outside the sampled R-H range");
}

EtaEstimate estimate_eta(const RateEntropyCurve& curve, double r0, double k)
{
  if (!(k > 1.0))
    throw DomainError("eta estimation needs a range expansion k > 1");
  if (!(r0 > 0.0))
    throw DomainError("eta estimation needs a positive base rate");
  EtaEstimate e;
  e.r0 = r0;
  e.h0 = curve.entropy_at(r0);
  e.h1 = e.h0 + std::log2(k);
  e.r1 = curve.rate_at(e.h1);
  e.raw_eta = (e.r1 / e.r0 - 1.0) * e.h0 / std::log2(k);
  e.eta = std::clamp(e.raw_eta, kMinEta, 1.0);
  e.clamped = e.eta != e.raw_eta;
  return e;
}

double predict_gain(double eta, double k)
{
  if (!(k >= 1.0))
    throw DomainError("predicted gain needs k >= 1");
  if (!(eta > 0.0 && eta <= 1.0))
    throw DomainError("predicted gain needs 0 < eta <= 1");
  return 20.0 * (1.0 - eta) * std::log10(k);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v)
{
  if (u.size() != v.size() || u.empty())
    throw AnalysisError("cosine similarity needs equal nonempty vectors");
  double uv = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); i++)
  {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0)
    throw AnalysisError("cosine similarity is undefined for a zero vector");
  return std::clamp(uv / std::sqrt(uu * vv), -1.0, 1.0);
}

double mean_of(std::span<const double> v)
{
  if (v.empty())
    return 0.0;
  double s = 0.0;
  for (double x : v)
    s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v)
{
  if (v.size() < 2)
    return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v)
    s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<GainReport> analyze_experiment(std::span<const FrameResult> frames, std::size_t slot)
{
  // (subsequence, frame) -> per-mode points ordered by step.
  using Key = std::pair<int, int>;
  std::map<Key, std::array<std::vector<const FrameResult*>, 2>> grouped;
  std::map<int, double> k_hat;
  std::map<int, int> granularity;
  std::map<int, std::size_t> fallbacks;
  for (const auto& f : frames)
  {
    if (slot >= f.rates.size())
      throw AnalysisError("granularity slot missing from frame results");
    grouped[{f.subsequence, f.frame_index}][f.reshaped ? 1 : 0].push_back(&f);
    if (f.reshaped)
      k_hat[f.subsequence] = f.k_used;
    granularity[f.subsequence] = f.granularity[slot];
    if (f.reshaped && f.type == FrameType::P && f.model_granularity[slot] != f.granularity[slot])
      fallbacks[f.subsequence]++;
  }

  std::map<int, GainReport> reports;
  for (auto& [key, modes] : grouped)
  {
    auto& [base, reshaped] = modes;
    if (base.empty() || reshaped.empty())
      throw AnalysisError("analysis needs both base and reshaped results");
    if (base.size() != reshaped.size() || base.size() < 2)
      throw AnalysisError("base and reshaped runs cover different ladders");
    if (base.front()->type != FrameType::P)
      continue;
    auto by_step = [](const FrameResult* l, const FrameResult* r) { return l->step < r->step; };
    std::ranges::sort(base, by_step);
    std::ranges::sort(reshaped, by_step);

    std::vector<RDPoint> base_rd;
    std::vector<RDPoint> resh_rd;
    std::vector<RatePoint> rh;
    for (const auto* f : base)
    {
      base_rd.push_back({f->rates[slot], f->psnr});
      rh.push_back({f->entropy, f->rates[slot], f->qp, false});
    }
    for (const auto* f : reshaped)
    {
      resh_rd.push_back({f->rates[slot], f->psnr});
      rh.push_back({f->entropy, f->rates[slot], f->qp, true});
    }

    const auto* mid = base[base.size() / 2];
    const double k = k_hat.at(key.first);
    FrameGain g;
    g.frame_index = key.second;
    g.eval_rate = mid->rates[slot];
    g.eval_rate_per_pixel = g.eval_rate * static_cast<double>(mid->symbol_count) / static_cast<double>(mid->pixel_count);
    g.measured = measure_gain(RDCurve(base_rd), RDCurve(resh_rd), g.eval_rate);
    if (k > 1.0 + 1e-12)
    {
      g.eta = estimate_eta(RateEntropyCurve(rh), g.eval_rate, k);
      g.predicted = predict_gain(g.eta.eta, k);
    }
    else
    {
      g.eta_defined = false;
      g.predicted = 0.0;
    }

    auto& report = reports[key.first];
    report.subsequence = key.first;
    report.granularity = granularity.at(key.first);
    report.k_hat = k;
    report.fallback_count = fallbacks[key.first];
    report.frames.push_back(g);
  }

  std::vector<GainReport> out;
  for (auto& [sub, report] : reports)
  {
    std::vector<double> measured;
    std::vector<double> predicted;
    std::vector<double> rates;
    std::vector<double> rates_px;
    for (const auto& g : report.frames)
    {
      measured.push_back(g.measured);
      predicted.push_back(g.predicted);
      rates.push_back(g.eval_rate);
      rates_px.push_back(g.eval_rate_per_pixel);
      if (g.eta.clamped)
        report.clamped_count++;
    }
    report.measured_mean = mean_of(measured);
    report.measured_std = stddev_of(measured);
    report.predicted_mean = mean_of(predicted);
    report.predicted_std = stddev_of(predicted);
    report.eval_rate_mean = mean_of(rates);
    report.eval_rate_per_pixel_mean = mean_of(rates_px);
    const auto nonzero = [](const std::vector<double>& v) {
      return std::ranges::any_of(v, [](double x) { return x != 0.0; });
    };
    if (nonzero(measured) && nonzero(predicted))
      report.cosine = cosine_similarity(measured, predicted);
    out.push_back(std::move(report));
  }
  return out;
}

GainSummary summarize(std::span<const GainReport> reports)
{
  GainSummary s;
  if (reports.empty())
    throw AnalysisError("nothing to summarize");
  std::vector<double> k;
  std::vector<double> rates;
  std::vector<double> rates_px;
  std::vector<double> measured;
  std::vector<double> predicted;
  std::vector<double> cosines;
  for (const auto& r : reports)
  {
    k.push_back(r.k_hat);
    rates.push_back(r.eval_rate_mean);
    rates_px.push_back(r.eval_rate_per_pixel_mean);
    for (const auto& g : r.frames)
    {
      measured.push_back(g.measured);
      predicted.push_back(g.predicted);
    }
    if (r.cosine)
      cosines.push_back(*r.cosine);
  }
  s.granularity = reports.front().granularity;
  s.subsequences = reports.size();
  s.k_hat = mean_of(k);
  s.eval_rate = mean_of(rates);
  s.eval_rate_per_pixel = mean_of(rates_px);
  s.measured_mean = mean_of(measured);
  s.measured_std = stddev_of(measured);
  s.predicted_mean = mean_of(predicted);
  s.predicted_std = stddev_of(predicted);
  if (!cosines.empty())
    s.cosine = mean_of(cosines);
  return s;
}

} // namespace inloop
