#include "inloop/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <tuple>

#include "inloop/entropy.hpp"
#include "inloop/error.hpp"
#include "inloop/theory.hpp"

namespace inloop {

namespace {

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string mode_name(bool reshaped) { return reshaped ? "reshaped" : "base"; }

std::filesystem::path ensure_dir(const std::filesystem::path& dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::string granularity_suffix(int g) { return "_g" + std::to_string(g) + ".csv"; }

} // namespace

CsvTable frames_table(const ExperimentResult& experiment)
{
  CsvTable t("inloop.frames/1", {"mode", "subsequence", "frame", "type", "qp", "step", "k_used", "mse", "psnr",
                                 "entropy", "symbols", "pixels", "granularity", "model_granularity", "rate",
                                 "rate_per_pixel"});
  for (const auto& f : experiment.frames)
  {
    for (std::size_t s = 0; s < f.rates.size(); s++)
    {
      const double per_pixel = f.rates[s] * static_cast<double>(f.symbol_count) / static_cast<double>(f.pixel_count);
      t.add_row({mode_name(f.reshaped), num(f.subsequence), num(f.frame_index), std::string(to_string(f.type)),
                 num(f.qp), num(f.step), num(f.k_used), num(f.mse), num(f.psnr), num(f.entropy), num(f.symbol_count),
                 num(f.pixel_count), num(f.granularity[s]), num(f.model_granularity[s]), num(f.rates[s]),
                 num(per_pixel)});
    }
  }
  return t;
}

CsvTable summary_table(const ExperimentResult& experiment, std::size_t slot)
{
  CsvTable t("inloop.summary/1", {"mode", "qp", "step", "subsequence", "frames", "k_used", "entropy", "rate",
                                  "rate_per_pixel", "mse", "psnr"});
  struct Acc
  {
    double step = 0, k = 0, h = 0, r = 0, rpx = 0, mse = 0, psnr = 0;
    std::size_t n = 0;
  };
  // Keyed by mode, ladder position (step) and subsequence.
  std::map<std::tuple<bool, double, int, int>, Acc> acc;
  for (const auto& f : experiment.frames)
  {
    auto& a = acc[{f.reshaped, f.step, f.qp, f.subsequence}];
    a.step = f.step;
    a.k = f.k_used;
    a.h += f.entropy;
    a.r += f.rates.at(slot);
    a.rpx += f.rates.at(slot) * static_cast<double>(f.symbol_count) / static_cast<double>(f.pixel_count);
    a.mse += f.mse;
    a.psnr += f.psnr;
    a.n++;
  }
  for (const auto& [key, a] : acc)
  {
    const auto n = static_cast<double>(a.n);
    t.add_row({mode_name(std::get<0>(key)), num(std::get<2>(key)), num(a.step), num(std::get<3>(key)), num(a.n),
               num(a.k), num(a.h / n), num(a.r / n), num(a.rpx / n), num(a.mse / n), num(a.psnr / n)});
  }
  return t;
}

CsvTable reshaper_table(const ExperimentResult& experiment)
{
  CsvTable t("inloop.reshaper/1",
             {"subsequence", "kind", "a", "b", "alpha2", "k1", "k2", "k_effective", "degraded_to_identity"});
  for (std::size_t s = 0; s < experiment.reshapers.size(); s++)
  {
    const auto& r = experiment.reshapers[s];
    if (const auto* one = r.reshaper.one_piece())
      t.add_row({num(s), one->is_identity() ? "identity" : "one-piece", num(one->a()), num(one->b()), "", "", "",
                 num(r.k), r.degraded_to_identity ? "1" : "0"});
    else if (const auto* two = r.reshaper.two_piece())
      t.add_row({num(s), "two-piece", num(two->alpha1()), num(two->alpha3()), num(two->alpha2()), num(two->k1()),
                 num(two->k2()), num(r.k), "0"});
  }
  return t;
}

CsvTable gains_table(std::span<const GainReport> reports)
{
  CsvTable t("inloop.gains/1", {"subsequence", "frame", "measured_gain", "predicted_gain", "eta_hat", "raw_eta",
                                "eta_clamped", "k_hat", "h0", "h1", "r0", "r1", "eval_rate", "eval_rate_per_pixel"});
  for (const auto& r : reports)
  {
    for (const auto& g : r.frames)
    {
      const bool d = g.eta_defined;
      t.add_row({num(r.subsequence), num(g.frame_index), num(g.measured), num(g.predicted),
                 d ? num(g.eta.eta) : "undefined", d ? num(g.eta.raw_eta) : "undefined",
                 g.eta.clamped ? "1" : "0", num(r.k_hat), d ? num(g.eta.h0) : "", d ? num(g.eta.h1) : "",
                 d ? num(g.eta.r0) : "", d ? num(g.eta.r1) : "", num(g.eval_rate), num(g.eval_rate_per_pixel)});
    }
  }
  return t;
}

CsvTable gain_summary_table(std::span<const GainReport> reports)
{
  CsvTable t("inloop.gain_summary/1",
             {"scope", "granularity", "k_hat", "rate_bits_per_symbol", "rate_bits_per_pixel", "measured_mean",
              "measured_std", "predicted_mean", "predicted_std", "cosine_similarity", "eta_clamped", "fallback_frames"});
  auto cos = [](const std::optional<double>& c) { return c ? num(*c) : std::string("undefined"); };
  std::size_t clamped = 0;
  std::size_t fallbacks = 0;
  for (const auto& r : reports)
  {
    t.add_row({"subsequence-" + num(r.subsequence), num(r.granularity), num(r.k_hat), num(r.eval_rate_mean),
               num(r.eval_rate_per_pixel_mean), num(r.measured_mean), num(r.measured_std), num(r.predicted_mean),
               num(r.predicted_std), cos(r.cosine), num(r.clamped_count), num(r.fallback_count)});
    clamped += r.clamped_count;
    fallbacks += r.fallback_count;
  }
  const auto s = summarize(reports);
  t.add_row({"all", num(s.granularity), num(s.k_hat), num(s.eval_rate), num(s.eval_rate_per_pixel),
             num(s.measured_mean), num(s.measured_std), num(s.predicted_mean), num(s.predicted_std), cos(s.cosine),
             num(clamped), num(fallbacks)});
  return t;
}

std::vector<FrameResult> read_frames(const std::filesystem::path& path, const std::vector<int>& granularities)
{
  const auto csv = CsvReader::read(path);
  if (!csv.schema().starts_with("inloop.frames/"))
    throw IoError("unexpected schema in " + path.string());
  std::map<int, std::size_t> slot_of;
  for (std::size_t i = 0; i < granularities.size(); i++)
    slot_of[granularities[i]] = i;

  std::vector<FrameResult> out;
  std::map<std::tuple<bool, int, int, int>, std::size_t> index;
  for (std::size_t row = 0; row < csv.size(); row++)
  {
    const auto& mode = csv.cell(row, "mode");
    if (mode != "base" && mode != "reshaped")
      throw IoError("unknown mode in frames.csv: " + mode);
    const bool reshaped = mode == "reshaped";
    const int sub = csv.integer(row, "subsequence");
    const int frame = csv.integer(row, "frame");
    const int qp = csv.integer(row, "qp");
    const int g = csv.integer(row, "granularity");
    const auto slot = slot_of.find(g);
    if (slot == slot_of.end())
      throw IoError("frames.csv granularity not in run config: " + std::to_string(g));

    auto [it, inserted] = index.try_emplace({reshaped, sub, frame, qp}, out.size());
    if (inserted)
    {
      FrameResult f;
      f.reshaped = reshaped;
      f.subsequence = sub;
      f.frame_index = frame;
      f.qp = qp;
      f.type = csv.cell(row, "type") == "I" ? FrameType::I : FrameType::P;
      f.step = csv.number(row, "step");
      f.k_used = csv.number(row, "k_used");
      f.mse = csv.number(row, "mse");
      f.psnr = csv.number(row, "psnr");
      f.entropy = csv.number(row, "entropy");
      f.symbol_count = static_cast<std::size_t>(csv.integer(row, "symbols"));
      f.pixel_count = static_cast<std::size_t>(csv.integer(row, "pixels"));
      f.granularity = granularities;
      f.rates.assign(granularities.size(), std::nan(""));
      f.model_granularity.assign(granularities.size(), 0);
      out.push_back(std::move(f));
    }
    auto& f = out[it->second];
    f.rates[slot->second] = csv.number(row, "rate");
    f.model_granularity[slot->second] = csv.integer(row, "model_granularity");
  }
  for (const auto& f : out)
    for (double r : f.rates)
      if (std::isnan(r))
        throw IoError("frames.csv is missing a granularity for some frame");
  return out;
}

EncodeOutputs cmd_encode(const RunConfig& cfg)
{
  cfg.validate();
  const Sequence seq = cfg.load_sequence();
  const CodecConfig codec = cfg.codec_config();
  EncodeOutputs out;
  out.experiment = run_experiment(seq, codec);

  const auto dir = ensure_dir(cfg.output);
  {
    const auto path = dir / "run.cfg";
    std::ofstream f(path, std::ios::binary);
    if (!f)
      throw IoError("cannot write " + path.string());
    f << cfg.to_text();
    out.files.push_back(path);
  }
  auto write = [&](const CsvTable& t, const std::string& name) {
    t.write(dir / name);
    out.files.push_back(dir / name);
  };
  write(frames_table(out.experiment), "frames.csv");
  write(reshaper_table(out.experiment), "reshaper.csv");
  for (std::size_t s = 0; s < codec.granularities.size(); s++)
    write(summary_table(out.experiment, s), "summary" + granularity_suffix(codec.granularities[s]));
  return out;
}

std::vector<std::filesystem::path> cmd_analyze(const std::filesystem::path& run_dir)
{
  const auto cfg = apply_config(read_config_file(run_dir / "run.cfg"));
  const auto frames = read_frames(run_dir / "frames.csv", cfg.granularities);
  bool has_base = false;
  bool has_reshaped = false;
  for (const auto& f : frames)
    (f.reshaped ? has_reshaped : has_base) = true;
  if (!has_base || !has_reshaped)
    throw AnalysisError("run is missing the " + std::string(has_base ? "reshaped" : "base") + " mode");

  std::vector<std::filesystem::path> files;
  for (std::size_t s = 0; s < cfg.granularities.size(); s++)
  {
    const auto reports = analyze_experiment(frames, s);
    const auto g = cfg.granularities[s];
    gains_table(reports).write(run_dir / ("gains" + granularity_suffix(g)));
    gain_summary_table(reports).write(run_dir / ("gain_summary" + granularity_suffix(g)));
    files.push_back(run_dir / ("gains" + granularity_suffix(g)));
    files.push_back(run_dir / ("gain_summary" + granularity_suffix(g)));
  }
  return files;
}

namespace {

CsvTable oracle_table1()
{
  CsvTable t("inloop.oracle.table1/1", {"eta", "k", "gain_db", "printed_db"});
  for (const auto& r : theoretical_gain_table())
    t.add_row({num(r.eta), r.k ? num(*r.k) : "any", num(r.gain), num(r.printed)});
  return t;
}

CsvTable oracle_table3(const OracleRequest& req)
{
  PrecisionSweep sweep;
  sweep.trials = req.trials;
  sweep.seed = req.seed;
  sweep.a_step = req.a_step;
  CsvTable t("inloop.oracle.table3/1",
             {"qp", "step", "printed_low_pct", "printed_high_pct", "mc_low_pct", "mc_high_pct", "closed_low_pct",
              "closed_high_pct", "literal_low_pct", "literal_high_pct", "trials", "a_step"});
  for (const auto& r : reconstruction_precision_table(sweep))
    t.add_row({num(r.qp), num(r.step), num(r.printed_low), num(r.printed_high), num(r.mc_low), num(r.mc_high),
               num(r.closed_low), num(r.closed_high), num(r.literal_low), num(r.literal_high),
               std::to_string(req.trials), num(req.a_step)});
  return t;
}

std::vector<std::int32_t> quantize_all(std::span<const double> v, double q)
{
  std::vector<std::int32_t> out;
  out.reserve(v.size());
  for (double x : v)
    out.push_back(codeword_index(x, q));
  return out;
}

CsvTable oracle_appendix_b(const OracleRequest& req)
{
  std::mt19937_64 rng(chunk_seed(req.seed, 0));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(req.samples);
  for (auto& v : x)
    v = unit(rng);
  const auto shift = differential_entropy_shift(x, req.k);

  std::vector<double> kx(x);
  for (auto& v : kx)
    v *= req.k;
  const double q = 1.0 / 8.0;
  const double h0q = measure_entropy(quantize_all(x, q));
  const double h1q = measure_entropy(quantize_all(kx, q));

  CsvTable t("inloop.oracle.appendixB/1", {"quantity", "value", "reference"});
  t.add_row({"h0_bits", num(shift.h0), num(0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e))});
  t.add_row({"h1_bits", num(shift.h1), num(0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e) + std::log2(req.k))});
  t.add_row({"differential_shift_bits", num(shift.shift), num(entropy_gain_one_piece(req.k))});
  t.add_row({"quantized_h0_bits", num(h0q), num(shift.h0 - std::log2(q))});
  t.add_row({"quantized_h1_bits", num(h1q), num(shift.h1 - std::log2(q))});
  t.add_row({"quantized_shift_bits", num(h1q - h0q), num(shift.shift)});
  return t;
}

CsvTable oracle_appendix_c(const OracleRequest& req)
{
  constexpr double kMax = 1023.0;
  const auto r = TwoPieceReshaper::from_first_slope(req.alpha1, req.alpha2, req.alpha3, req.k1, kMax);
  const auto pmf = support_pmf(req.alpha1, req.alpha3, kMax);
  double w1 = 0.0;
  if (req.w1)
  {
    w1 = *req.w1;
  }
  else
  {
    for (int x = pmf.lo(); x <= pmf.hi(); x++)
      if (x <= r.break_point())
        w1 += pmf.probability(x);
  }
  const double two = entropy_gain_two_piece(w1, 1.0 - w1, r.k1(), r.k2());
  const double one = entropy_gain_one_piece(std::max(1.0, r.k1()));

  CsvTable t("inloop.oracle.appendixC/1", {"qp", "step", "crosstalk_12", "crosstalk_21", "p_low_clip", "p_high_clip",
                                           "mse", "w1", "k1", "k2", "two_piece_entropy_gain", "one_piece_entropy_gain_k1"});
  for (const auto& quant : canonical_ladder())
  {
    const auto s = montecarlo_two_piece(r, quant.step, pmf, req.crosstalk_trials, req.seed);
    t.add_row({num(quant.qp), num(quant.step), num(s.crosstalk_12), num(s.crosstalk_21), num(s.p_low), num(s.p_high),
               num(s.mse), num(w1), num(r.k1()), num(r.k2()), num(two), num(one)});
  }
  if (req.histogram)
  {
    CsvTable h("inloop.oracle.residue_histogram/1", {"step", "center", "count", "gaussian_expected"});
    for (const auto& quant : canonical_ladder())
      for (const auto& bin : transformed_residue_histogram(quant.step, 100'000, req.seed))
        h.add_row({num(quant.step), num(bin.center), std::to_string(bin.count), num(bin.gaussian)});
    h.write(*req.histogram);
  }
  return t;
}

} // namespace

CsvTable cmd_oracle(const OracleRequest& request)
{
  if (request.which == "table1")
    return oracle_table1();
  if (request.which == "table3")
    return oracle_table3(request);
  if (request.which == "appendixB")
    return oracle_appendix_b(request);
  if (request.which == "appendixC")
    return oracle_appendix_c(request);
  throw ConfigError("unknown oracle target: " + request.which);
}

namespace {

struct FlagBinding
{
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagBinding kEncodeFlags[] = {
  {"--input", "input", "Raw 4:2:0 file or synthetic:KIND (ramp, moving-block, noise-texture)"},
  {"--width", "width", "Luma width"},
  {"--height", "height", "Luma height"},
  {"--bit-depth", "bit_depth", "Sample bit depth"},
  {"--frames", "frames", "Frames to code (0 = whole file)"},
  {"--qp", "qp", "Comma-separated QP ladder"},
  {"--reshaper", "reshaper", "identity, one-piece or two-piece"},
  {"--a", "a", "Fixed lower support fraction"},
  {"--b", "b", "Fixed upper support fraction"},
  {"--margin", "margin", "Support widening on each side, fraction of the code range"},
  {"--split", "split", "Two-piece breakpoint position inside the support"},
  {"--first-slope-factor", "first_slope_factor", "Two-piece first slope relative to 1/(b - a)"},
  {"--granularity", "granularity", "Comma-separated entropy model granularities"},
  {"--search-range", "search_range", "Full-search range in pixels"},
  {"--gop-length", "gop_length", "Frames per subsequence"},
  {"--output", "output", "Output directory"},
  {"--seed", "seed", "Seed for synthetic content"},
  {"--low", "synthetic.low", "Synthetic lower intensity fraction"},
  {"--high", "synthetic.high", "Synthetic upper intensity fraction"},
  {"--motion-x", "synthetic.motion_x", "Synthetic horizontal motion per frame"},
  {"--motion-y", "synthetic.motion_y", "Synthetic vertical motion per frame"},
  {"--noise-sigma", "synthetic.noise_sigma", "Synthetic additive noise std-dev"},
  {"--texture-sigma", "synthetic.texture_sigma", "noise-texture Gaussian std-dev (0 = uniform)"},
};

int classify(const std::exception& e)
{
  if (dynamic_cast<const ConfigError*>(&e) != nullptr)
    return exit_code::config;
  if (dynamic_cast<const IoError*>(&e) != nullptr)
    return exit_code::io;
  if (dynamic_cast<const AnalysisError*>(&e) != nullptr)
    return exit_code::analysis;
  return exit_code::failure;
}

} // namespace

int run_cli(int argc, const char* const* argv)
{
  CLI::App app{"In-loop reshaping codec experiments"};
  app.require_subcommand(1);

  auto* encode = app.add_subcommand("encode", "Code a sequence with and without reshaping");
  std::string config_path;
  encode->add_option("--config", config_path, "key = value config file");
  std::vector<std::string> values(std::size(kEncodeFlags));
  std::vector<CLI::Option*> options;
  for (std::size_t i = 0; i < std::size(kEncodeFlags); i++)
    options.push_back(encode->add_option(kEncodeFlags[i].flag, values[i], kEncodeFlags[i].help));

  auto* analyze = app.add_subcommand("analyze", "Measure and predict gains of an encode run");
  std::string run_dir;
  analyze->add_option("--run", run_dir, "Encode output directory")->required();

  auto* oracle = app.add_subcommand("oracle", "Closed-form and Monte-Carlo checks");
  OracleRequest req;
  std::string out_path;
  std::string histogram;
  oracle->add_option("which", req.which, "table1, table3, appendixB or appendixC")->required();
  oracle->add_option("--seed", req.seed, "Random seed");
  oracle->add_option("--trials", req.trials, "Monte-Carlo trials per support (table3)");
  oracle->add_option("--a-step", req.a_step, "Support sweep step in code values (table3)");
  oracle->add_option("--samples", req.samples, "Gaussian samples (appendixB)");
  oracle->add_option("--k", req.k, "Range expansion (appendixB)");
  oracle->add_option("--alpha1", req.alpha1, "Lower clip fraction (appendixC)");
  oracle->add_option("--alpha2", req.alpha2, "Breakpoint fraction (appendixC)");
  oracle->add_option("--alpha3", req.alpha3, "Upper clip fraction (appendixC)");
  oracle->add_option("--k1", req.k1, "First segment slope (appendixC)");
  auto* w1 = oracle->add_option("--w1", "Lower segment weight (appendixC)")->type_name("FLOAT");
  oracle->add_option("--crosstalk-trials", req.crosstalk_trials, "Trials per quantizer (appendixC)");
  oracle->add_option("--histogram", histogram, "Also write the transformed-residue histogram (appendixC)");
  oracle->add_option("--out", out_path, "Write CSV here instead of stdout");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? exit_code::ok : exit_code::config;
  }

  try
  {
    if (*encode)
    {
      ConfigMap map = config_path.empty() ? ConfigMap{} : read_config_file(config_path);
      for (std::size_t i = 0; i < options.size(); i++)
        if (options[i]->count() > 0)
          map[kEncodeFlags[i].key] = values[i];
      const auto cfg = apply_config(map);
      const auto result = cmd_encode(cfg);
      for (const auto& f : result.files)
        std::cout << f.string() << "\n";
    }
    else if (*analyze)
    {
      for (const auto& f : cmd_analyze(run_dir))
        std::cout << f.string() << "\n";
    }
    else if (*oracle)
    {
      if (w1->count() > 0)
        req.w1 = w1->as<double>();
      if (!histogram.empty())
        req.histogram = histogram;
      const auto table = cmd_oracle(req);
      if (out_path.empty())
        std::cout << table.to_string();
      else
        table.write(out_path);
    }
    return exit_code::ok;
  }
  catch (const std::exception& e)
  {
    std::cerr << "inloop: " << e.what() << "\n";
    return classify(e);
  }
}

} // namespace inloop
