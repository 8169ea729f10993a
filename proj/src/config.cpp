#include "inloop/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "inloop/error.hpp"

namespace inloop {

namespace {

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

void parse_into(ConfigMap& map, const std::string& text, const std::filesystem::path& base_dir,
                std::set<std::filesystem::path>& visiting)
{
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line))
  {
    lineno++;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string body = trim(line);
    if (body.empty())
      continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (key != "include")
    {
      map[key] = value;
      continue;
    }
    const auto path = std::filesystem::weakly_canonical(base_dir / value);
    if (visiting.contains(path))
      throw ConfigError("config include cycle at " + path.string());
    std::ifstream file(path);
    if (!file)
      throw IoError("cannot open included config " + path.string());
    std::stringstream content;
    content << file.rdbuf();
    visiting.insert(path);
    parse_into(map, content.str(), path.parent_path(), visiting);
    visiting.erase(path);
  }
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("invalid value for " + key + ": '" + value + "'");
  return out;
}

std::string join(const std::vector<int>& v)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); i++)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string format_double(double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

constexpr std::string_view kSyntheticPrefix = "synthetic:";

} // namespace

ConfigMap parse_config_text(const std::string& text, const std::filesystem::path& base_dir)
{
  ConfigMap map;
  std::set<std::filesystem::path> visiting;
  parse_into(map, text, base_dir, visiting);
  return map;
}

ConfigMap read_config_file(const std::filesystem::path& path)
{
  std::ifstream file(path);
  if (!file)
    throw IoError("cannot open config " + path.string());
  std::stringstream content;
  content << file.rdbuf();
  ConfigMap map;
  std::set<std::filesystem::path> visiting{std::filesystem::weakly_canonical(path)};
  parse_into(map, content.str(), path.parent_path(), visiting);
  return map;
}

std::vector<int> parse_int_list(const std::string& text)
{
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
  {
    const auto v = trim(item);
    if (v.empty())
      continue;
    out.push_back(parse_number<int>("list", v));
  }
  if (out.empty())
    throw ConfigError("empty list: '" + text + "'");
  return out;
}

RunConfig apply_config(const ConfigMap& map, RunConfig cfg)
{
  for (const auto& [key, value] : map)
  {
    if (key == "input")
      cfg.input = value;
    else if (key == "width")
      cfg.width = parse_number<int>(key, value);
    else if (key == "height")
      cfg.height = parse_number<int>(key, value);
    else if (key == "bit_depth")
      cfg.bit_depth = parse_number<int>(key, value);
    else if (key == "frames")
      cfg.frames = parse_number<int>(key, value);
    else if (key == "qp")
      cfg.qps = parse_int_list(value);
    else if (key == "reshaper")
      cfg.reshaper.mode = parse_reshaper_mode(value);
    else if (key == "a")
      cfg.reshaper.a = value.empty() ? std::nullopt : std::optional(parse_number<double>(key, value));
    else if (key == "b")
      cfg.reshaper.b = value.empty() ? std::nullopt : std::optional(parse_number<double>(key, value));
    else if (key == "margin")
      cfg.reshaper.margin = parse_number<double>(key, value);
    else if (key == "split")
      cfg.reshaper.split = parse_number<double>(key, value);
    else if (key == "first_slope_factor")
      cfg.reshaper.first_slope_factor = parse_number<double>(key, value);
    else if (key == "granularity")
      cfg.granularities = parse_int_list(value);
    else if (key == "search_range")
      cfg.search_range = value.empty() ? std::nullopt : std::optional(parse_number<int>(key, value));
    else if (key == "gop_length")
      cfg.gop_length = parse_number<int>(key, value);
    else if (key == "output")
      cfg.output = value;
    else if (key == "seed")
      cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "synthetic.low")
      cfg.low_fraction = parse_number<double>(key, value);
    else if (key == "synthetic.high")
      cfg.high_fraction = parse_number<double>(key, value);
    else if (key == "synthetic.motion_x")
      cfg.motion_x = parse_number<int>(key, value);
    else if (key == "synthetic.motion_y")
      cfg.motion_y = parse_number<int>(key, value);
    else if (key == "synthetic.noise_sigma")
      cfg.noise_sigma = parse_number<double>(key, value);
    else if (key == "synthetic.texture_sigma")
      cfg.texture_sigma = parse_number<double>(key, value);
    else
      throw ConfigError("unknown config key: " + key);
  }
  return cfg;
}

bool RunConfig::is_synthetic() const { return input.starts_with(kSyntheticPrefix); }

std::string RunConfig::sequence_name() const
{
  if (is_synthetic())
    return input.substr(kSyntheticPrefix.size());
  return std::filesystem::path(input).stem().string();
}

int RunConfig::effective_search_range() const
{
  return search_range.value_or(default_search_range(sequence_name()));
}

void RunConfig::validate() const
{
  if (input.empty())
    throw ConfigError("input is required");
  if (is_synthetic())
    parse_synthetic_kind(sequence_name());
  if (width <= 0 || height <= 0)
    throw ConfigError("geometry must be positive");
  if (bit_depth < 1 || bit_depth > 16)
    throw ConfigError("bit depth must be in [1, 16]");
  if (frames < 0 || (is_synthetic() && frames == 0))
    throw ConfigError("frame count must be positive");
  for (int qp : qps)
    if (qp < 0 || qp > 51)
      throw ConfigError("QP must be in [0, 51]");
  if (!(low_fraction >= 0.0 && low_fraction < high_fraction && high_fraction <= 1.0))
    throw ConfigError("synthetic range needs 0 <= low < high <= 1");
  if (noise_sigma < 0.0 || texture_sigma < 0.0)
    throw ConfigError("noise levels must be nonnegative");
  codec_config().validate();
}

CodecConfig RunConfig::codec_config() const
{
  CodecConfig c;
  c.ladder.clear();
  for (int qp : qps)
  {
    if (qp < 0 || qp > 51)
      throw ConfigError("QP must be in [0, 51]");
    c.ladder.push_back(quantizer_for_qp(qp));
  }
  c.reshaper = reshaper;
  c.granularities = granularities;
  c.search_range = effective_search_range();
  c.gop_length = gop_length;
  return c;
}

Sequence RunConfig::load_sequence() const
{
  if (is_synthetic())
  {
    SyntheticSpec spec;
    try
    {
      spec.kind = parse_synthetic_kind(sequence_name());
    }
    catch (const DomainError& e)
    {
      throw ConfigError(e.what());
    }
    spec.width = width;
    spec.height = height;
    spec.bit_depth = bit_depth;
    spec.frame_count = frames;
    spec.seed = seed;
    spec.low_fraction = low_fraction;
    spec.high_fraction = high_fraction;
    spec.motion_x = motion_x;
    spec.motion_y = motion_y;
    spec.noise_sigma = noise_sigma;
    spec.texture_sigma = texture_sigma;
    return make_synthetic(spec);
  }
  Sequence seq = load_yuv(input, width, height, bit_depth);
  if (frames > 0 && static_cast<std::size_t>(frames) < seq.frames.size())
    seq.frames.resize(static_cast<std::size_t>(frames));
  return seq;
}

std::string RunConfig::to_text() const
{
  std::ostringstream os;
  os << "input = " << input << "\n";
  os << "width = " << width << "\n";
  os << "height = " << height << "\n";
  os << "bit_depth = " << bit_depth << "\n";
  os << "frames = " << frames << "\n";
  os << "qp = " << join(qps) << "\n";
  os << "reshaper = " << to_string(reshaper.mode) << "\n";
  os << "a = " << (reshaper.a ? format_double(*reshaper.a) : "") << "\n";
  os << "b = " << (reshaper.b ? format_double(*reshaper.b) : "") << "\n";
  os << "margin = " << format_double(reshaper.margin) << "\n";
  os << "split = " << format_double(reshaper.split) << "\n";
  os << "first_slope_factor = " << format_double(reshaper.first_slope_factor) << "\n";
  os << "granularity = " << join(granularities) << "\n";
  os << "search_range = " << (search_range ? std::to_string(*search_range) : "") << "\n";
  os << "gop_length = " << gop_length << "\n";
  os << "output = " << output.string() << "\n";
  os << "seed = " << seed << "\n";
  os << "synthetic.low = " << format_double(low_fraction) << "\n";
  os << "synthetic.high = " << format_double(high_fraction) << "\n";
  os << "synthetic.motion_x = " << motion_x << "\n";
  os << "synthetic.motion_y = " << motion_y << "\n";
  os << "synthetic.noise_sigma = " << format_double(noise_sigma) << "\n";
  os << "synthetic.texture_sigma = " << format_double(texture_sigma) << "\n";
  return os.str();
}

} // namespace inloop
