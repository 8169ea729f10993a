#include "inloop/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace inloop {

namespace {

constexpr std::uint64_t kTop = 0xffffffffull;
constexpr std::uint64_t kHalf = 1ull << 31;
constexpr std::uint64_t kQuarter = 1ull << 30;
constexpr std::uint64_t kMaxTotal = kQuarter;

void require_total(std::uint64_t total)
{
  if (total == 0 || total >= kMaxTotal)
    throw DomainError("arithmetic coder total frequency out of range");
}

} // namespace

std::vector<std::pair<std::int32_t, std::uint64_t>> histogram(std::span<const std::int32_t> indices)
{
  std::vector<std::int32_t> sorted(indices.begin(), indices.end());
  std::ranges::sort(sorted);
  std::vector<std::pair<std::int32_t, std::uint64_t>> out;
  for (auto v : sorted)
  {
    if (out.empty() || out.back().first != v)
      out.emplace_back(v, 0);
    out.back().second++;
  }
  return out;
}

double measure_entropy(std::span<const std::int32_t> indices)
{
  if (indices.empty())
    throw DomainError("entropy of an empty stream is undefined");
  const double n = static_cast<double>(indices.size());
  double h = 0.0;
  for (const auto& [value, count] : histogram(indices))
  {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double ideal_rate(std::span<const std::int32_t> indices) { return measure_entropy(indices); }

// ---------------------------------------------------------------------------
// SymbolModel
// ---------------------------------------------------------------------------

std::int64_t SymbolModel::magnitude_key(std::int64_t magnitude) const
{
  if (m_exact || magnitude == 0)
    return magnitude;
  // Smallest K with floor(K * ratio) >= magnitude.
  auto upper = [this](std::int64_t k) { return static_cast<std::int64_t>(std::floor(static_cast<double>(k) * m_ratio)); };
  auto k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(static_cast<double>(magnitude) / m_ratio)));
  while (upper(k) < magnitude)
    k++;
  while (k > 1 && upper(k - 1) >= magnitude)
    k--;
  return k;
}

std::pair<std::int64_t, std::uint64_t> SymbolModel::key_range(std::int64_t key) const
{
  const std::int64_t k = key < 0 ? -key : key;
  if (m_exact || k == 0)
    return {k, 1};
  const auto first = static_cast<std::int64_t>(std::floor(static_cast<double>(k - 1) * m_ratio)) + 1;
  const auto last = static_cast<std::int64_t>(std::floor(static_cast<double>(k) * m_ratio));
  return {first, static_cast<std::uint64_t>(last - first + 1)};
}

std::int64_t SymbolModel::bin_key(std::int32_t index) const
{
  const std::int64_t v = index;
  return v < 0 ? -magnitude_key(-v) : magnitude_key(v);
}

const SymbolModel::Bin* SymbolModel::find(std::int64_t key) const
{
  auto it = std::ranges::lower_bound(m_bins, key, {}, &Bin::key);
  return it != m_bins.end() && it->key == key ? &*it : nullptr;
}

void SymbolModel::fill(std::span<const std::int32_t> indices)
{
  m_exact = m_granularity <= 1;
  m_ratio = m_exact ? 1.0 : static_cast<double>(m_granularity) / m_step;
  m_bins.clear();
  m_total = 0;
  for (const auto& [index, count] : histogram(indices))
  {
    const auto key = bin_key(index);
    if (m_bins.empty() || m_bins.back().key != key)
    {
      Bin bin;
      bin.key = key;
      std::tie(bin.first, bin.size) = key_range(key);
      m_bins.push_back(bin);
    }
    m_bins.back().count += count;
    m_total += count;
  }
  std::uint64_t cum = 0;
  for (auto& bin : m_bins)
  {
    bin.cumulative = cum;
    cum += bin.count;
  }
}

SymbolModel SymbolModel::build(std::span<const std::int32_t> indices, int granularity, double step)
{
  if (indices.empty())
    throw DomainError("cannot model an empty stream");
  if (granularity < 1)
    throw DomainError("model granularity must be at least 1");
  if (!(step > 0.0))
    throw DomainError("quantization step must be positive");

  SymbolModel model(granularity, granularity, step);
  model.fill(indices);
  if (granularity == 1000 && model.m_bins.size() < 2 && histogram(indices).size() >= 2)
  {
    model.m_granularity = 500;
    model.fill(indices);
  }
  require_total(model.m_total);
  return model;
}

double SymbolModel::probability(std::int32_t index) const
{
  const auto* bin = find(bin_key(index));
  if (bin == nullptr)
    return 0.0;
  return static_cast<double>(bin->count) / static_cast<double>(m_total) / static_cast<double>(bin->size);
}

double SymbolModel::model_rate(std::span<const std::int32_t> indices) const
{
  if (indices.empty())
    throw DomainError("cannot rate an empty stream");
  double bits = 0.0;
  for (const auto& [index, count] : histogram(indices))
  {
    const double p = probability(index);
    if (p <= 0.0)
      throw DomainError("symbol absent from model");
    bits -= static_cast<double>(count) * std::log2(p);
  }
  return bits / static_cast<double>(indices.size());
}

// ---------------------------------------------------------------------------
// Arithmetic coder
// ---------------------------------------------------------------------------

void ArithmeticEncoder::emit(bool bit)
{
  if (m_out.bit_count % 8 == 0)
    m_out.bytes.push_back(0);
  if (bit)
    m_out.bytes.back() |= static_cast<std::uint8_t>(0x80u >> (m_out.bit_count % 8));
  m_out.bit_count++;
}

void ArithmeticEncoder::emit_with_pending(bool bit)
{
  emit(bit);
  for (; m_pending > 0; m_pending--)
    emit(!bit);
}

void ArithmeticEncoder::encode(std::uint64_t cum_low, std::uint64_t freq, std::uint64_t total)
{
  require_total(total);
  if (freq == 0 || cum_low + freq > total)
    throw DomainError("invalid symbol interval");
  const std::uint64_t range = m_high - m_low + 1;
  m_high = m_low + range * (cum_low + freq) / total - 1;
  m_low = m_low + range * cum_low / total;
  for (;;)
  {
    if (m_high < kHalf)
    {
      emit_with_pending(false);
    }
    else if (m_low >= kHalf)
    {
      emit_with_pending(true);
      m_low -= kHalf;
      m_high -= kHalf;
    }
    else if (m_low >= kQuarter && m_high < kHalf + kQuarter)
    {
      m_pending++;
      m_low -= kQuarter;
      m_high -= kQuarter;
    }
    else
    {
      break;
    }
    m_low <<= 1;
    m_high = (m_high << 1) | 1;
  }
}

EncodedStream ArithmeticEncoder::finish()
{
  // Two bits select a point inside [low, high] given low < half <= high.
  m_pending++;
  emit_with_pending(m_low >= kQuarter);
  EncodedStream out = std::move(m_out);
  m_out = {};
  m_low = 0;
  m_high = kTop;
  m_pending = 0;
  return out;
}

ArithmeticDecoder::ArithmeticDecoder(const EncodedStream& stream) : m_stream(stream)
{
  for (int i = 0; i < 32; i++)
    m_value = (m_value << 1) | (next_bit() ? 1u : 0u);
}

bool ArithmeticDecoder::next_bit()
{
  if (m_position >= m_stream.bit_count)
  {
    m_position++;
    return false;
  }
  const bool bit = (m_stream.bytes[m_position / 8] >> (7 - m_position % 8)) & 1u;
  m_position++;
  return bit;
}

std::uint64_t ArithmeticDecoder::target(std::uint64_t total) const
{
  const std::uint64_t range = m_high - m_low + 1;
  return ((m_value - m_low + 1) * total - 1) / range;
}

void ArithmeticDecoder::consume(std::uint64_t cum_low, std::uint64_t freq, std::uint64_t total)
{
  const std::uint64_t range = m_high - m_low + 1;
  m_high = m_low + range * (cum_low + freq) / total - 1;
  m_low = m_low + range * cum_low / total;
  for (;;)
  {
    if (m_high < kHalf)
    {
    }
    else if (m_low >= kHalf)
    {
      m_low -= kHalf;
      m_high -= kHalf;
      m_value -= kHalf;
    }
    else if (m_low >= kQuarter && m_high < kHalf + kQuarter)
    {
      m_low -= kQuarter;
      m_high -= kQuarter;
      m_value -= kQuarter;
    }
    else
    {
      break;
    }
    m_low <<= 1;
    m_high = (m_high << 1) | 1;
    m_value = (m_value << 1) | (next_bit() ? 1u : 0u);
  }
}

EncodedStream encode(std::span<const std::int32_t> indices, const SymbolModel& model)
{
  ArithmeticEncoder enc;
  for (auto index : indices)
  {
    const auto* bin = model.find(model.bin_key(index));
    if (bin == nullptr)
      throw DomainError("symbol absent from model");
    enc.encode(bin->cumulative, bin->count, model.total());
    if (bin->size > 1)
    {
      const std::int64_t magnitude = index < 0 ? -static_cast<std::int64_t>(index) : index;
      enc.encode(static_cast<std::uint64_t>(magnitude - bin->first), 1, bin->size);
    }
  }
  return enc.finish();
}

std::vector<std::int32_t> decode(const EncodedStream& stream, const SymbolModel& model, std::size_t count)
{
  ArithmeticDecoder dec(stream);
  const auto& bins = model.bins();
  std::vector<std::int32_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; i++)
  {
    const auto slot = dec.target(model.total());
    auto it = std::ranges::upper_bound(bins, slot, {}, &SymbolModel::Bin::cumulative);
    const auto& bin = *std::prev(it);
    dec.consume(bin.cumulative, bin.count, model.total());
    std::int64_t magnitude = bin.first;
    if (bin.size > 1)
    {
      const auto offset = dec.target(bin.size);
      dec.consume(offset, 1, bin.size);
      magnitude += static_cast<std::int64_t>(offset);
    }
    out.push_back(static_cast<std::int32_t>(bin.key < 0 ? -magnitude : magnitude));
  }
  return out;
}

double coded_rate(std::span<const std::int32_t> indices, int granularity, double step)
{
  const auto model = SymbolModel::build(indices, granularity, step);
  return static_cast<double>(encode(indices, model).bit_count) / static_cast<double>(indices.size());
}

} // namespace inloop
