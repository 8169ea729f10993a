#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "inloop/error.hpp"

namespace inloop {

/// Sorted (index, count) pairs of a codeword stream.
std::vector<std::pair<std::int32_t, std::uint64_t>> histogram(std::span<const std::int32_t> indices);

/// Shannon entropy of the empirical distribution, bits/symbol.
double measure_entropy(std::span<const std::int32_t> indices);

/// Rate of an optimal coder: identical to the entropy.
double ideal_rate(std::span<const std::int32_t> indices);

/// Frame-level probability model of the arithmetic coder.
///
/// Granularity g coarsens the model: codewords are grouped by their
/// dequantized value step*index into bins of width g (sign-symmetric,
/// zero kept separate), bins carry exact frame counts, and indices inside
/// a bin are modeled as equiprobable. g = 1 is the exact histogram.
/// Bins for step-value widths g1 | g2 nest, so coarser granularity never
/// lowers the model cross-entropy.
class SymbolModel
{
public:
  struct Bin
  {
    std::int64_t key = 0;
    std::uint64_t count = 0;
    std::uint64_t cumulative = 0;
    std::int64_t first = 0; // smallest magnitude in the bin
    std::uint64_t size = 1; // number of indices sharing the bin
  };

  /// A requested granularity of 1000 falls back to 500 when every symbol of a
  /// multi-symbol frame would land in one bin.
  static SymbolModel build(std::span<const std::int32_t> indices, int granularity, double step = 1.0);

  int requested_granularity() const { return m_requested; }
  int granularity() const { return m_granularity; }
  bool fell_back() const { return m_requested != m_granularity; }
  double step() const { return m_step; }
  std::uint64_t total() const { return m_total; }
  const std::vector<Bin>& bins() const { return m_bins; }

  std::int64_t bin_key(std::int32_t index) const;
  /// nullptr when the index's bin is unoccupied.
  const Bin* find(std::int64_t key) const;

  double probability(std::int32_t index) const;

  /// Cross-entropy of `indices` under this model, bits/symbol.
  double model_rate(std::span<const std::int32_t> indices) const;

private:
  SymbolModel(int requested, int granularity, double step) : m_requested(requested), m_granularity(granularity), m_step(step) {}
  void fill(std::span<const std::int32_t> indices);
  std::int64_t magnitude_key(std::int64_t magnitude) const;
  std::pair<std::int64_t, std::uint64_t> key_range(std::int64_t key) const;

  int m_requested;
  int m_granularity;
  double m_step;
  double m_ratio = 1.0;
  bool m_exact = true;
  std::uint64_t m_total = 0;
  std::vector<Bin> m_bins;
};

struct EncodedStream
{
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_count = 0;
};

/// Binary arithmetic coder over 32-bit code values with deferred
/// (underflow) bits. Cumulative totals must stay below 2^30.
class ArithmeticEncoder
{
public:
  void encode(std::uint64_t cum_low, std::uint64_t freq, std::uint64_t total);
  EncodedStream finish();

private:
  void emit(bool bit);
  void emit_with_pending(bool bit);

  std::uint64_t m_low = 0;
  std::uint64_t m_high = 0xffffffffull;
  std::uint64_t m_pending = 0;
  EncodedStream m_out;
};

class ArithmeticDecoder
{
public:
  explicit ArithmeticDecoder(const EncodedStream& stream);

  /// Cumulative frequency slot of the next symbol under `total`.
  std::uint64_t target(std::uint64_t total) const;
  void consume(std::uint64_t cum_low, std::uint64_t freq, std::uint64_t total);

private:
  bool next_bit();

  const EncodedStream& m_stream;
  std::uint64_t m_position = 0;
  std::uint64_t m_low = 0;
  std::uint64_t m_high = 0xffffffffull;
  std::uint64_t m_value = 0;
};

/// Arithmetic-codes `indices`; every index must be covered by `model`.
EncodedStream encode(std::span<const std::int32_t> indices, const SymbolModel& model);

std::vector<std::int32_t> decode(const EncodedStream& stream, const SymbolModel& model, std::size_t count);

/// Coded bits/symbol of the frame-level model at `granularity`.
double coded_rate(std::span<const std::int32_t> indices, int granularity, double step = 1.0);

} // namespace inloop
