#pragma once

#include "ggsc/common.hpp"

namespace ggsc {

// Largest alphabet supported by the adaptive model (2^16 symbols).
inline constexpr std::uint32_t kMaxAlphabet = 1u << 16;

struct SymbolStream {
  std::uint32_t alphabet_size = 2;
  std::vector<std::uint32_t> symbols;

  bool operator==(const SymbolStream&) const = default;
};

//============================================================================
// Order-0 adaptive frequency model.  Counts start at 1 and grow by 32 per
// coded symbol; all counts are halved (rounding up) once the total exceeds
// 2^24.  Cumulative lookups use a Fenwick tree.

class AdaptiveModel {
public:
  static constexpr std::uint32_t kIncrement = 32;
  static constexpr std::uint32_t kRescaleLimit = 1u << 24;

  explicit AdaptiveModel(std::uint32_t alphabet)
    : counts_(alphabet, 1), tree_(alphabet + 1, 0), total_(alphabet)
  {
    if (alphabet < 1 || alphabet > kMaxAlphabet)
      throw Error("entropy: alphabet size " + std::to_string(alphabet) + " out of range");
    rebuild();
    top_ = std::bit_floor(alphabet);
  }

  std::uint32_t alphabet() const { return std::uint32_t(counts_.size()); }
  std::uint32_t total() const { return total_; }
  std::uint32_t count(std::uint32_t s) const { return counts_[s]; }

  // Sum of counts of symbols < s.
  std::uint32_t cumulative(std::uint32_t s) const
  {
    std::uint32_t sum = 0;
    for (std::uint32_t i = s; i > 0; i &= i - 1)
      sum += tree_[i];
    return sum;
  }

  // Symbol whose cumulative interval [cum, cum + count) contains @target.
  std::uint32_t find(std::uint32_t target) const
  {
    std::uint32_t pos = 0;
    for (std::uint32_t step = top_; step > 0; step >>= 1) {
      auto next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return pos;
  }

  void update(std::uint32_t s)
  {
    counts_[s] += kIncrement;
    total_ += kIncrement;
    for (auto i = s + 1; i < tree_.size(); i += i & (~i + 1))
      tree_[i] += kIncrement;
    if (total_ > kRescaleLimit) {
      total_ = 0;
      for (auto& c : counts_) {
        c = (c + 1) / 2;
        total_ += c;
      }
      rebuild();
    }
  }

private:
  void rebuild()
  {
    std::fill(tree_.begin(), tree_.end(), 0);
    for (std::size_t i = 1; i < tree_.size(); ++i) {
      tree_[i] += counts_[i - 1];
      auto parent = i + (i & (~i + 1));
      if (parent < tree_.size())
        tree_[parent] += tree_[i];
    }
  }

  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> tree_;
  std::uint32_t total_;
  std::uint32_t top_ = 1;
};

//============================================================================

class BitWriter {
public:
  void put(bool bit)
  {
    acc_ = std::uint8_t((acc_ << 1) | (bit ? 1 : 0));
    if (++filled_ == 8) {
      out_.push_back(acc_);
      acc_ = 0;
      filled_ = 0;
    }
  }

  void put_bits(std::uint64_t value, int count)
  {
    for (int i = count - 1; i >= 0; --i)
      put((value >> i) & 1);
  }

  // Pad the last byte with zeros.
  Bytes finish()
  {
    if (filled_ > 0) {
      out_.push_back(std::uint8_t(acc_ << (8 - filled_)));
      acc_ = 0;
      filled_ = 0;
    }
    return std::move(out_);
  }

private:
  Bytes out_;
  std::uint8_t acc_ = 0;
  int filled_ = 0;
};

class BitReader {
public:
  explicit BitReader(ByteView data) : data_(data) {}

  bool get()
  {
    if (pos_ >= data_.size() * 8)
      throw Error("entropy: payload truncated");
    bool bit = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return bit;
  }

  std::uint64_t get_bits(int count)
  {
    std::uint64_t v = 0;
    for (int i = 0; i < count; ++i)
      v = (v << 1) | (get() ? 1 : 0);
    return v;
  }

  std::size_t bits_consumed() const { return pos_; }
  std::size_t bits_total() const { return data_.size() * 8; }

  // Remaining bits are byte padding and must be zero.
  bool only_zero_padding_left() const
  {
    if (bits_total() - pos_ >= 8)
      return false;
    for (auto p = pos_; p < bits_total(); ++p)
      if ((data_[p >> 3] >> (7 - (p & 7))) & 1)
        return false;
    return true;
  }

private:
  ByteView data_;
  std::size_t pos_ = 0;
};

//============================================================================
// 32-bit integer arithmetic coder with deferred (E3) bits.
//
// The encoder terminates by emitting all 32 bits of `low`, so the decoder
// reads exactly as many bits as were written; a truncated payload always
// runs out of bits and the final decoder state must match `low`.

namespace entropy_detail {
  inline constexpr std::uint64_t kTop = 0xFFFFFFFFull;
  inline constexpr std::uint64_t kHalf = 0x80000000ull;
  inline constexpr std::uint64_t kQuarter = 0x40000000ull;
  inline constexpr std::uint64_t kThreeQuarters = 0xC0000000ull;
}  // namespace entropy_detail

class ArithmeticEncoder {
public:
  void encode(std::uint32_t cumLow, std::uint32_t count, std::uint32_t total)
  {
    using namespace entropy_detail;
    const std::uint64_t range = high_ - low_ + 1;
    high_ = low_ + range * (cumLow + count) / total - 1;
    low_ = low_ + range * cumLow / total;
    for (;;) {
      if (high_ < kHalf) {
        emit(false);
      }
      else if (low_ >= kHalf) {
        emit(true);
        low_ -= kHalf;
        high_ -= kHalf;
      }
      else if (low_ >= kQuarter && high_ < kThreeQuarters) {
        ++pending_;
        low_ -= kQuarter;
        high_ -= kQuarter;
      }
      else {
        break;
      }
      low_ <<= 1;
      high_ = (high_ << 1) | 1;
    }
  }

  Bytes finish()
  {
    emit((low_ >> 31) & 1);
    bits_.put_bits(low_, 31);
    return bits_.finish();
  }

private:
  void emit(bool bit)
  {
    bits_.put(bit);
    for (; pending_ > 0; --pending_)
      bits_.put(!bit);
  }

  BitWriter bits_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = entropy_detail::kTop;
  std::uint64_t pending_ = 0;
};

class ArithmeticDecoder {
public:
  explicit ArithmeticDecoder(ByteView payload) : bits_(payload)
  {
    value_ = bits_.get_bits(32);
  }

  std::uint32_t target(std::uint32_t total) const
  {
    const std::uint64_t range = high_ - low_ + 1;
    auto t = ((value_ - low_ + 1) * total - 1) / range;
    if (t >= total)
      throw Error("entropy: corrupt payload");
    return std::uint32_t(t);
  }

  void consume(std::uint32_t cumLow, std::uint32_t count, std::uint32_t total)
  {
    using namespace entropy_detail;
    const std::uint64_t range = high_ - low_ + 1;
    high_ = low_ + range * (cumLow + count) / total - 1;
    low_ = low_ + range * cumLow / total;
    if (value_ < low_ || value_ > high_)
      throw Error("entropy: corrupt payload");
    for (;;) {
      if (high_ < kHalf) {
        // lower half: nothing to subtract
      }
      else if (low_ >= kHalf) {
        low_ -= kHalf;
        high_ -= kHalf;
        value_ -= kHalf;
      }
      else if (low_ >= kQuarter && high_ < kThreeQuarters) {
        low_ -= kQuarter;
        high_ -= kQuarter;
        value_ -= kQuarter;
      }
      else {
        break;
      }
      low_ <<= 1;
      high_ = (high_ << 1) | 1;
      value_ = (value_ << 1) | (bits_.get() ? 1 : 0);
    }
  }

  // The terminated stream leaves value == low with only byte padding unread.
  bool finished_cleanly() const
  {
    return value_ == low_ && bits_.only_zero_padding_left();
  }

private:
  BitReader bits_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = entropy_detail::kTop;
  std::uint64_t value_ = 0;
};

//============================================================================
// Adaptive arithmetic coding of a symbol stream.
// Payload layout: [symbol count: u32 LE][arithmetic-coded bytes].

inline Bytes
aac_encode(std::span<const std::uint32_t> symbols, std::uint32_t alphabet)
{
  AdaptiveModel model(alphabet);
  if (symbols.size() > 0xFFFFFFFFull)
    throw Error("aac_encode: too many symbols");

  ByteWriter out;
  out.u32(std::uint32_t(symbols.size()));
  if (symbols.empty())
    return out.take();

  ArithmeticEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const auto s = symbols[i];
    if (s >= alphabet)
      throw Error(
        "aac_encode: symbol " + std::to_string(s) + " at position " + std::to_string(i)
        + " outside alphabet of " + std::to_string(alphabet));
    enc.encode(model.cumulative(s), model.count(s), model.total());
    model.update(s);
  }
  out.bytes(enc.finish());
  return out.take();
}

inline Bytes
aac_encode(const SymbolStream& stream)
{
  return aac_encode(stream.symbols, stream.alphabet_size);
}

inline std::vector<std::uint32_t>
aac_decode_symbols(ByteView payload, std::uint32_t alphabet)
{
  AdaptiveModel model(alphabet);
  ByteReader header(payload, "entropy payload");
  const auto count = header.u32();
  std::vector<std::uint32_t> symbols;
  if (count == 0) {
    if (header.remaining() != 0)
      throw Error("entropy: trailing bytes after empty stream");
    return symbols;
  }
  // A terminated stream is at least 32 bits long.
  if (header.remaining() < 4)
    throw Error("entropy: payload truncated");

  ArithmeticDecoder dec(header.rest());
  // count is untrusted; cap the up-front reservation.
  symbols.reserve(std::min<std::size_t>(count, std::size_t(1) << 20));
  for (std::uint32_t i = 0; i < count; ++i) {
    auto t = dec.target(model.total());
    auto s = model.find(t);
    if (s >= alphabet)
      throw Error("entropy: corrupt payload");
    dec.consume(model.cumulative(s), model.count(s), model.total());
    model.update(s);
    symbols.push_back(s);
  }
  if (!dec.finished_cleanly())
    throw Error("entropy: payload corrupt or has trailing data");
  return symbols;
}

inline SymbolStream
aac_decode(ByteView payload, std::uint32_t alphabet)
{
  return {alphabet, aac_decode_symbols(payload, alphabet)};
}

}  // namespace ggsc
