#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace ggsc {

using Vec3 = std::array<double, 3>;
using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// All module failures surface as ggsc::Error.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//============================================================================
// Little-endian byte serialization.

class ByteWriter {
public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void f32(float v) { put(v); }
  void f64(double v) { put(v); }

  void bytes(ByteView b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void text(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

  std::size_t size() const { return buf_.size(); }
  Bytes& buffer() { return buf_; }
  Bytes take() { return std::move(buf_); }

  // Overwrite a previously reserved u32 at @pos.
  void patch_u32(std::size_t pos, std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i)
      buf_.at(pos + i) = std::uint8_t(v >> (8 * i));
  }

private:
  template<typename T>
  void put(T v)
  {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<std::uint8_t, sizeof(T)> raw;
    std::memcpy(raw.data(), &v, sizeof(T));
    // Host is assumed little-endian; checked at compile time below.
    buf_.insert(buf_.end(), raw.begin(), raw.end());
  }

  Bytes buf_;
};

static_assert(
  std::endian::native == std::endian::little,
  "ggsc serializes by memcpy and requires a little-endian host");

class ByteReader {
public:
  explicit ByteReader(ByteView data, std::string context = "stream")
    : data_(data), context_(std::move(context))
  {}

  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  float f32() { return get<float>(); }
  double f64() { return get<double>(); }

  ByteView bytes(std::size_t n)
  {
    require(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  ByteView rest() const { return data_.subspan(pos_); }

private:
  void require(std::size_t n) const
  {
    if (data_.size() - pos_ < n)
      throw Error(context_ + ": truncated (need " + std::to_string(n)
                  + " bytes at offset " + std::to_string(pos_) + ")");
  }

  template<typename T>
  T get()
  {
    require(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  ByteView data_;
  std::size_t pos_ = 0;
  std::string context_;
};

//============================================================================

inline Bytes
read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open '" + path.string() + "' for reading");
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

inline void
write_file(const std::filesystem::path& path, ByteView data)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
  if (!out)
    throw Error("write to '" + path.string() + "' failed");
}

//============================================================================
// Run fn(i) for i in [0, n) on up to @threads workers.  Each index is
// processed exactly once; callers write results into index-addressed slots
// so output order never depends on scheduling.

template<typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          }
          catch (...) {
            std::lock_guard lock(failureMutex);
            if (!failure)
              failure = std::current_exception();
            next.store(n);
          }
        }
      });
    }
  }
  if (failure)
    std::rethrow_exception(failure);
}

}  // namespace ggsc
