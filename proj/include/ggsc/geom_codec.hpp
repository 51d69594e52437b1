#pragma once

#include "ggsc/entropy.hpp"
#include "ggsc/partition.hpp"
#include "ggsc/ply.hpp"

#include <cstdlib>
#include <filesystem>
#include <random>

namespace ggsc {

// Quantized primitive centers in Morton order (duplicates allowed).
struct QuantizedGeometry {
  int bits = 1;
  std::vector<Point3u> points;

  bool operator==(const QuantizedGeometry&) const = default;
};

enum class GeometryBackend : std::uint8_t {
  internal = 0,
  external = 1,
};

namespace geom_detail {

  inline constexpr std::uint32_t kBucketAlphabet = 128;

  inline Point3u demorton(std::uint64_t code, int bits)
  {
    Point3u p{0, 0, 0};
    for (int i = 0; i < bits; ++i) {
      p[2] |= std::uint32_t((code >> (3 * i)) & 1) << i;
      p[1] |= std::uint32_t((code >> (3 * i + 1)) & 1) << i;
      p[0] |= std::uint32_t((code >> (3 * i + 2)) & 1) << i;
    }
    return p;
  }

  inline void check_bits(int bits)
  {
    if (bits < 1 || bits > kMaxGeometryBits)
      throw Error(
        "geometry: bit depth " + std::to_string(bits) + " out of range 1.."
        + std::to_string(kMaxGeometryBits));
  }

}  // namespace geom_detail

//============================================================================
// Lossless coding of Morton-sorted quantized centers.
//
// Successive Morton codes are delta coded.  Each delta d is split into a
// bucket (bit length of d, 0 for d == 0) coded with the adaptive arithmetic
// coder, and the bits of d below its leading one, written raw.
//
// Payload: [count u32][bits u8][bucket payload length u32]
//          [bucket payload][raw remainder bits, MSB first, zero padded]

inline Bytes
encode_centers(const QuantizedGeometry& g)
{
  geom_detail::check_bits(g.bits);
  if (g.points.empty())
    throw Error("encode_centers: no points");

  const std::uint64_t limit = std::uint64_t(1) << g.bits;
  std::vector<std::uint32_t> buckets;
  buckets.reserve(g.points.size());
  BitWriter raw;
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    for (auto c : g.points[i])
      if (c >= limit)
        throw Error("encode_centers: coordinate overflow at point " + std::to_string(i));
    auto code = morton_code(g.points[i], g.bits);
    if (code < prev)
      throw Error("encode_centers: points are not in Morton order");
    auto delta = code - prev;
    prev = code;
    int len = int(std::bit_width(delta));
    buckets.push_back(std::uint32_t(len));
    if (len > 1)
      raw.put_bits(delta, len - 1);
  }

  auto coded = aac_encode(buckets, geom_detail::kBucketAlphabet);
  ByteWriter out;
  out.u32(std::uint32_t(g.points.size()));
  out.u8(std::uint8_t(g.bits));
  out.u32(std::uint32_t(coded.size()));
  out.bytes(coded);
  out.bytes(raw.finish());
  return out.take();
}

inline QuantizedGeometry
decode_centers(ByteView payload)
{
  ByteReader in(payload, "geometry payload");
  const auto count = in.u32();
  const int bits = in.u8();
  geom_detail::check_bits(bits);
  if (count == 0)
    throw Error("decode_centers: zero points");
  const auto codedLen = in.u32();
  auto buckets = aac_decode_symbols(in.bytes(codedLen), geom_detail::kBucketAlphabet);
  if (buckets.size() != count)
    throw Error("decode_centers: bucket count mismatch");

  const std::uint64_t codeLimit = std::uint64_t(1) << (3 * bits);
  BitReader raw(in.rest());
  QuantizedGeometry g;
  g.bits = bits;
  g.points.reserve(count);
  std::uint64_t code = 0;
  for (auto len : buckets) {
    if (len > std::uint32_t(3 * bits))
      throw Error("decode_centers: corrupt delta bucket");
    std::uint64_t delta = 0;
    if (len > 0)
      delta = (std::uint64_t(1) << (len - 1)) | raw.get_bits(int(len) - 1);
    code += delta;
    if (code >= codeLimit)
      throw Error("decode_centers: Morton code overflow");
    g.points.push_back(geom_detail::demorton(code, bits));
  }
  if (!raw.only_zero_padding_left())
    throw Error("decode_centers: trailing data in payload");
  return g;
}

inline QuantizedGeometry
decode_centers(ByteView payload, int expectedBits)
{
  auto g = decode_centers(payload);
  if (g.bits != expectedBits)
    throw Error("decode_centers: bit depth does not match stream header");
  return g;
}

//============================================================================
// External geometry codec hook.
//
// The encode command receives {in_ply} (quantized centers as a binary PLY
// with float x, y, z) and must write {out_bin}.  The decode command receives
// {in_bin} and must write {out_ply} in the same PLY form.  Output points
// are re-sorted into Morton order, so the external codec may reorder them.

struct ExternalGeometryCodec {
  std::string encode_command;
  std::string decode_command;
};

namespace geom_detail {

  class TempDir {
  public:
    TempDir()
    {
      std::random_device rd;
      std::mt19937_64 rng(rd());
      for (int attempt = 0; attempt < 16; ++attempt) {
        auto candidate = std::filesystem::temp_directory_path()
          / ("ggsc-" + std::to_string(rng()));
        if (std::filesystem::create_directory(candidate)) {
          path_ = candidate;
          return;
        }
      }
      throw Error("external geometry codec: cannot create temporary directory");
    }
    ~TempDir()
    {
      std::error_code ec;
      std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
  };

  inline std::string substitute(
    std::string cmd, std::initializer_list<std::pair<std::string, std::string>> vars)
  {
    for (const auto& [key, value] : vars) {
      for (auto pos = cmd.find(key); pos != std::string::npos;
           pos = cmd.find(key, pos + value.size()))
        cmd.replace(pos, key.size(), "'" + value + "'");
    }
    return cmd;
  }

  inline void run(const std::string& cmd)
  {
    int rc = std::system(cmd.c_str());
    if (rc != 0)
      throw Error(
        "external geometry codec failed (status " + std::to_string(rc) + "): " + cmd);
  }

  inline Bytes positions_ply(const QuantizedGeometry& g)
  {
    ByteWriter out;
    out.text(
      "ply\nformat binary_little_endian 1.0\nelement vertex "
      + std::to_string(g.points.size())
      + "\nproperty float x\nproperty float y\nproperty float z\nend_header\n");
    for (const auto& p : g.points)
      for (auto c : p)
        out.f32(float(c));
    return out.take();
  }

}  // namespace geom_detail

inline Bytes
external_encode_centers(const QuantizedGeometry& g, const std::string& command)
{
  if (command.empty())
    throw Error("external geometry codec: no encode command configured");
  geom_detail::TempDir dir;
  auto in = dir.path() / "centers.ply";
  auto out = dir.path() / "centers.bin";
  write_file(in, geom_detail::positions_ply(g));
  geom_detail::run(
    geom_detail::substitute(command, {{"{in_ply}", in.string()}, {"{out_bin}", out.string()}}));
  return read_file(out);
}

inline QuantizedGeometry
external_decode_centers(ByteView opaque, int bits, const std::string& command)
{
  geom_detail::check_bits(bits);
  if (command.empty())
    throw Error("external geometry codec: no decode command configured");
  geom_detail::TempDir dir;
  auto in = dir.path() / "centers.bin";
  auto out = dir.path() / "centers.ply";
  write_file(in, opaque);
  geom_detail::run(
    geom_detail::substitute(command, {{"{in_bin}", in.string()}, {"{out_ply}", out.string()}}));

  static const std::string xyz[] = {"x", "y", "z"};
  std::size_t n = 0;
  auto table = read_ply_vertices(read_file(out), xyz, &n);
  const double limit = double(std::uint64_t(1) << bits);
  std::vector<Point3u> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) {
      double v = table[i * 3 + k];
      if (v < 0 || v >= limit || v != std::floor(v))
        throw Error("external geometry codec: decoded coordinate out of range");
      pts[i][k] = std::uint32_t(v);
    }
  }
  auto order = morton_order(pts, bits);
  QuantizedGeometry g;
  g.bits = bits;
  g.points.reserve(n);
  for (auto i : order)
    g.points.push_back(pts[i]);
  return g;
}

}  // namespace ggsc
