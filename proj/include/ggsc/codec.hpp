#pragma once

#include "ggsc/colorspace.hpp"
#include "ggsc/geom_codec.hpp"
#include "ggsc/gs_core.hpp"
#include "ggsc/partition.hpp"
#include "ggsc/quantizer.hpp"
#include "ggsc/spectral.hpp"

#include <optional>
#include <string_view>

namespace ggsc {

//============================================================================
// Attribute streams, in bitstream order.

enum class AttributeKind : std::uint8_t { sh_y, sh_u, sh_v, opacity, scale, rotation };

inline constexpr std::size_t kAttributeCount = 6;

inline constexpr std::array<AttributeKind, kAttributeCount> kAttributeKinds = {
  AttributeKind::sh_y,    AttributeKind::sh_u,  AttributeKind::sh_v,
  AttributeKind::opacity, AttributeKind::scale, AttributeKind::rotation,
};

constexpr std::size_t
attribute_components(AttributeKind k)
{
  switch (k) {
  case AttributeKind::sh_y:
  case AttributeKind::sh_u:
  case AttributeKind::sh_v: return kShPerChannel;
  case AttributeKind::opacity: return 1;
  case AttributeKind::scale: return 3;
  case AttributeKind::rotation: return 4;
  }
  return 0;
}

constexpr std::string_view
attribute_name(AttributeKind k)
{
  switch (k) {
  case AttributeKind::sh_y: return "sh_y";
  case AttributeKind::sh_u: return "sh_u";
  case AttributeKind::sh_v: return "sh_v";
  case AttributeKind::opacity: return "opacity";
  case AttributeKind::scale: return "scale";
  case AttributeKind::rotation: return "rotation";
  }
  return "?";
}

//============================================================================

enum class SigmaScope : std::uint8_t {
  global = 0,  // sigma from the whole reconstructed cloud
  leaf = 1,    // sigma from each leaf's own bounding box
};

// The arithmetic coder's alphabet is 2^bits, so attribute depth is capped.
inline constexpr int kMaxAttributeBits = 16;

struct AttributeParams {
  int bits = 10;
  double alpha = 1.0;

  bool operator==(const AttributeParams&) const = default;
};

struct CodecParams {
  int geometry_bits = 14;
  std::array<AttributeParams, kAttributeCount> attributes{};
  std::uint32_t max_leaf = 200;
  SigmaScope sigma_scope = SigmaScope::global;
  ScaleMode scale_mode = ScaleMode::group;

  AttributeParams& operator[](AttributeKind k) { return attributes[std::size_t(k)]; }
  const AttributeParams& operator[](AttributeKind k) const
  {
    return attributes[std::size_t(k)];
  }

  // Set all three SH channels at once.
  void set_sh(AttributeParams p)
  {
    for (auto k : {AttributeKind::sh_y, AttributeKind::sh_u, AttributeKind::sh_v})
      (*this)[k] = p;
  }

  void validate() const
  {
    if (geometry_bits < 1 || geometry_bits > kMaxGeometryBits)
      throw Error(
        "codec: geometry bit depth must lie in 1.." + std::to_string(kMaxGeometryBits));
    for (auto k : kAttributeKinds) {
      const auto& a = (*this)[k];
      if (a.bits < 1 || a.bits > kMaxAttributeBits)
        throw Error(
          "codec: " + std::string(attribute_name(k)) + " bit depth must lie in 1.."
          + std::to_string(kMaxAttributeBits));
      if (!(a.alpha > 0.0 && a.alpha <= 1.0))
        throw Error(
          "codec: " + std::string(attribute_name(k)) + " clipping ratio must lie in (0, 1]");
    }
    if (max_leaf < 1)
      throw Error("codec: max_leaf must be at least 1");
    if (sigma_scope != SigmaScope::global && sigma_scope != SigmaScope::leaf)
      throw Error("codec: invalid sigma scope");
    if (scale_mode != ScaleMode::group && scale_mode != ScaleMode::component)
      throw Error("codec: invalid quantizer scale mode");
  }

  bool operator==(const CodecParams&) const = default;
};

//============================================================================
// Container.  Layout (all little-endian):
//
//   "GGSC" | version u16 | header length u32 | fields | section table
//   | geometry section | 6 attribute sections (kAttributeKinds order)
//
// The header length covers everything before the geometry section, so
// file size == header + B1 + B2.  See docs/bitstream.md.

inline constexpr std::array<char, 4> kMagic = {'G', 'G', 'S', 'C'};
inline constexpr std::uint16_t kStreamVersion = 1;

struct AttributeHeader {
  int bits = 10;
  double alpha = 1.0;
  QuantGrid grid;

  bool operator==(const AttributeHeader&) const = default;
};

struct StreamHeader {
  std::uint32_t count = 0;
  int geometry_bits = 14;
  std::uint32_t max_leaf = 200;
  SigmaScope sigma_scope = SigmaScope::global;
  ScaleMode scale_mode = ScaleMode::group;
  GeometryBackend geometry_backend = GeometryBackend::internal;
  QuantGrid geometry_grid;
  std::array<AttributeHeader, kAttributeCount> attributes{};

  CodecParams params() const
  {
    CodecParams p;
    p.geometry_bits = geometry_bits;
    p.max_leaf = max_leaf;
    p.sigma_scope = sigma_scope;
    p.scale_mode = scale_mode;
    for (std::size_t i = 0; i < kAttributeCount; ++i)
      p.attributes[i] = {attributes[i].bits, attributes[i].alpha};
    return p;
  }

  bool operator==(const StreamHeader&) const = default;
};

namespace codec_detail {

  inline void write_grid(ByteWriter& out, const QuantGrid& g)
  {
    out.u8(std::uint8_t(g.components()));
    for (double v : g.minimum)
      out.f64(v);
    for (double v : g.scale)
      out.f64(v);
  }

  inline QuantGrid read_grid(ByteReader& in, int bits, std::size_t expectedComponents)
  {
    QuantGrid g;
    g.bits = bits;
    const auto n = in.u8();
    if (n != expectedComponents)
      throw Error("stream: unexpected grid component count");
    g.minimum.resize(n);
    g.scale.resize(n);
    for (auto& v : g.minimum)
      v = in.f64();
    for (auto& v : g.scale)
      v = in.f64();
    for (std::size_t c = 0; c < n; ++c)
      if (!std::isfinite(g.minimum[c]) || !std::isfinite(g.scale[c]) || g.scale[c] < 0)
        throw Error("stream: invalid quantization grid");
    return g;
  }

}  // namespace codec_detail

struct CodedStream {
  StreamHeader header;
  Bytes geometry;
  std::array<Bytes, kAttributeCount> attributes;

  Bytes serialize() const
  {
    ByteWriter out;
    for (char c : kMagic)
      out.u8(std::uint8_t(c));
    out.u16(kStreamVersion);
    const auto lengthPos = out.size();
    out.u32(0);

    const auto& h = header;
    out.u32(h.count);
    out.u8(std::uint8_t(h.geometry_bits));
    out.u32(h.max_leaf);
    out.u8(std::uint8_t(h.sigma_scope));
    out.u8(std::uint8_t(h.scale_mode));
    out.u8(std::uint8_t(h.geometry_backend));
    codec_detail::write_grid(out, h.geometry_grid);
    for (const auto& a : h.attributes) {
      out.u8(std::uint8_t(a.bits));
      out.f64(a.alpha);
      codec_detail::write_grid(out, a.grid);
    }
    out.u32(std::uint32_t(geometry.size()));
    for (const auto& a : attributes)
      out.u32(std::uint32_t(a.size()));
    out.patch_u32(lengthPos, std::uint32_t(out.size()));

    out.bytes(geometry);
    for (const auto& a : attributes)
      out.bytes(a);
    return out.take();
  }

  static CodedStream parse(ByteView bytes)
  {
    ByteReader in(bytes, "stream header");
    for (char c : kMagic)
      if (in.u8() != std::uint8_t(c))
        throw Error("stream: bad magic (not a .ggsc file)");
    const auto version = in.u16();
    if (version != kStreamVersion)
      throw Error(
        "stream: unsupported version " + std::to_string(version) + " (expected "
        + std::to_string(kStreamVersion) + ")");
    const auto headerLength = in.u32();

    CodedStream s;
    auto& h = s.header;
    h.count = in.u32();
    h.geometry_bits = in.u8();
    h.max_leaf = in.u32();
    h.sigma_scope = SigmaScope(in.u8());
    h.scale_mode = ScaleMode(in.u8());
    h.geometry_backend = GeometryBackend(in.u8());
    if (h.geometry_bits < 1 || h.geometry_bits > kMaxGeometryBits)
      throw Error("stream: invalid geometry bit depth");
    if (h.geometry_backend != GeometryBackend::internal
        && h.geometry_backend != GeometryBackend::external)
      throw Error("stream: unknown geometry backend");
    h.geometry_grid = codec_detail::read_grid(in, h.geometry_bits, 3);
    for (std::size_t i = 0; i < kAttributeCount; ++i) {
      auto& a = h.attributes[i];
      a.bits = in.u8();
      a.alpha = in.f64();
      if (a.bits < 1 || a.bits > kMaxAttributeBits)
        throw Error("stream: invalid attribute bit depth");
      a.grid = codec_detail::read_grid(in, a.bits, attribute_components(kAttributeKinds[i]));
    }
    h.params().validate();
    if (h.count == 0)
      throw Error("stream: zero primitives");

    std::array<std::uint32_t, 1 + kAttributeCount> lengths;
    for (auto& l : lengths)
      l = in.u32();
    if (in.position() != headerLength)
      throw Error("stream: header length mismatch");

    std::uint64_t payload = 0;
    for (auto l : lengths)
      payload += l;
    if (std::uint64_t(bytes.size()) != headerLength + payload)
      throw Error("stream: section lengths do not match file size");

    auto take = [&](std::uint32_t n) {
      auto v = in.bytes(n);
      return Bytes(v.begin(), v.end());
    };
    s.geometry = take(lengths[0]);
    for (std::size_t i = 0; i < kAttributeCount; ++i)
      s.attributes[i] = take(lengths[1 + i]);
    return s;
  }

  std::size_t header_size() const
  {
    // magic + version + length + fixed fields + grids + section table
    std::size_t n = 4 + 2 + 4 + 4 + 1 + 4 + 1 + 1 + 1;
    n += 1 + 16 * header.geometry_grid.components();
    for (const auto& a : header.attributes)
      n += 1 + 8 + 1 + 16 * a.grid.components();
    n += 4 * (1 + kAttributeCount);
    return n;
  }

  bool operator==(const CodedStream&) const = default;
};

//============================================================================
// B = B1 + B2 accounting.

struct BitrateReport {
  std::size_t header_bytes = 0;
  std::size_t b1_bytes = 0;
  std::array<std::size_t, kAttributeCount> attribute_bytes{};
  std::size_t b2_bytes = 0;
  std::size_t total_bytes = 0;  // header + B1 + B2 == file size
};

inline BitrateReport
bitrate_breakdown(const CodedStream& s)
{
  BitrateReport r;
  r.header_bytes = s.header_size();
  r.b1_bytes = s.geometry.size();
  for (std::size_t i = 0; i < kAttributeCount; ++i) {
    r.attribute_bytes[i] = s.attributes[i].size();
    r.b2_bytes += s.attributes[i].size();
  }
  r.total_bytes = r.header_bytes + r.b1_bytes + r.b2_bytes;
  return r;
}

//============================================================================

struct CodecOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  std::optional<ExternalGeometryCodec> external_geometry;
};

// Per-primitive attribute values, primitive-major: value(i, c).
struct AttributeTable {
  std::size_t components = 1;
  std::vector<double> values;

  double& at(std::size_t i, std::size_t c) { return values[i * components + c]; }
  double at(std::size_t i, std::size_t c) const { return values[i * components + c]; }
};

// Intermediate state exposed for verification.  Coefficient rows are
// stored in stream order: row (leaf * components + component).
struct CodecTrace {
  std::vector<Point3u> quantized_centers;  // Morton order
  std::vector<std::uint32_t> order;        // input index of each output primitive
  std::vector<Vec3> reconstructed_centers;
  Partition partition;
  std::vector<double> sigmas;  // per leaf
  std::vector<GraphSpectrum> spectra;
  std::array<std::vector<std::vector<double>>, kAttributeCount> coefficients;  // full rows
  std::array<std::vector<std::vector<double>>, kAttributeCount> dequantized;   // kept rows
  GaussianCloud reconstruction;
};

namespace codec_detail {

  inline std::array<AttributeTable, kAttributeCount> attribute_tables(const GaussianCloud& c)
  {
    std::array<AttributeTable, kAttributeCount> t;
    const auto n = c.size();
    for (auto k : kAttributeKinds) {
      auto& tab = t[std::size_t(k)];
      tab.components = attribute_components(k);
      tab.values.resize(n * tab.components);
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto yuv = sh_rgb_to_yuv(sh_triple_from_coeffs(c.sh[i]));
      for (std::size_t ch = 0; ch < kShChannels; ++ch)
        for (std::size_t k = 0; k < kShPerChannel; ++k)
          t[ch].at(i, k) = yuv.channel[ch][k];
      t[3].at(i, 0) = c.opacity[i];
      for (std::size_t k = 0; k < 3; ++k)
        t[4].at(i, k) = c.scale[i][k];
      for (std::size_t k = 0; k < 4; ++k)
        t[5].at(i, k) = c.rotation[i][k];
    }
    return t;
  }

  inline void apply_attribute_tables(
    const std::array<AttributeTable, kAttributeCount>& t, GaussianCloud& c)
  {
    for (std::size_t i = 0; i < c.size(); ++i) {
      ShTriple yuv;
      yuv.space = ColorSpace::yuv;
      for (std::size_t ch = 0; ch < kShChannels; ++ch)
        for (std::size_t k = 0; k < kShPerChannel; ++k)
          yuv.channel[ch][k] = t[ch].at(i, k);
      c.sh[i] = sh_triple_to_coeffs(sh_yuv_to_rgb(yuv));
      c.opacity[i] = t[3].at(i, 0);
      for (std::size_t k = 0; k < 3; ++k)
        c.scale[i][k] = t[4].at(i, k);
      for (std::size_t k = 0; k < 4; ++k)
        c.rotation[i][k] = t[5].at(i, k);
    }
  }

  inline std::vector<Vec3> dequantize_centers(
    std::span<const Point3u> pts, const QuantGrid& grid)
  {
    std::vector<Vec3> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t k = 0; k < 3; ++k)
        out[i][k] = dequantize(pts[i][k], grid, k);
    return out;
  }

  struct Geometry {
    QuantGrid grid;
    std::vector<Point3u> points;       // Morton order
    std::vector<std::uint32_t> order;  // input index per Morton position
  };

  inline Geometry quantize_geometry(const GaussianCloud& cloud, const CodecParams& p)
  {
    Geometry g;
    std::vector<std::vector<double>> cols(3, std::vector<double>(cloud.size()));
    for (std::size_t i = 0; i < cloud.size(); ++i)
      for (std::size_t k = 0; k < 3; ++k)
        cols[k][i] = cloud.centers[i][k];
    g.grid = fit_grid(cols, p.geometry_bits, p.scale_mode);

    std::vector<Point3u> raw(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
      for (std::size_t k = 0; k < 3; ++k)
        raw[i][k] = quantize(cloud.centers[i][k], g.grid, k);
    g.order = morton_order(raw, p.geometry_bits);
    g.points.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
      g.points[i] = raw[g.order[i]];
    return g;
  }

  // Leaf graphs and spectra, recomputed identically on both sides.
  struct Graphs {
    Partition partition;
    std::vector<double> sigmas;
    std::vector<GraphSpectrum> spectra;
  };

  inline Graphs build_graphs(
    std::span<const Vec3> centers,
    std::uint32_t maxLeaf,
    SigmaScope scope,
    unsigned threads)
  {
    Graphs g;
    g.partition = kdtree_split(centers, maxLeaf);
    const auto leaves = g.partition.leaves.size();
    g.sigmas.resize(leaves);
    g.spectra.resize(leaves);
    const double globalSigma = sigma_from_bbox(bounding_box(centers));
    parallel_for(leaves, threads, [&](std::size_t li) {
      const auto& leaf = g.partition.leaves[li];
      std::vector<Vec3> pts(leaf.size());
      for (std::size_t j = 0; j < leaf.size(); ++j)
        pts[j] = centers[leaf[j]];
      g.sigmas[li] =
        scope == SigmaScope::global ? globalSigma : sigma_from_bbox(bounding_box(pts));
      g.spectra[li] = leaf_spectrum(pts, g.sigmas[li]);
    });
    return g;
  }

  // Dequantize one attribute stream and invert the transform per leaf.
  // Shared by the decoder and the encoder's local decode.
  inline AttributeTable reconstruct_attribute(
    const Graphs& graphs,
    std::span<const std::uint32_t> symbols,
    const AttributeHeader& ah,
    std::size_t components,
    std::size_t count,
    std::vector<std::vector<double>>* dequantizedRows)
  {
    AttributeTable tab;
    tab.components = components;
    tab.values.assign(count * components, 0.0);
    const auto& leaves = graphs.partition.leaves;

    std::size_t pos = 0;
    if (dequantizedRows)
      dequantizedRows->clear();
    for (std::size_t li = 0; li < leaves.size(); ++li) {
      const auto m = leaves[li].size();
      const auto kept = clip_count(ah.alpha, m);
      for (std::size_t c = 0; c < components; ++c) {
        if (symbols.size() - pos < kept)
          throw Error("decode: attribute stream too short");
        std::vector<double> row(kept);
        for (std::size_t j = 0; j < kept; ++j)
          row[j] = dequantize(symbols[pos++], ah.grid, c);
        auto signal = igft(graphs.spectra[li], zero_pad(row, m));
        for (std::size_t j = 0; j < m; ++j)
          tab.at(leaves[li][j], c) = signal[j];
        if (dequantizedRows)
          dequantizedRows->push_back(std::move(row));
      }
    }
    if (pos != symbols.size())
      throw Error("decode: attribute stream has extra symbols");
    return tab;
  }

}  // namespace codec_detail

// Morton-canonical order the encoder imposes on a cloud (the order decoded
// clouds come back in).
inline GaussianCloud
canonicalize(const GaussianCloud& cloud, const CodecParams& params)
{
  validate(cloud);
  params.validate();
  auto g = codec_detail::quantize_geometry(cloud, params);
  return permuted(cloud, g.order);
}

//============================================================================

inline CodedStream
encode(
  const GaussianCloud& input,
  const CodecParams& params,
  const CodecOptions& options = {},
  CodecTrace* trace = nullptr)
{
  using namespace codec_detail;
  validate(input);
  params.validate();
  if (input.size() > 0xFFFFFFFFull)
    throw Error("encode: too many primitives");

  // Geometry: quantize, canonical order, reconstruct.
  auto geom = quantize_geometry(input, params);
  const auto cloud = permuted(input, geom.order);
  const auto centers = dequantize_centers(geom.points, geom.grid);
  const auto n = cloud.size();

  auto graphs = build_graphs(centers, params.max_leaf, params.sigma_scope, options.threads);
  const auto& leaves = graphs.partition.leaves;

  CodedStream stream;
  auto& h = stream.header;
  h.count = std::uint32_t(n);
  h.geometry_bits = params.geometry_bits;
  h.max_leaf = params.max_leaf;
  h.sigma_scope = params.sigma_scope;
  h.scale_mode = params.scale_mode;
  h.geometry_grid = geom.grid;

  const auto tables = attribute_tables(cloud);
  std::array<AttributeTable, kAttributeCount> recon;

  for (auto kind : kAttributeKinds) {
    const auto ki = std::size_t(kind);
    const auto comps = attribute_components(kind);
    const auto& ap = params[kind];
    const auto& tab = tables[ki];

    // Forward transform of every (leaf, component) signal.
    std::vector<std::vector<double>> rows(leaves.size() * comps);
    parallel_for(leaves.size(), options.threads, [&](std::size_t li) {
      const auto& leaf = leaves[li];
      std::vector<double> f(leaf.size());
      for (std::size_t c = 0; c < comps; ++c) {
        for (std::size_t j = 0; j < leaf.size(); ++j)
          f[j] = tab.at(leaf[j], c);
        rows[li * comps + c] = gft(graphs.spectra[li], f);
      }
    });

    // Grid over the kept coefficients, one column per component.
    std::vector<std::vector<double>> columns(comps);
    for (std::size_t li = 0; li < leaves.size(); ++li) {
      const auto kept = clip_count(ap.alpha, leaves[li].size());
      for (std::size_t c = 0; c < comps; ++c) {
        const auto& row = rows[li * comps + c];
        columns[c].insert(columns[c].end(), row.begin(), row.begin() + kept);
      }
    }
    auto& ah = h.attributes[ki];
    ah.bits = ap.bits;
    ah.alpha = ap.alpha;
    ah.grid = fit_grid(columns, ap.bits, params.scale_mode);

    std::vector<std::uint32_t> symbols;
    for (std::size_t li = 0; li < leaves.size(); ++li) {
      const auto kept = clip_count(ap.alpha, leaves[li].size());
      for (std::size_t c = 0; c < comps; ++c)
        for (std::size_t j = 0; j < kept; ++j)
          symbols.push_back(quantize(rows[li * comps + c][j], ah.grid, c));
    }
    stream.attributes[ki] = aac_encode(symbols, std::uint32_t(1) << ap.bits);

    if (trace) {
      recon[ki] = reconstruct_attribute(
        graphs, symbols, ah, comps, n, &trace->dequantized[ki]);
      trace->coefficients[ki] = std::move(rows);
    }
  }

  QuantizedGeometry qg{params.geometry_bits, geom.points};
  if (options.external_geometry && !options.external_geometry->encode_command.empty()) {
    h.geometry_backend = GeometryBackend::external;
    auto opaque = external_encode_centers(qg, options.external_geometry->encode_command);
    ByteWriter w;
    w.u8(std::uint8_t(GeometryBackend::external));
    w.u32(std::uint32_t(opaque.size()));
    w.bytes(opaque);
    stream.geometry = w.take();
  }
  else {
    h.geometry_backend = GeometryBackend::internal;
    stream.geometry = encode_centers(qg);
  }

  if (trace) {
    trace->quantized_centers = geom.points;
    trace->order = geom.order;
    trace->reconstructed_centers = centers;
    trace->partition = graphs.partition;
    trace->sigmas = graphs.sigmas;
    trace->spectra = graphs.spectra;
    GaussianCloud local;
    local.resize(n);
    local.centers = centers;
    apply_attribute_tables(recon, local);
    trace->reconstruction = std::move(local);
  }
  return stream;
}

//============================================================================

inline GaussianCloud
decode(const CodedStream& stream, const CodecOptions& options = {}, CodecTrace* trace = nullptr)
{
  using namespace codec_detail;
  const auto& h = stream.header;
  h.params().validate();

  QuantizedGeometry qg;
  if (h.geometry_backend == GeometryBackend::external) {
    ByteReader in(stream.geometry, "external geometry section");
    if (in.u8() != std::uint8_t(GeometryBackend::external))
      throw Error("decode: external geometry section has wrong tag");
    auto opaque = in.bytes(in.u32());
    if (in.remaining() != 0)
      throw Error("decode: trailing bytes in external geometry section");
    if (!options.external_geometry || options.external_geometry->decode_command.empty())
      throw Error("decode: stream uses an external geometry codec but none is configured");
    qg = external_decode_centers(
      opaque, h.geometry_bits, options.external_geometry->decode_command);
  }
  else {
    qg = decode_centers(stream.geometry, h.geometry_bits);
  }
  if (qg.points.size() != h.count)
    throw Error(
      "decode: geometry holds " + std::to_string(qg.points.size())
      + " points but header declares " + std::to_string(h.count));

  const auto centers = dequantize_centers(qg.points, h.geometry_grid);
  auto graphs = build_graphs(centers, h.max_leaf, h.sigma_scope, options.threads);

  std::array<AttributeTable, kAttributeCount> tables;
  for (auto kind : kAttributeKinds) {
    const auto ki = std::size_t(kind);
    const auto& ah = h.attributes[ki];
    auto symbols = aac_decode_symbols(stream.attributes[ki], std::uint32_t(1) << ah.bits);
    tables[ki] = reconstruct_attribute(
      graphs, symbols, ah, attribute_components(kind), h.count,
      trace ? &trace->dequantized[ki] : nullptr);
  }

  GaussianCloud out;
  out.resize(h.count);
  out.centers = centers;
  apply_attribute_tables(tables, out);

  if (trace) {
    trace->quantized_centers = qg.points;
    trace->reconstructed_centers = centers;
    trace->partition = std::move(graphs.partition);
    trace->sigmas = std::move(graphs.sigmas);
    trace->spectra = std::move(graphs.spectra);
    trace->reconstruction = out;
  }
  return out;
}

inline GaussianCloud
decode(ByteView bytes, const CodecOptions& options = {}, CodecTrace* trace = nullptr)
{
  return decode(CodedStream::parse(bytes), options, trace);
}

}  // namespace ggsc
