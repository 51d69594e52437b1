#include "ggsc/codec.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <numeric>
#include <random>
#include <set>

using namespace ggsc;

namespace {

CodecParams
fine_params()
{
  CodecParams p;
  for (auto& a : p.attributes)
    a = {16, 1.0};
  return p;
}

Bytes
encode_bytes(const GaussianCloud& c, const CodecParams& p, CodecTrace* trace = nullptr)
{
  return encode(c, p, {}, trace).serialize();
}

// Squared distance between two attribute tables of the codec.
double
sq_error(const AttributeTable& a, const AttributeTable& b)
{
  double s = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    s += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
  return s;
}

}  // namespace

TEST(Codec, DefaultParams)
{
  CodecParams p;
  EXPECT_EQ(p.geometry_bits, 14);
  EXPECT_EQ(p.max_leaf, 200u);
  EXPECT_EQ(p.sigma_scope, SigmaScope::global);
  EXPECT_EQ(p.scale_mode, ScaleMode::group);
  for (const auto& a : p.attributes) {
    EXPECT_EQ(a.bits, 10);
    EXPECT_EQ(a.alpha, 1.0);
  }
}

TEST(Codec, ParamValidation)
{
  auto c = test::synthetic_cloud(10, 1);
  CodecParams p;
  p.geometry_bits = 0;
  EXPECT_THROW(encode(c, p), Error);
  p = {};
  p[AttributeKind::opacity].alpha = 0;
  EXPECT_THROW(encode(c, p), Error);
  p = {};
  p[AttributeKind::scale].bits = 17;
  EXPECT_THROW(encode(c, p), Error);
  p = {};
  p.max_leaf = 0;
  EXPECT_THROW(encode(c, p), Error);
  EXPECT_THROW(encode(GaussianCloud{}, CodecParams{}), Error);
}

TEST(Codec, SinglePrimitive)
{
  auto c = test::random_cloud(1, 2);
  auto s = encode(c, CodecParams{});
  for (const auto& a : s.attributes)
    EXPECT_GE(a.size(), 4u);
  auto out = decode(ByteView(s.serialize()));
  ASSERT_EQ(out.size(), 1u);
  // A single value fits its grid exactly (s = 0).
  EXPECT_EQ(out.centers[0], c.centers[0]);
  EXPECT_EQ(out.opacity[0], c.opacity[0]);
  for (std::size_t k = 0; k < kShCount; ++k)
    EXPECT_NEAR(out.sh[0][k], c.sh[0][k], 1e-12);
}

TEST(Codec, LosslessPathWithinQuantizationBounds)
{
  auto c = test::synthetic_cloud(3000, 3);
  auto p = fine_params();
  CodecTrace trace;
  auto bytes = encode_bytes(c, p, &trace);
  auto stream = CodedStream::parse(bytes);
  const auto& h = stream.header;

  // Geometry is exact at quantized precision.
  auto out = decode(ByteView(bytes));
  auto ref = canonicalize(c, p);
  for (std::size_t i = 0; i < ref.size(); ++i)
    for (std::size_t k = 0; k < 3; ++k) {
      double expect = dequantize(quantize(ref.centers[i][k], h.geometry_grid, k), h.geometry_grid, k);
      EXPECT_EQ(out.centers[i][k], expect);
      EXPECT_LE(std::fabs(out.centers[i][k] - ref.centers[i][k]), h.geometry_grid.error_bound(k) + 1e-12);
    }

  // Every coded coefficient lies within its quantizer bound.
  for (auto kind : kAttributeKinds) {
    const auto ki = std::size_t(kind);
    const auto comps = attribute_components(kind);
    const auto& grid = h.attributes[ki].grid;
    ASSERT_EQ(trace.coefficients[ki].size(), trace.dequantized[ki].size());
    for (std::size_t r = 0; r < trace.coefficients[ki].size(); ++r) {
      const auto& full = trace.coefficients[ki][r];
      const auto& kept = trace.dequantized[ki][r];
      ASSERT_EQ(full.size(), kept.size());
      for (std::size_t j = 0; j < kept.size(); ++j)
        EXPECT_LE(std::fabs(full[j] - kept[j]), grid.error_bound(r % comps) + 1e-12);
    }
  }
}

TEST(Codec, EncoderLocalDecodeEqualsDecoder)
{
  auto c = test::synthetic_cloud(2500, 4);
  CodecParams p;
  p[AttributeKind::sh_u].alpha = 0.3;
  p[AttributeKind::rotation].bits = 6;
  CodecTrace enc, dec;
  auto bytes = encode_bytes(c, p, &enc);
  auto out = decode(ByteView(bytes), {}, &dec);
  EXPECT_EQ(enc.partition, dec.partition);
  EXPECT_EQ(enc.sigmas, dec.sigmas);
  ASSERT_EQ(enc.spectra.size(), dec.spectra.size());
  for (std::size_t i = 0; i < enc.spectra.size(); ++i)
    EXPECT_TRUE(enc.spectra[i] == dec.spectra[i]) << "leaf " << i;
  EXPECT_EQ(enc.dequantized, dec.dequantized);
  EXPECT_EQ(enc.reconstruction, out);
  EXPECT_EQ(decode(ByteView(bytes)), out);
}

TEST(Codec, DeterministicBytesAcrossRunsAndThreadCounts)
{
  auto c = test::synthetic_cloud(2000, 5);
  CodecParams p;
  p.set_sh({8, 0.5});
  auto threads = [](unsigned n) {
    CodecOptions o;
    o.threads = n;
    return o;
  };
  auto a = encode(c, p, threads(1)).serialize();
  auto b = encode(c, p, threads(4)).serialize();
  auto d = encode(c, p, threads(0)).serialize();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
  EXPECT_EQ(decode(ByteView(a), threads(1)), decode(ByteView(a), threads(3)));
}

TEST(Codec, OutputIsMortonCanonical)
{
  auto c = test::random_cloud(1500, 6);
  CodecTrace t;
  encode(c, CodecParams{}, {}, &t);
  for (std::size_t i = 1; i < t.quantized_centers.size(); ++i)
    EXPECT_LE(morton_code(t.quantized_centers[i - 1], 14), morton_code(t.quantized_centers[i], 14));
  // Shuffled input encodes to the same stream when centers are distinct.
  std::vector<std::uint32_t> order(c.size());
  std::iota(order.begin(), order.end(), 0u);
  std::mt19937 rng(1);
  std::shuffle(order.begin(), order.end(), rng);
  auto shuffled = permuted(c, order);
  std::set<std::array<std::uint32_t, 3>> distinct(t.quantized_centers.begin(), t.quantized_centers.end());
  ASSERT_EQ(distinct.size(), c.size());
  EXPECT_EQ(encode_bytes(shuffled, CodecParams{}), encode_bytes(c, CodecParams{}));
}

TEST(Codec, ClippingShrinksSections)
{
  auto c = test::synthetic_cloud(5000, 7);
  CodecParams full;
  auto base = encode(c, full);
  CodecParams sh = full;
  sh[AttributeKind::sh_y].alpha = 0.5;
  auto clipped = encode(c, sh);
  EXPECT_LT(bitrate_breakdown(clipped).b2_bytes, bitrate_breakdown(base).b2_bytes);

  CodecParams op = full;
  op[AttributeKind::opacity].alpha = 0.1;
  auto o = encode(c, op);
  const auto oi = std::size_t(AttributeKind::opacity);
  EXPECT_LT(o.attributes[oi].size(), base.attributes[oi].size());
}

TEST(Codec, RateNonIncreasingInAlphaAndDepth)
{
  auto c = test::synthetic_cloud(3000, 8);
  for (auto kind : kAttributeKinds) {
    std::size_t prev = SIZE_MAX;
    for (double alpha : {1.0, 0.7, 0.4, 0.1}) {
      CodecParams p;
      p[kind].alpha = alpha;
      auto total = bitrate_breakdown(encode(c, p)).total_bytes;
      EXPECT_LE(total, prev) << attribute_name(kind) << " alpha " << alpha;
      prev = total;
    }
    prev = SIZE_MAX;
    for (int bits : {14, 10, 6, 3}) {
      CodecParams p;
      p[kind].bits = bits;
      auto total = bitrate_breakdown(encode(c, p)).total_bytes;
      EXPECT_LE(total, prev) << attribute_name(kind) << " q " << bits;
      prev = total;
    }
  }
}

TEST(Codec, AccountingReconcilesWithFileSize)
{
  for (std::size_t n : {1u, 10u, 777u}) {
    auto c = test::random_cloud(n, 9 + n);
    auto s = encode(c, CodecParams{});
    auto bytes = s.serialize();
    auto r = bitrate_breakdown(s);
    EXPECT_EQ(r.header_bytes + r.b1_bytes + r.b2_bytes, bytes.size());
    EXPECT_EQ(r.total_bytes, bytes.size());
    EXPECT_EQ(r.b1_bytes, s.geometry.size());
    // The header length field equals the accounted header size.
    std::uint32_t hl;
    std::memcpy(&hl, bytes.data() + 6, 4);
    EXPECT_EQ(hl, r.header_bytes);
    EXPECT_EQ(CodedStream::parse(bytes), s);
  }
}

TEST(Codec, MseDecomposesIntoDiscardedAndQuantizationEnergy)
{
  auto c = test::synthetic_cloud(2000, 10);
  CodecParams p;
  p.set_sh({9, 0.4});
  p[AttributeKind::scale] = {7, 0.6};
  CodecTrace t;
  encode(c, p, {}, &t);
  auto ref = codec_detail::attribute_tables(canonicalize(c, p));
  auto rec = codec_detail::attribute_tables(t.reconstruction);
  for (auto kind : kAttributeKinds) {
    const auto ki = std::size_t(kind);
    double predicted = 0;
    for (std::size_t r = 0; r < t.coefficients[ki].size(); ++r) {
      const auto& full = t.coefficients[ki][r];
      const auto& kept = t.dequantized[ki][r];
      for (std::size_t j = 0; j < full.size(); ++j) {
        double e = full[j] - (j < kept.size() ? kept[j] : 0.0);
        predicted += e * e;
      }
    }
    double actual = sq_error(ref[ki], rec[ki]);
    EXPECT_NEAR(actual, predicted, 1e-6 * predicted + 1e-18) << attribute_name(kind);
  }
}

TEST(Codec, AlternativeScopesRoundTrip)
{
  auto c = test::synthetic_cloud(1200, 11);
  for (auto scope : {SigmaScope::global, SigmaScope::leaf})
    for (auto mode : {ScaleMode::group, ScaleMode::component}) {
      CodecParams p;
      p.sigma_scope = scope;
      p.scale_mode = mode;
      p.max_leaf = 64;
      CodecTrace t;
      auto bytes = encode_bytes(c, p, &t);
      auto s = CodedStream::parse(bytes);
      EXPECT_EQ(s.header.params(), p);
      EXPECT_EQ(decode(ByteView(bytes)), t.reconstruction);
      for (const auto& leaf : t.partition.leaves)
        EXPECT_LE(leaf.size(), 64u);
    }
}

TEST(Codec, StreamCorruptionRejected)
{
  auto c = test::synthetic_cloud(400, 12);
  auto bytes = encode_bytes(c, CodecParams{});

  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode(ByteView(bad)), Error);
  bad = bytes;
  bad[4] = 2;  // version
  try {
    decode(ByteView(bad));
    FAIL();
  }
  catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  EXPECT_THROW(decode(ByteView(bytes).first(bytes.size() - 1)), Error);
  EXPECT_THROW(decode(ByteView(bytes).first(20)), Error);
  bad = bytes;
  bad.push_back(0);
  EXPECT_THROW(decode(ByteView(bad)), Error);

  // Flip bytes inside each payload section.
  auto s = CodedStream::parse(bytes);
  const auto header = bitrate_breakdown(s).header_bytes;
  std::size_t caught = 0, trials = 0;
  std::mt19937 rng(3);
  for (int t = 0; t < 60; ++t) {
    bad = bytes;
    auto pos = header + rng() % (bytes.size() - header);
    bad[pos] ^= 0x5a;
    ++trials;
    try {
      auto out = decode(ByteView(bad));
      EXPECT_EQ(out.size(), c.size());
    }
    catch (const Error&) {
      ++caught;
    }
  }
  EXPECT_GT(caught, trials / 2);
}

TEST(Codec, ExternalGeometryBackend)
{
  auto c = test::synthetic_cloud(600, 13);
  CodecOptions opt;
  opt.external_geometry = ExternalGeometryCodec{"cp {in_ply} {out_bin}", "cp {in_bin} {out_ply}"};
  auto s = encode(c, CodecParams{}, opt);
  EXPECT_EQ(s.header.geometry_backend, GeometryBackend::external);
  EXPECT_EQ(s.geometry[0], 1);
  auto bytes = s.serialize();
  auto internal = encode(c, CodecParams{});
  EXPECT_EQ(decode(ByteView(bytes), opt), decode(internal));
  EXPECT_THROW(decode(ByteView(bytes)), Error);
}
