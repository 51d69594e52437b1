#include "ggsc/geom_codec.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace ggsc;

namespace {

QuantizedGeometry
sorted_geometry(std::vector<Point3u> pts, int bits)
{
  QuantizedGeometry g;
  g.bits = bits;
  for (auto i : morton_order(pts, bits))
    g.points.push_back(pts[i]);
  return g;
}

}  // namespace

TEST(GeomCodec, SinglePoint)
{
  auto g = sorted_geometry({{0, 0, 0}}, 5);
  EXPECT_EQ(decode_centers(encode_centers(g), 5), g);
}

TEST(GeomCodec, FullGridCompressesWell)
{
  std::vector<Point3u> pts;
  for (std::uint32_t x = 0; x < 8; ++x)
    for (std::uint32_t y = 0; y < 8; ++y)
      for (std::uint32_t z = 0; z < 8; ++z)
        pts.push_back({x, y, z});
  auto g = sorted_geometry(pts, 3);
  auto bytes = encode_centers(g);
  EXPECT_LT(bytes.size() * 8, 512 * 3 * 3 / 4);
  EXPECT_EQ(decode_centers(bytes, 3), g);
}

TEST(GeomCodec, RandomWithDuplicatesRoundTrips)
{
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::uint32_t> u(0, 4095);
  std::vector<Point3u> pts(10000);
  for (auto& p : pts)
    p = {u(rng), u(rng), u(rng)};
  for (int i = 0; i < 500; ++i)
    pts[rng() % pts.size()] = pts[rng() % pts.size()];
  pts.push_back(pts[0]);
  pts.push_back(pts[0]);
  auto g = sorted_geometry(pts, 12);
  auto back = decode_centers(encode_centers(g), 12);
  EXPECT_EQ(back, g);
  std::multiset<Point3u> a(pts.begin(), pts.end()), b(back.points.begin(), back.points.end());
  EXPECT_EQ(a, b);
}

TEST(GeomCodec, ExtremeDepths)
{
  std::mt19937 rng(8);
  for (int bits : {1, 21}) {
    std::uniform_int_distribution<std::uint32_t> u(0, (1u << bits) - 1);
    std::vector<Point3u> pts(300);
    for (auto& p : pts)
      p = {u(rng), u(rng), u(rng)};
    pts.push_back({(1u << bits) - 1, (1u << bits) - 1, (1u << bits) - 1});
    auto g = sorted_geometry(pts, bits);
    EXPECT_EQ(decode_centers(encode_centers(g), bits), g);
  }
}

TEST(GeomCodec, Errors)
{
  QuantizedGeometry g{3, {{8, 0, 0}}};
  EXPECT_THROW(encode_centers(g), Error);
  QuantizedGeometry unsorted{3, {{1, 0, 0}, {0, 0, 0}}};
  EXPECT_THROW(encode_centers(unsorted), Error);
  EXPECT_THROW(encode_centers(QuantizedGeometry{3, {}}), Error);
  EXPECT_THROW(decode_centers(Bytes{}), Error);

  auto ok = encode_centers(sorted_geometry({{1, 2, 3}, {4, 5, 6}}, 4));
  EXPECT_THROW(decode_centers(ok, 5), Error);
  EXPECT_THROW(decode_centers(Bytes(ok.begin(), ok.end() - 1)), Error);
  auto extra = ok;
  extra.push_back(0xff);
  EXPECT_THROW(decode_centers(extra), Error);
}

TEST(GeomCodec, ExternalHookRoundTrip)
{
  // "Codec" that stores the PLY verbatim.
  ExternalGeometryCodec ext{"cp {in_ply} {out_bin}", "cp {in_bin} {out_ply}"};
  std::mt19937 rng(9);
  std::uniform_int_distribution<std::uint32_t> u(0, 1023);
  std::vector<Point3u> pts(500);
  for (auto& p : pts)
    p = {u(rng), u(rng), u(rng)};
  auto g = sorted_geometry(pts, 10);
  auto opaque = external_encode_centers(g, ext.encode_command);
  EXPECT_EQ(external_decode_centers(opaque, 10, ext.decode_command), g);
  EXPECT_THROW(external_encode_centers(g, "false"), Error);
  EXPECT_THROW(external_encode_centers(g, ""), Error);
}
