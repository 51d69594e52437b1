#include "ggsc/colorspace.hpp"
#include "ggsc/spectral.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ggsc;

namespace {

ShTriple
rgb(double r, double g, double b)
{
  ShTriple t;
  for (std::size_t k = 0; k < kShPerChannel; ++k) {
    t.channel[0][k] = r;
    t.channel[1][k] = g;
    t.channel[2][k] = b;
  }
  return t;
}

ShTriple
random_triple(std::mt19937_64& rng, ColorSpace space)
{
  std::uniform_real_distribution<double> u(-3, 3);
  ShTriple t;
  t.space = space;
  for (auto& ch : t.channel)
    for (auto& v : ch)
      v = u(rng);
  return t;
}

}  // namespace

TEST(ColorSpace, ForwardExamples)
{
  auto gray = sh_rgb_to_yuv(rgb(1, 1, 1));
  EXPECT_EQ(gray.space, ColorSpace::yuv);
  for (std::size_t k = 0; k < kShPerChannel; ++k) {
    EXPECT_NEAR(gray.channel[0][k], 1.0, 1e-15);
    EXPECT_NEAR(gray.channel[1][k], 0.0, 1e-15);
    EXPECT_NEAR(gray.channel[2][k], 0.0, 1e-15);
  }
  auto red = sh_rgb_to_yuv(rgb(1, 0, 0));
  EXPECT_EQ(red.channel[0][3], 0.299);
  EXPECT_EQ(red.channel[1][3], -0.169);
  EXPECT_EQ(red.channel[2][3], 0.500);
}

TEST(ColorSpace, ForwardMatchesHandMultiplication)
{
  std::mt19937_64 rng(1);
  auto t = random_triple(rng, ColorSpace::rgb);
  auto y = sh_rgb_to_yuv(t);
  for (std::size_t k = 0; k < kShPerChannel; ++k) {
    double r = t.channel[0][k], g = t.channel[1][k], b = t.channel[2][k];
    EXPECT_NEAR(y.channel[0][k], 0.299 * r + 0.587 * g + 0.114 * b, 1e-15);
    EXPECT_NEAR(y.channel[1][k], -0.169 * r - 0.331 * g + 0.5 * b, 1e-15);
    EXPECT_NEAR(y.channel[2][k], 0.5 * r - 0.419 * g - 0.081 * b, 1e-15);
  }
}

TEST(ColorSpace, StoredInverseMatchesCofactorInverse)
{
  // Adjugate / determinant in long double.
  const auto& m = kRgbToYuv;
  auto at = [&](int r, int c) { return (long double)m[r][c]; };
  long double det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
    - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
    + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      int r0 = (c + 1) % 3, r1 = (c + 2) % 3, c0 = (r + 1) % 3, c1 = (r + 2) % 3;
      long double cof = at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
      EXPECT_NEAR(kYuvToRgb[r][c], double(cof / det), 1e-15) << r << "," << c;
    }
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0;
      for (int k = 0; k < 3; ++k)
        s += kRgbToYuv[r][k] * kYuvToRgb[k][c];
      EXPECT_NEAR(s, r == c ? 1.0 : 0.0, 1e-6);
    }
}

TEST(ColorSpace, InverseExamples)
{
  ShTriple y;
  y.space = ColorSpace::yuv;
  for (auto& v : y.channel[0])
    v = 1;
  auto back = sh_yuv_to_rgb(y);
  for (std::size_t c = 0; c < 3; ++c)
    EXPECT_NEAR(back.channel[c][0], 1.0, 1e-3);

  ShTriple zero;
  zero.space = ColorSpace::yuv;
  auto z = sh_yuv_to_rgb(zero);
  for (const auto& ch : z.channel)
    for (double v : ch)
      EXPECT_EQ(v, 0.0);
}

TEST(ColorSpace, RoundTripAndTagChecks)
{
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    auto x = random_triple(rng, ColorSpace::rgb);
    auto back = sh_yuv_to_rgb(sh_rgb_to_yuv(x));
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t k = 0; k < kShPerChannel; ++k)
        EXPECT_NEAR(back.channel[c][k], x.channel[c][k], 1e-9);
  }
  EXPECT_THROW(sh_rgb_to_yuv(random_triple(rng, ColorSpace::yuv)), Error);
  EXPECT_THROW(sh_yuv_to_rgb(random_triple(rng, ColorSpace::rgb)), Error);
}

TEST(ColorSpace, Linear)
{
  std::mt19937_64 rng(3);
  auto a = random_triple(rng, ColorSpace::rgb), b = random_triple(rng, ColorSpace::rgb);
  ShTriple sum = a;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < kShPerChannel; ++k)
      sum.channel[c][k] = 2.5 * a.channel[c][k] + b.channel[c][k];
  auto ya = sh_rgb_to_yuv(a), yb = sh_rgb_to_yuv(b), ys = sh_rgb_to_yuv(sum);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < kShPerChannel; ++k)
      EXPECT_NEAR(ys.channel[c][k], 2.5 * ya.channel[c][k] + yb.channel[c][k], 1e-12);
}

TEST(ColorSpace, PackingFollowsPlyOrder)
{
  ShCoeffs c;
  for (std::size_t i = 0; i < kShCount; ++i)
    c[i] = double(i);
  auto t = sh_triple_from_coeffs(c);
  EXPECT_EQ(t.channel[1][0], 1.0);   // f_dc_1
  EXPECT_EQ(t.channel[0][1], 3.0);   // f_rest_0
  EXPECT_EQ(t.channel[1][1], 18.0);  // f_rest_15
  EXPECT_EQ(t.channel[2][15], 47.0); // f_rest_44
  EXPECT_EQ(sh_triple_to_coeffs(t), c);
}
