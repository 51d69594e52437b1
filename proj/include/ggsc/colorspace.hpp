#pragma once

#include "ggsc/gs_core.hpp"

namespace ggsc {

enum class ColorSpace : std::uint8_t { rgb, yuv };

// SH coefficients of one primitive as 3 channels x 16 coefficients
// (index 0 = DC), tagged with the colour space of the channels.
struct ShTriple {
  ColorSpace space = ColorSpace::rgb;
  std::array<std::array<double, kShPerChannel>, kShChannels> channel{};

  bool operator==(const ShTriple&) const = default;
};

// Rounded YUV weights applied to every SH coefficient index.
inline constexpr double kRgbToYuv[3][3] = {
  {0.299, 0.587, 0.114},
  {-0.169, -0.331, 0.500},
  {0.500, -0.419, -0.081},
};

// Exact inverse of kRgbToYuv (computed in rational arithmetic, rounded to
// the nearest double).  The first column is exactly 1 because the U and V
// rows sum to zero.
inline constexpr double kYuvToRgb[3][3] = {
  {1.0, -0.00092674484048563125, 1.4016867602439158},
  {1.0, -0.34369538447215747, -0.7141690399515892},
  {1.0, 1.7721604157233477, 0.00099022051449149627},
};

inline ShTriple
sh_triple_from_coeffs(const ShCoeffs& coeffs, ColorSpace space = ColorSpace::rgb)
{
  ShTriple t;
  t.space = space;
  for (std::size_t c = 0; c < kShChannels; ++c)
    for (std::size_t k = 0; k < kShPerChannel; ++k)
      t.channel[c][k] = coeffs[sh_index(c, k)];
  return t;
}

inline ShCoeffs
sh_triple_to_coeffs(const ShTriple& t)
{
  ShCoeffs out{};
  for (std::size_t c = 0; c < kShChannels; ++c)
    for (std::size_t k = 0; k < kShPerChannel; ++k)
      out[sh_index(c, k)] = t.channel[c][k];
  return out;
}

namespace colorspace_detail {

  inline ShTriple mix(const ShTriple& in, const double (&m)[3][3], ColorSpace to)
  {
    ShTriple out;
    out.space = to;
    for (std::size_t k = 0; k < kShPerChannel; ++k) {
      const double a = in.channel[0][k], b = in.channel[1][k], c = in.channel[2][k];
      for (int r = 0; r < 3; ++r)
        out.channel[r][k] = m[r][0] * a + m[r][1] * b + m[r][2] * c;
    }
    return out;
  }

}  // namespace colorspace_detail

inline ShTriple
sh_rgb_to_yuv(const ShTriple& sh)
{
  if (sh.space != ColorSpace::rgb)
    throw Error("sh_rgb_to_yuv: input is not tagged RGB");
  return colorspace_detail::mix(sh, kRgbToYuv, ColorSpace::yuv);
}

inline ShTriple
sh_yuv_to_rgb(const ShTriple& sh)
{
  if (sh.space != ColorSpace::yuv)
    throw Error("sh_yuv_to_rgb: input is not tagged YUV");
  return colorspace_detail::mix(sh, kYuvToRgb, ColorSpace::rgb);
}

}  // namespace ggsc
