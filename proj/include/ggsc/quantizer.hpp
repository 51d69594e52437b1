#pragma once

#include "ggsc/common.hpp"

#include <cmath>

namespace ggsc {

// How the quantization step is shared between the components of one
// attribute group.
enum class ScaleMode : std::uint8_t {
  group = 0,      // one scale: the largest component range
  component = 1,  // one scale per component
};

inline constexpr int kMaxQuantBits = 31;

// Uniform scalar quantizer for a group of components.  Minima are per
// component; in group mode every entry of `scale` holds the same value.
struct QuantGrid {
  std::vector<double> minimum;
  std::vector<double> scale;
  int bits = 1;

  std::size_t components() const { return minimum.size(); }
  std::uint32_t max_level() const { return std::uint32_t((std::uint64_t(1) << bits) - 1); }

  // Largest reconstruction error for values inside the fitted range.
  double error_bound(std::size_t component = 0) const
  {
    return 0.5 * scale.at(component) / double(max_level());
  }

  bool operator==(const QuantGrid&) const = default;
};

inline void
check_quant_bits(int bits)
{
  if (bits < 1 || bits > kMaxQuantBits)
    throw Error("quantizer: bit depth " + std::to_string(bits) + " out of range 1..31");
}

// Fit a grid over component columns (columns[c] = every sample of
// component c).
inline QuantGrid
fit_grid(
  std::span<const std::vector<double>> columns,
  int bits,
  ScaleMode mode = ScaleMode::group)
{
  check_quant_bits(bits);
  if (columns.empty())
    throw Error("fit_grid: no components");

  QuantGrid grid;
  grid.bits = bits;
  grid.minimum.resize(columns.size());
  grid.scale.resize(columns.size());
  double widest = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& col = columns[c];
    if (col.empty())
      throw Error("fit_grid: component " + std::to_string(c) + " has no samples");
    double lo = col[0], hi = col[0];
    for (double v : col) {
      if (!std::isfinite(v))
        throw Error("fit_grid: non-finite sample in component " + std::to_string(c));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    grid.minimum[c] = lo;
    grid.scale[c] = hi - lo;
    widest = std::max(widest, hi - lo);
  }
  if (mode == ScaleMode::group)
    std::fill(grid.scale.begin(), grid.scale.end(), widest);
  return grid;
}

// b = floor((a - min) * (2^q - 1) / s + 1/2), clamped to [0, 2^q - 1].
inline std::uint32_t
quantize(double a, const QuantGrid& grid, std::size_t component = 0)
{
  const double s = grid.scale.at(component);
  if (!(s > 0))
    return 0;
  const double levels = double(grid.max_level());
  double b = std::floor((a - grid.minimum[component]) * levels / s + 0.5);
  return std::uint32_t(std::clamp(b, 0.0, levels));
}

inline double
dequantize(std::uint32_t b, const QuantGrid& grid, std::size_t component = 0)
{
  if (b > grid.max_level())
    throw Error(
      "dequantize: level " + std::to_string(b) + " exceeds "
      + std::to_string(grid.max_level()));
  const double s = grid.scale.at(component);
  if (!(s > 0))
    return grid.minimum[component];
  return grid.minimum[component] + double(b) * s / double(grid.max_level());
}

}  // namespace ggsc
