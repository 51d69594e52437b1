#pragma once

#include "ggsc/common.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ggsc {

// Degree-3 spherical harmonics: 16 coefficients (1 DC + 15 rest) per colour
// channel, 48 in total.
inline constexpr std::size_t kShChannels = 3;
inline constexpr std::size_t kShPerChannel = 16;
inline constexpr std::size_t kShRestPerChannel = kShPerChannel - 1;
inline constexpr std::size_t kShCount = kShChannels * kShPerChannel;

using ShCoeffs = std::array<double, kShCount>;

// Position of coefficient @k (0 = DC) of colour @channel inside ShCoeffs.
// ShCoeffs follows the stored-PLY order: f_dc_0..2, then f_rest_0..44 where
// f_rest is channel-major (f_rest_{channel * 15 + k - 1}).
constexpr std::size_t
sh_index(std::size_t channel, std::size_t k)
{
  return k == 0 ? channel : kShChannels + channel * kShRestPerChannel + (k - 1);
}

//============================================================================
// A Gaussian Splatting asset in the stored-PLY domain: logit opacity, log
// scale and unnormalized quaternion rotation are kept as written by the
// trainer.

struct GaussianCloud {
  std::vector<Vec3> centers;
  std::vector<ShCoeffs> sh;
  std::vector<double> opacity;
  std::vector<std::array<double, 3>> scale;
  std::vector<std::array<double, 4>> rotation;

  std::size_t size() const { return centers.size(); }
  bool empty() const { return centers.empty(); }

  void resize(std::size_t n)
  {
    centers.resize(n);
    sh.resize(n);
    opacity.resize(n);
    scale.resize(n);
    rotation.resize(n);
  }

  bool operator==(const GaussianCloud&) const = default;
};

// Throws if attribute lengths disagree, the cloud is empty, or any value is
// non-finite.
inline void
validate(const GaussianCloud& cloud)
{
  const auto n = cloud.size();
  if (n == 0)
    throw Error("gaussian cloud is empty");
  if (cloud.sh.size() != n || cloud.opacity.size() != n
      || cloud.scale.size() != n || cloud.rotation.size() != n)
    throw Error("gaussian cloud attribute lengths disagree");

  auto check = [](double v, const char* field, std::size_t i) {
    if (!std::isfinite(v))
      throw Error(
        std::string("non-finite value in ") + field + " at primitive "
        + std::to_string(i));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : cloud.centers[i])
      check(v, "center", i);
    for (double v : cloud.sh[i])
      check(v, "sh", i);
    check(cloud.opacity[i], "opacity", i);
    for (double v : cloud.scale[i])
      check(v, "scale", i);
    for (double v : cloud.rotation[i])
      check(v, "rotation", i);
  }
}

// out[i] = cloud[order[i]]
inline GaussianCloud
permuted(const GaussianCloud& cloud, std::span<const std::uint32_t> order)
{
  GaussianCloud out;
  out.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto src = order[i];
    out.centers[i] = cloud.centers.at(src);
    out.sh[i] = cloud.sh[src];
    out.opacity[i] = cloud.opacity[src];
    out.scale[i] = cloud.scale[src];
    out.rotation[i] = cloud.rotation[src];
  }
  return out;
}

//============================================================================

struct Box3 {
  Vec3 min{};
  Vec3 max{};

  Vec3 extent() const
  {
    return {max[0] - min[0], max[1] - min[1], max[2] - min[2]};
  }

  double diagonal() const
  {
    auto e = extent();
    return std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
  }

  bool contains(const Vec3& p) const
  {
    for (int k = 0; k < 3; ++k)
      if (p[k] < min[k] || p[k] > max[k])
        return false;
    return true;
  }

  bool operator==(const Box3&) const = default;
};

inline Box3
bounding_box(std::span<const Vec3> points)
{
  if (points.empty())
    throw Error("bounding_box: no points");
  Box3 box{points[0], points[0]};
  for (const auto& p : points) {
    for (int k = 0; k < 3; ++k) {
      box.min[k] = std::min(box.min[k], p[k]);
      box.max[k] = std::max(box.max[k], p[k]);
    }
  }
  return box;
}

inline Box3
bounding_box(const GaussianCloud& cloud)
{
  return bounding_box(cloud.centers);
}

}  // namespace ggsc
