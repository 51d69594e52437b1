#pragma once

#include "ggsc/common.hpp"

#include <numeric>

namespace ggsc {

// Morton codes are 64-bit, so at most 21 bits per axis.
inline constexpr int kMaxGeometryBits = 21;

using Point3u = std::array<std::uint32_t, 3>;

// Interleave the low @bits bits of each coordinate, x in the most
// significant position of every triple.
inline std::uint64_t
morton_code(const Point3u& p, int bits = kMaxGeometryBits)
{
  std::uint64_t code = 0;
  for (int i = bits - 1; i >= 0; --i) {
    code = (code << 3) | (std::uint64_t((p[0] >> i) & 1) << 2)
      | (std::uint64_t((p[1] >> i) & 1) << 1) | std::uint64_t((p[2] >> i) & 1);
  }
  return code;
}

// Stable sort by Morton code: returns order such that points[order[i]] is
// the i-th point in Morton order.  Duplicates keep their input order.
inline std::vector<std::uint32_t>
morton_order(std::span<const Point3u> points, int bits)
{
  if (bits < 1 || bits > kMaxGeometryBits)
    throw Error("morton_order: bit depth " + std::to_string(bits) + " out of range");
  const std::uint64_t limit = std::uint64_t(1) << bits;

  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (auto c : points[i])
      if (c >= limit)
        throw Error(
          "morton_order: coordinate " + std::to_string(c) + " of point "
          + std::to_string(i) + " exceeds " + std::to_string(bits) + " bits");
    keyed[i] = {morton_code(points[i], bits), std::uint32_t(i)};
  }
  // (code, index) pairs are unique, so an unstable sort yields the stable order.
  std::sort(keyed.begin(), keyed.end());

  std::vector<std::uint32_t> order(points.size());
  for (std::size_t i = 0; i < keyed.size(); ++i)
    order[i] = keyed[i].second;
  return order;
}

//============================================================================

struct Partition {
  // Each leaf lists indices into the center list, in input order.
  std::vector<std::vector<std::uint32_t>> leaves;

  std::size_t total_size() const
  {
    std::size_t n = 0;
    for (const auto& l : leaves)
      n += l.size();
    return n;
  }

  bool operator==(const Partition&) const = default;
};

namespace partition_detail {

  inline void split(
    std::span<const Vec3> centers,
    std::vector<std::uint32_t> node,
    std::size_t maxLeaf,
    Partition& out)
  {
    if (node.size() <= maxLeaf) {
      out.leaves.push_back(std::move(node));
      return;
    }

    // Axis of widest extent; ties prefer x, then y.
    Vec3 lo = centers[node[0]], hi = lo;
    for (auto idx : node) {
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], centers[idx][k]);
        hi[k] = std::max(hi[k], centers[idx][k]);
      }
    }
    int axis = 0;
    for (int k = 1; k < 3; ++k)
      if (hi[k] - lo[k] > hi[axis] - lo[axis])
        axis = k;

    // Lower median: the left half always receives ceil(n/2) elements.
    const std::size_t leftSize = (node.size() + 1) / 2;
    std::vector<double> coords(node.size());
    for (std::size_t i = 0; i < node.size(); ++i)
      coords[i] = centers[node[i]][axis];
    std::nth_element(coords.begin(), coords.begin() + (leftSize - 1), coords.end());
    const double median = coords[leftSize - 1];

    std::size_t below = 0;
    for (auto idx : node)
      below += centers[idx][axis] < median;
    std::size_t equalToLeft = leftSize - below;

    std::vector<std::uint32_t> left, right;
    left.reserve(leftSize);
    right.reserve(node.size() - leftSize);
    for (auto idx : node) {
      double c = centers[idx][axis];
      if (c < median)
        left.push_back(idx);
      else if (c == median && equalToLeft > 0) {
        left.push_back(idx);
        --equalToLeft;
      }
      else
        right.push_back(idx);
    }
    node = {};

    split(centers, std::move(left), maxLeaf, out);
    split(centers, std::move(right), maxLeaf, out);
  }

}  // namespace partition_detail

// Recursive KD split until every leaf holds at most @maxLeaf primitives.
// Leaves are emitted left-to-right; each is a pure function of the centers.
inline Partition
kdtree_split(std::span<const Vec3> centers, std::size_t maxLeaf = 200)
{
  if (centers.empty())
    throw Error("kdtree_split: no centers");
  if (maxLeaf < 1)
    throw Error("kdtree_split: max_leaf must be at least 1");

  std::vector<std::uint32_t> all(centers.size());
  std::iota(all.begin(), all.end(), 0u);
  Partition out;
  partition_detail::split(centers, std::move(all), maxLeaf, out);
  return out;
}

}  // namespace ggsc
