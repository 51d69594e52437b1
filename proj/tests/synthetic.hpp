#pragma once

#include "ggsc/gs_core.hpp"

#include <cmath>
#include <random>

namespace ggsc::test {

// Values pass through float so PLY round trips are exact.
inline double
f32(double v)
{
  return double(float(v));
}

// Clustered cloud whose attributes vary smoothly with position plus noise,
// loosely resembling a trained scene.
inline GaussianCloud
synthetic_cloud(std::size_t n, std::uint64_t seed = 1, double noise = 0.05)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const std::size_t clusters = std::max<std::size_t>(1, n / 500);
  std::vector<Vec3> seeds(clusters);
  for (auto& s : seeds)
    s = {uni(rng) * 4, uni(rng) * 4, uni(rng) * 2};

  GaussianCloud c;
  c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = seeds[i % clusters];
    Vec3 p;
    for (int k = 0; k < 3; ++k)
      p[k] = f32(s[k] + 0.6 * gauss(rng));
    c.centers[i] = p;
    const double wave = std::sin(p[0] * 1.3) + std::cos(p[1] * 0.7) + 0.5 * p[2];
    for (std::size_t j = 0; j < kShCount; ++j) {
      const double amp = j < kShChannels ? 1.0 : 0.15 / double(1 + j / 8);
      c.sh[i][j] = f32(amp * (wave * std::cos(0.3 * double(j)) + noise * gauss(rng)));
    }
    c.opacity[i] = f32(2.0 * std::tanh(wave) + 3 * noise * gauss(rng));
    for (int k = 0; k < 3; ++k)
      c.scale[i][k] = f32(-4.0 + 0.5 * wave + 0.3 * double(k) + noise * gauss(rng));
    std::array<double, 4> q;
    double norm = 0;
    for (int k = 0; k < 4; ++k) {
      q[k] = (k == 0 ? 1.0 : 0.3 * std::sin(wave + k)) + noise * gauss(rng);
      norm += q[k] * q[k];
    }
    for (int k = 0; k < 4; ++k)
      c.rotation[i][k] = f32(q[k] / std::sqrt(norm));
  }
  return c;
}

// Independent uniform attributes; no spatial correlation.
inline GaussianCloud
random_cloud(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  GaussianCloud c;
  c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : c.centers[i])
      v = f32(uni(rng) * 3);
    for (auto& v : c.sh[i])
      v = f32(uni(rng));
    c.opacity[i] = f32(uni(rng) * 5);
    for (auto& v : c.scale[i])
      v = f32(uni(rng) - 4);
    for (auto& v : c.rotation[i])
      v = f32(uni(rng));
  }
  return c;
}

}  // namespace ggsc::test
