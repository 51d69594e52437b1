#pragma once

#include "ggsc/gs_core.hpp"

#include <cmath>
#include <tuple>

namespace ggsc {

//============================================================================
// Dense row-major matrix of doubles.

class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
  {}

  static Matrix identity(std::size_t n)
  {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const
  {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

//============================================================================
// Eigen-decomposition of a graph Laplacian: L = A diag(eigenvalues) A^T.
//
// Invariants: eigenvalues ascending and non-negative; basis(:, j) is the
// eigenvector for eigenvalues[j]; columns are orthonormal; the
// largest-magnitude entry of every column (lowest index on ties) is >= 0.

struct GraphSpectrum {
  std::vector<double> eigenvalues;
  Matrix basis;

  std::size_t size() const { return eigenvalues.size(); }
  bool operator==(const GraphSpectrum&) const = default;
};

// Flat clouds get sigma = sqrt(kFlatExtent).
inline constexpr double kFlatExtent = 1e-12;

// sigma = sqrt(min(X, Y, Z) / 20) over the box extents.
inline double
sigma_from_bbox(const Box3& box)
{
  auto e = box.extent();
  double h = std::min({e[0], e[1], e[2]});
  if (!(h > 0))
    return std::sqrt(kFlatExtent);
  return std::sqrt(h / 20.0);
}

// Dense Gaussian-kernel adjacency over all pairs; no self loops.
inline Matrix
build_adjacency(std::span<const Vec3> points, double sigma)
{
  if (points.empty())
    throw Error("build_adjacency: no points");
  if (!(sigma > 0))
    throw Error("build_adjacency: sigma must be positive");

  const auto m = points.size();
  const double inv = 1.0 / (sigma * sigma);
  Matrix w(m, m);
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = p + 1; q < m; ++q) {
      double d2 = 0;
      for (int k = 0; k < 3; ++k) {
        double t = points[p][k] - points[q][k];
        d2 += t * t;
      }
      double v = std::exp(-d2 * inv);
      w(p, q) = v;
      w(q, p) = v;
    }
  }
  return w;
}

// L = D - W, D = diag(row sums of W).
inline Matrix
laplacian(const Matrix& w)
{
  if (w.rows() != w.cols())
    throw Error("laplacian: adjacency must be square");
  const auto m = w.rows();
  Matrix l(m, m);
  for (std::size_t p = 0; p < m; ++p) {
    double degree = 0;
    for (std::size_t q = 0; q < m; ++q) {
      if (q == p)
        continue;
      degree += w(p, q);
      l(p, q) = -w(p, q);
    }
    l(p, p) = degree;
  }
  return l;
}

//============================================================================

namespace spectral_detail {

  inline constexpr int kMaxIterations = 100;

  // Householder reduction of the symmetric matrix held in @v to tridiagonal
  // form.  On exit @v holds the accumulated orthogonal transform, @d the
  // diagonal and @e the sub-diagonal (e[0] unused).
  inline void
  tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e)
  {
    const int n = int(v.rows());
    for (int j = 0; j < n; ++j)
      d[j] = v(n - 1, j);

    for (int i = n - 1; i > 0; --i) {
      double scale = 0.0, h = 0.0;
      for (int k = 0; k < i; ++k)
        scale += std::fabs(d[k]);
      if (scale == 0.0) {
        e[i] = d[i - 1];
        for (int j = 0; j < i; ++j) {
          d[j] = v(i - 1, j);
          v(i, j) = 0.0;
          v(j, i) = 0.0;
        }
      }
      else {
        for (int k = 0; k < i; ++k) {
          d[k] /= scale;
          h += d[k] * d[k];
        }
        double f = d[i - 1];
        double g = std::sqrt(h);
        if (f > 0)
          g = -g;
        e[i] = scale * g;
        h -= f * g;
        d[i - 1] = f - g;
        for (int j = 0; j < i; ++j)
          e[j] = 0.0;

        for (int j = 0; j < i; ++j) {
          f = d[j];
          v(j, i) = f;
          g = e[j] + v(j, j) * f;
          for (int k = j + 1; k <= i - 1; ++k) {
            g += v(k, j) * d[k];
            e[k] += v(k, j) * f;
          }
          e[j] = g;
        }
        f = 0.0;
        for (int j = 0; j < i; ++j) {
          e[j] /= h;
          f += e[j] * d[j];
        }
        double hh = f / (h + h);
        for (int j = 0; j < i; ++j)
          e[j] -= hh * d[j];
        for (int j = 0; j < i; ++j) {
          f = d[j];
          g = e[j];
          for (int k = j; k <= i - 1; ++k)
            v(k, j) -= (f * e[k] + g * d[k]);
          d[j] = v(i - 1, j);
          v(i, j) = 0.0;
        }
      }
      d[i] = h;
    }

    // Accumulate transformations.
    for (int i = 0; i < n - 1; ++i) {
      v(n - 1, i) = v(i, i);
      v(i, i) = 1.0;
      double h = d[i + 1];
      if (h != 0.0) {
        for (int k = 0; k <= i; ++k)
          d[k] = v(k, i + 1) / h;
        for (int j = 0; j <= i; ++j) {
          double g = 0.0;
          for (int k = 0; k <= i; ++k)
            g += v(k, i + 1) * v(k, j);
          for (int k = 0; k <= i; ++k)
            v(k, j) -= g * d[k];
        }
      }
      for (int k = 0; k <= i; ++k)
        v(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
      d[j] = v(n - 1, j);
      v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
  }

  // Implicit-shift QL on the tridiagonal (d, e).  @vt holds the transform
  // transposed (row j = column j of the basis) and is rotated in place.
  inline void
  tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix& vt)
  {
    const int n = int(d.size());
    for (int i = 1; i < n; ++i)
      e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0, tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);
    for (int l = 0; l < n; ++l) {
      tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
      int m = l;
      while (m < n) {
        if (std::fabs(e[m]) <= eps * tst1)
          break;
        ++m;
      }

      if (m > l) {
        int iter = 0;
        do {
          if (++iter > kMaxIterations)
            throw Error("eig_sym: QL iteration did not converge");

          double g = d[l];
          double p = (d[l + 1] - g) / (2.0 * e[l]);
          double r = std::hypot(p, 1.0);
          if (p < 0)
            r = -r;
          d[l] = e[l] / (p + r);
          d[l + 1] = e[l] * (p + r);
          double dl1 = d[l + 1];
          double h = g - d[l];
          for (int i = l + 2; i < n; ++i)
            d[i] -= h;
          f += h;

          p = d[m];
          double c = 1.0, c2 = c, c3 = c;
          double el1 = e[l + 1];
          double s = 0.0, s2 = 0.0;
          for (int i = m - 1; i >= l; --i) {
            c3 = c2;
            c2 = c;
            s2 = s;
            g = c * e[i];
            h = c * p;
            r = std::hypot(p, e[i]);
            e[i + 1] = s * r;
            s = e[i] / r;
            c = p / r;
            p = c * d[i] - s * g;
            d[i + 1] = h + s * (c * g + s * d[i]);

            auto vi = vt.row(i);
            auto vi1 = vt.row(i + 1);
            for (int k = 0; k < n; ++k) {
              double t = vi1[k];
              vi1[k] = s * vi[k] + c * t;
              vi[k] = c * vi[k] - s * t;
            }
          }
          p = -s * s2 * c3 * el1 * e[l] / dl1;
          e[l] = s * p;
          d[l] = c * p;
        } while (std::fabs(e[l]) > eps * tst1);
      }
      d[l] += f;
      e[l] = 0.0;
    }
  }

}  // namespace spectral_detail

// Deterministic symmetric eigensolver (Householder tridiagonalization
// followed by implicit QL).  Identical input bits give identical output
// bits within one build.  Results are canonicalized: negative eigenvalues
// clamped to zero, each eigenvector sign-normalized, pairs sorted by
// (eigenvalue, eigenvector lexicographic order).
inline GraphSpectrum
eig_sym(const Matrix& l)
{
  if (l.rows() != l.cols() || l.rows() == 0)
    throw Error("eig_sym: matrix must be square and non-empty");
  const auto n = l.rows();

  double norm = 0;
  for (double x : l.data())
    norm = std::max(norm, std::fabs(x));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(l(i, j) - l(j, i)) > 1e-12 * std::max(1.0, norm))
        throw Error("eig_sym: matrix is not symmetric");

  Matrix v = l;
  std::vector<double> d(n), e(n);
  spectral_detail::tridiagonalize(v, d, e);

  Matrix vt(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      vt(j, i) = v(i, j);
  spectral_detail::tridiagonal_ql(d, e, vt);

  for (std::size_t j = 0; j < n; ++j) {
    if (d[j] < 0)
      d[j] = 0.0;
    auto vec = vt.row(j);
    std::size_t peak = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::fabs(vec[k]) > std::fabs(vec[peak]))
        peak = k;
    if (vec[peak] < 0)
      for (auto& x : vec)
        x = -x;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j)
    order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (d[a] != d[b])
      return d[a] < d[b];
    auto va = vt.row(a), vb = vt.row(b);
    return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
  });

  GraphSpectrum out;
  out.eigenvalues.resize(n);
  out.basis = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = d[order[j]];
    auto vec = vt.row(order[j]);
    for (std::size_t i = 0; i < n; ++i)
      out.basis(i, j) = vec[i];
  }
  return out;
}

// Graph, Laplacian and spectrum of one leaf.
inline GraphSpectrum
leaf_spectrum(std::span<const Vec3> points, double sigma)
{
  return eig_sym(laplacian(build_adjacency(points, sigma)));
}

//============================================================================
// Graph Fourier transform.  The basis is orthonormal, so the inverse of A
// is its transpose.

inline std::vector<double>
gft(const GraphSpectrum& spectrum, std::span<const double> signal)
{
  const auto m = spectrum.size();
  if (signal.size() != m)
    throw Error(
      "gft: signal length " + std::to_string(signal.size())
      + " does not match graph size " + std::to_string(m));
  std::vector<double> coeffs(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    auto row = spectrum.basis.row(i);
    const double fi = signal[i];
    for (std::size_t j = 0; j < m; ++j)
      coeffs[j] += row[j] * fi;
  }
  return coeffs;
}

// Inverse transform of a full-length (zero-padded) coefficient row.
inline std::vector<double>
igft(const GraphSpectrum& spectrum, std::span<const double> coeffs)
{
  const auto m = spectrum.size();
  if (coeffs.size() != m)
    throw Error(
      "igft: coefficient length " + std::to_string(coeffs.size())
      + " does not match graph size " + std::to_string(m));
  std::vector<double> signal(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    auto row = spectrum.basis.row(i);
    double acc = 0;
    for (std::size_t j = 0; j < m; ++j)
      acc += row[j] * coeffs[j];
    signal[i] = acc;
  }
  return signal;
}

// Number of low-frequency coefficients kept: max(1, ceil(alpha * m)).
inline std::size_t
clip_count(double alpha, std::size_t m)
{
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error("clip_count: alpha must lie in (0, 1]");
  if (m == 0)
    throw Error("clip_count: empty leaf");
  if (alpha == 1.0)
    return m;
  // Absorb representation error in alpha (0.7 * 10 = 7.000000000000001).
  auto k = std::size_t(std::ceil(alpha * double(m) - 1e-9));
  return std::clamp<std::size_t>(k, 1, m);
}

// Zero-fill a clipped coefficient row back to length @m.
inline std::vector<double>
zero_pad(std::span<const double> kept, std::size_t m)
{
  if (kept.size() > m)
    throw Error("zero_pad: more coefficients than graph nodes");
  std::vector<double> out(m, 0.0);
  std::copy(kept.begin(), kept.end(), out.begin());
  return out;
}

}  // namespace ggsc
