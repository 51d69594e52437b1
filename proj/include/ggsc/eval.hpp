#pragma once

#include "ggsc/codec.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ggsc {

//============================================================================
// PSNR over stored-domain attribute values.

struct PsnrValue {
  double mse = 0.0;
  double peak = 1.0;
  double psnr = std::numeric_limits<double>::infinity();
  bool infinite = true;  // zero error
};

// MSE = mean squared difference; peak = range of the reference values
// (1 when the reference is constant).
inline PsnrValue
psnr_from_pairs(std::span<const double> ref, std::span<const double> dist)
{
  if (ref.size() != dist.size() || ref.empty())
    throw Error("psnr: value lists must be non-empty and of equal length");
  double lo = ref[0], hi = ref[0], sse = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    lo = std::min(lo, ref[i]);
    hi = std::max(hi, ref[i]);
    double d = ref[i] - dist[i];
    sse += d * d;
  }
  PsnrValue v;
  v.mse = sse / double(ref.size());
  v.peak = hi > lo ? hi - lo : 1.0;
  v.infinite = v.mse == 0.0;
  v.psnr = v.infinite ? std::numeric_limits<double>::infinity()
                      : 10.0 * std::log10(v.peak * v.peak / v.mse);
  return v;
}

struct AttributePsnr {
  PsnrValue sh;  // all 48 RGB coefficients
  PsnrValue sh_y, sh_u, sh_v;
  PsnrValue opacity;
  PsnrValue scale;
  PsnrValue rotation;
};

// Both clouds must be in the same (Morton-canonical) order.
inline AttributePsnr
attribute_psnr(const GaussianCloud& ref, const GaussianCloud& dist)
{
  if (ref.size() != dist.size())
    throw Error(
      "attribute_psnr: primitive counts differ (" + std::to_string(ref.size()) + " vs "
      + std::to_string(dist.size()) + ")");
  validate(ref);
  validate(dist);
  const auto n = ref.size();

  std::vector<double> a, b;
  auto measure = [&](auto&& fill) {
    a.clear();
    b.clear();
    for (std::size_t i = 0; i < n; ++i)
      fill(i);
    return psnr_from_pairs(a, b);
  };

  AttributePsnr out;
  out.sh = measure([&](std::size_t i) {
    a.insert(a.end(), ref.sh[i].begin(), ref.sh[i].end());
    b.insert(b.end(), dist.sh[i].begin(), dist.sh[i].end());
  });

  std::vector<ShTriple> ry(n), dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    ry[i] = sh_rgb_to_yuv(sh_triple_from_coeffs(ref.sh[i]));
    dy[i] = sh_rgb_to_yuv(sh_triple_from_coeffs(dist.sh[i]));
  }
  PsnrValue* yuv[3] = {&out.sh_y, &out.sh_u, &out.sh_v};
  for (std::size_t ch = 0; ch < 3; ++ch) {
    *yuv[ch] = measure([&](std::size_t i) {
      a.insert(a.end(), ry[i].channel[ch].begin(), ry[i].channel[ch].end());
      b.insert(b.end(), dy[i].channel[ch].begin(), dy[i].channel[ch].end());
    });
  }

  out.opacity = measure([&](std::size_t i) {
    a.push_back(ref.opacity[i]);
    b.push_back(dist.opacity[i]);
  });
  out.scale = measure([&](std::size_t i) {
    a.insert(a.end(), ref.scale[i].begin(), ref.scale[i].end());
    b.insert(b.end(), dist.scale[i].begin(), dist.scale[i].end());
  });
  out.rotation = measure([&](std::size_t i) {
    a.insert(a.end(), ref.rotation[i].begin(), ref.rotation[i].end());
    b.insert(b.end(), dist.rotation[i].begin(), dist.rotation[i].end());
  });
  return out;
}

//============================================================================
// Point-to-point (D1) geometry distortion.

namespace eval_detail {

  // Static kd-tree over a point list for nearest-neighbour queries.
  class KdTree {
  public:
    explicit KdTree(std::span<const Vec3> pts) : pts_(pts), idx_(pts.size()), axis_(pts.size())
    {
      std::iota(idx_.begin(), idx_.end(), 0u);
      build(0, idx_.size());
    }

    double nearest_sq(const Vec3& q) const
    {
      double best = std::numeric_limits<double>::infinity();
      search(0, idx_.size(), q, best);
      return best;
    }

  private:
    void build(std::size_t lo, std::size_t hi)
    {
      if (hi - lo <= 1)
        return;
      Vec3 mn = pts_[idx_[lo]], mx = mn;
      for (auto i = lo; i < hi; ++i)
        for (int k = 0; k < 3; ++k) {
          mn[k] = std::min(mn[k], pts_[idx_[i]][k]);
          mx[k] = std::max(mx[k], pts_[idx_[i]][k]);
        }
      int ax = 0;
      for (int k = 1; k < 3; ++k)
        if (mx[k] - mn[k] > mx[ax] - mn[ax])
          ax = k;
      auto mid = lo + (hi - lo) / 2;
      std::nth_element(
        idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
        [&](std::uint32_t a, std::uint32_t b) { return pts_[a][ax] < pts_[b][ax]; });
      axis_[mid] = std::uint8_t(ax);
      build(lo, mid);
      build(mid + 1, hi);
    }

    void search(std::size_t lo, std::size_t hi, const Vec3& q, double& best) const
    {
      if (lo >= hi)
        return;
      auto mid = lo + (hi - lo) / 2;
      const auto& p = pts_[idx_[mid]];
      double d2 = 0;
      for (int k = 0; k < 3; ++k)
        d2 += (p[k] - q[k]) * (p[k] - q[k]);
      best = std::min(best, d2);
      if (hi - lo == 1)
        return;
      const int ax = axis_[mid];
      const double diff = q[ax] - p[ax];
      if (diff < 0) {
        search(lo, mid, q, best);
        if (diff * diff < best)
          search(mid + 1, hi, q, best);
      }
      else {
        search(mid + 1, hi, q, best);
        if (diff * diff < best)
          search(lo, mid, q, best);
      }
    }

    std::span<const Vec3> pts_;
    std::vector<std::uint32_t> idx_;
    std::vector<std::uint8_t> axis_;
  };

  inline double one_sided_mse(std::span<const Vec3> from, std::span<const Vec3> to)
  {
    KdTree tree(to);
    double sum = 0;
    for (const auto& p : from)
      sum += tree.nearest_sq(p);
    return sum / double(from.size());
  }

}  // namespace eval_detail

// Symmetric D1: max of both one-sided nearest-neighbour MSEs; peak is the
// reference bounding-box diagonal.
inline PsnrValue
geometry_psnr_d1(std::span<const Vec3> ref, std::span<const Vec3> dist)
{
  if (ref.empty() || dist.empty())
    throw Error("geometry_psnr_d1: empty point set");
  PsnrValue v;
  v.mse = std::max(
    eval_detail::one_sided_mse(ref, dist), eval_detail::one_sided_mse(dist, ref));
  double diag = bounding_box(ref).diagonal();
  v.peak = diag > 0 ? diag : 1.0;
  v.infinite = v.mse == 0.0;
  v.psnr = v.infinite ? std::numeric_limits<double>::infinity()
                      : 10.0 * std::log10(v.peak * v.peak / v.mse);
  return v;
}

//============================================================================
// Correlation between objective scores and subjective scores.

inline double
pearson(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw Error("pearson: need two equal-length lists of at least 2 values");
  const double n = double(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0)
    return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// 1-based ranks; tied values share the average of their ranks.
inline std::vector<double>
average_ranks(std::span<const double> v)
{
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t(0));
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    auto j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
      ++j;
    const double r = 0.5 * double(i + j) + 1.0;
    for (auto k = i; k <= j; ++k)
      ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double
spearman(std::span<const double> x, std::span<const double> y)
{
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson(rx, ry);
}

inline double
rmse(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.empty())
    throw Error("rmse: need two equal-length non-empty lists");
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s / double(x.size()));
}

// Monotone logistic plus linear term:
//   q(x) = b1 * (1/2 - 1 / (1 + exp(b2 * (x - b3)))) + b4 * x + b5
struct Logistic5 {
  std::array<double, 5> beta{};

  double operator()(double x) const
  {
    const auto& b = beta;
    return b[0] * (0.5 - 1.0 / (1.0 + std::exp(b[1] * (x - b[2])))) + b[3] * x + b[4];
  }
};

struct CorrelationReport {
  double plcc = 0;
  double srcc = 0;
  double rmse = 0;
  Logistic5 mapping;
  int iterations = 0;
  std::vector<double> mapped;
};

namespace eval_detail {

  // Solve the 5x5 system a * x = b by Gaussian elimination with partial
  // pivoting.  Returns false when singular.
  inline bool solve5(std::array<std::array<double, 5>, 5> a, std::array<double, 5>& b)
  {
    for (int c = 0; c < 5; ++c) {
      int piv = c;
      for (int r = c + 1; r < 5; ++r)
        if (std::fabs(a[r][c]) > std::fabs(a[piv][c]))
          piv = r;
      if (!(std::fabs(a[piv][c]) > 0))
        return false;
      std::swap(a[c], a[piv]);
      std::swap(b[c], b[piv]);
      for (int r = c + 1; r < 5; ++r) {
        double f = a[r][c] / a[c][c];
        for (int k = c; k < 5; ++k)
          a[r][k] -= f * a[c][k];
        b[r] -= f * b[c];
      }
    }
    for (int c = 4; c >= 0; --c) {
      double s = b[c];
      for (int k = c + 1; k < 5; ++k)
        s -= a[c][k] * b[k];
      b[c] = s / a[c][c];
    }
    return true;
  }

  inline double sse(const Logistic5& f, std::span<const double> x, std::span<const double> y)
  {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - f(x[i]);
      s += r * r;
    }
    return s;
  }

}  // namespace eval_detail

inline constexpr int kLogisticMaxIterations = 500;
inline constexpr double kLogisticTolerance = 1e-8;

// Least-squares fit of the 5-parameter logistic (Levenberg-Marquardt on
// standardized scores), then PLCC/RMSE on mapped scores and SRCC on raw
// scores.
inline CorrelationReport
fit_logistic5(std::span<const double> objective, std::span<const double> mos)
{
  if (objective.size() != mos.size())
    throw Error("fit_logistic5: objective and MOS lists differ in length");
  if (objective.size() < 5)
    throw Error("fit_logistic5: need at least 5 samples");
  for (std::size_t i = 0; i < objective.size(); ++i)
    if (!std::isfinite(objective[i]) || !std::isfinite(mos[i]))
      throw Error("fit_logistic5: non-finite score at row " + std::to_string(i));

  auto [xmin, xmax] = std::minmax_element(objective.begin(), objective.end());
  auto [ymin, ymax] = std::minmax_element(mos.begin(), mos.end());
  if (*xmin == *xmax)
    throw Error("fit_logistic5: objective scores are constant");
  if (*ymin == *ymax)
    throw Error("fit_logistic5: MOS values are constant");

  const std::size_t n = objective.size();
  const double mean = std::accumulate(objective.begin(), objective.end(), 0.0) / double(n);
  double var = 0;
  for (double v : objective)
    var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / double(n));
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = (objective[i] - mean) / sd;

  // Initial guess from the data extrema.
  const double sign = pearson(objective, mos) < 0 ? -1.0 : 1.0;
  Logistic5 f;
  f.beta = {
    sign * (*ymax - *ymin), 1.0, ((*xmax + *xmin) / 2 - mean) / sd, 0.0,
    std::accumulate(mos.begin(), mos.end(), 0.0) / double(n)};

  double lambda = 1e-3;
  double cost = eval_detail::sse(f, xs, mos);
  int iter = 0;
  for (; iter < kLogisticMaxIterations; ++iter) {
    std::array<std::array<double, 5>, 5> jtj{};
    std::array<double, 5> jtr{};
    for (std::size_t i = 0; i < n; ++i) {
      const auto& b = f.beta;
      const double g = 1.0 / (1.0 + std::exp(b[1] * (xs[i] - b[2])));
      const double dg = g * (1.0 - g);
      const std::array<double, 5> jac = {
        0.5 - g, b[0] * dg * (xs[i] - b[2]), -b[0] * dg * b[1], xs[i], 1.0};
      const double r = mos[i] - f(xs[i]);
      for (int p = 0; p < 5; ++p) {
        jtr[p] += jac[p] * r;
        for (int q = 0; q < 5; ++q)
          jtj[p][q] += jac[p] * jac[q];
      }
    }

    bool improved = false;
    std::array<double, 5> step{};
    while (lambda < 1e16) {
      auto a = jtj;
      for (int p = 0; p < 5; ++p)
        a[p][p] += lambda * std::max(jtj[p][p], 1e-12);
      step = jtr;
      if (eval_detail::solve5(a, step)) {
        Logistic5 trial = f;
        for (int p = 0; p < 5; ++p)
          trial.beta[p] += step[p];
        double c = eval_detail::sse(trial, xs, mos);
        if (std::isfinite(c) && c <= cost) {
          f = trial;
          cost = c;
          lambda = std::max(lambda / 10, 1e-12);
          improved = true;
          break;
        }
      }
      lambda *= 10;
    }
    if (!improved)
      break;
    double change = 0, scale = 1;
    for (int p = 0; p < 5; ++p) {
      change = std::max(change, std::fabs(step[p]));
      scale = std::max(scale, std::fabs(f.beta[p]));
    }
    if (change < kLogisticTolerance * scale)
      break;
  }

  CorrelationReport rep;
  rep.iterations = iter;
  rep.mapped.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    rep.mapped[i] = f(xs[i]);
  rep.plcc = pearson(rep.mapped, mos);
  rep.rmse = rmse(rep.mapped, mos);
  rep.srcc = spearman(objective, mos);

  // Express the mapping in the caller's units.
  const auto& b = f.beta;
  rep.mapping.beta = {b[0], b[1] / sd, mean + sd * b[2], b[3] / sd, b[4] - b[3] * mean / sd};
  return rep;
}

//============================================================================
// Rate-distortion sweep.

struct RdPoint {
  CodecParams params;
  bool ok = false;
  std::string error;
  BitrateReport bitrate;
  AttributePsnr psnr;
  PsnrValue d1;
};

inline RdPoint
measure_rd_point(const GaussianCloud& cloud, const CodecParams& params, const CodecOptions& options)
{
  RdPoint row;
  row.params = params;
  try {
    auto stream = encode(cloud, params, options);
    auto bytes = stream.serialize();
    row.bitrate = bitrate_breakdown(stream);
    if (row.bitrate.total_bytes != bytes.size())
      throw Error("bitrate accounting does not reconcile with stream size");
    auto decoded = decode(ByteView(bytes), options);
    auto ref = canonicalize(cloud, params);
    row.psnr = attribute_psnr(ref, decoded);
    row.d1 = geometry_psnr_d1(ref.centers, decoded.centers);
    row.ok = true;
  }
  catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

// One encode/decode/measure cycle per grid entry, in grid order.  A failing
// entry is reported in its row and the sweep continues.
inline std::vector<RdPoint>
rd_sweep(const GaussianCloud& cloud, std::span<const CodecParams> grid, const CodecOptions& options = {})
{
  if (grid.empty())
    throw Error("rd_sweep: empty parameter grid");
  std::vector<RdPoint> rows;
  rows.reserve(grid.size());
  for (const auto& p : grid)
    rows.push_back(measure_rd_point(cloud, p, options));
  return rows;
}

namespace eval_detail {

  inline std::string fmt(double v)
  {
    if (std::isinf(v))
      return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
  }

  inline std::string csv_escape(std::string s)
  {
    if (s.find_first_of(",\"\n") == std::string::npos)
      return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"')
        out += '"';
      out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
  }

}  // namespace eval_detail

inline std::string
rd_csv(std::span<const RdPoint> rows)
{
  using eval_detail::fmt;
  std::ostringstream os;
  os << "param.q_geo,param.max_leaf,param.sigma_scope,param.scale_mode";
  for (auto k : kAttributeKinds)
    os << ",param.q_" << attribute_name(k) << ",param.alpha_" << attribute_name(k);
  os << ",status,header_bytes,b1_bytes,b2_bytes";
  for (auto k : kAttributeKinds)
    os << ",bytes_" << attribute_name(k);
  os << ",total_bytes";
  static const char* metrics[] = {"sh", "shY", "shU", "shV", "opacity", "scale", "rotation"};
  for (auto m : metrics)
    os << ",mse_" << m;
  for (auto m : metrics)
    os << ",psnr_" << m;
  os << ",d1_mse,d1_psnr\n";

  for (const auto& r : rows) {
    const auto& p = r.params;
    os << p.geometry_bits << ',' << p.max_leaf << ','
       << (p.sigma_scope == SigmaScope::global ? "global" : "leaf") << ','
       << (p.scale_mode == ScaleMode::group ? "group" : "component");
    for (auto k : kAttributeKinds)
      os << ',' << p[k].bits << ',' << fmt(p[k].alpha);
    if (!r.ok) {
      os << ',' << eval_detail::csv_escape("failed: " + r.error);
      // Keep column count fixed.
      os << std::string(3 + kAttributeCount + 1 + 14 + 2, ',') << '\n';
      continue;
    }
    const auto& b = r.bitrate;
    os << ",ok," << b.header_bytes << ',' << b.b1_bytes << ',' << b.b2_bytes;
    for (auto v : b.attribute_bytes)
      os << ',' << v;
    os << ',' << b.total_bytes;
    const PsnrValue* vals[] = {&r.psnr.sh,      &r.psnr.sh_y,  &r.psnr.sh_u,    &r.psnr.sh_v,
                               &r.psnr.opacity, &r.psnr.scale, &r.psnr.rotation};
    for (auto* v : vals)
      os << ',' << fmt(v->mse);
    for (auto* v : vals)
      os << ',' << fmt(v->psnr);
    os << ',' << fmt(r.d1.mse) << ',' << fmt(r.d1.psnr) << '\n';
  }
  return os.str();
}

//============================================================================
// Two-column (objective, MOS) CSV with a header row.

struct ScorePairs {
  std::string objective_name;
  std::string mos_name;
  std::vector<double> objective;
  std::vector<double> mos;
};

inline ScorePairs
parse_score_csv(std::string_view text)
{
  ScorePairs out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos)
      continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');)
      cells.push_back(cell);
    if (cells.size() != 2)
      throw Error("score csv: line " + std::to_string(lineNo) + " does not have 2 columns");
    if (header) {
      out.objective_name = cells[0];
      out.mos_name = cells[1];
      header = false;
      continue;
    }
    double v[2];
    for (int k = 0; k < 2; ++k) {
      std::size_t used = 0;
      try {
        v[k] = std::stod(cells[k], &used);
      }
      catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cells[k].find_first_not_of(" \t", used) != std::string::npos)
        throw Error(
          "score csv: line " + std::to_string(lineNo) + " has a non-numeric value '"
          + cells[k] + "'");
    }
    out.objective.push_back(v[0]);
    out.mos.push_back(v[1]);
  }
  if (header)
    throw Error("score csv: missing header row");
  return out;
}

inline std::string
correlation_csv(const CorrelationReport& r)
{
  using eval_detail::fmt;
  std::ostringstream os;
  os << "plcc,srcc,rmse,beta1,beta2,beta3,beta4,beta5\n"
     << fmt(r.plcc) << ',' << fmt(r.srcc) << ',' << fmt(r.rmse);
  for (double b : r.mapping.beta)
    os << ',' << fmt(b);
  os << '\n';
  return os.str();
}

}  // namespace ggsc
