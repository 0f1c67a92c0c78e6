#pragma once

// Slow, direct reference implementations used to check the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

namespace oracle {

// |sum_n h[n] exp(-i 2 pi f n / rate)|
inline double fir_magnitude(const Eigen::VectorXd& h, double f, double rate) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index n = 0; n < h.size(); ++n)
    acc += h[n] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(n) / rate);
  return std::abs(acc);
}

// One-sided windowed periodogram by direct DFT.
inline Eigen::VectorXd periodogram(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                   double rate) {
  const Eigen::Index n = x.size();
  const double norm = rate * w.squaredNorm();
  Eigen::VectorXd p(n / 2 + 1);
  for (Eigen::Index k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index t = 0; t < n; ++t)
      acc += w[t] * x[t] *
             std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t) /
                                 static_cast<double>(n));
    double v = std::norm(acc) / norm;
    if (k != 0 && !(n % 2 == 0 && k == n / 2)) v *= 2.0;
    p[k] = v;
  }
  return p;
}

// Pincus Phi_m: mean log of the fraction of templates within r of each
// template (Chebyshev distance, self-match included).
inline double apen_phi(const Eigen::VectorXd& x, int m, double r) {
  const Eigen::Index count = x.size() - m + 1;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    long c = 0;
    for (Eigen::Index j = 0; j < count; ++j) {
      double d = 0.0;
      for (int k = 0; k < m; ++k) d = std::max(d, std::abs(x[i + k] - x[j + k]));
      if (d <= r) ++c;
    }
    acc += std::log(static_cast<double>(c) / static_cast<double>(count));
  }
  return acc / static_cast<double>(count);
}

inline double apen(const Eigen::VectorXd& x, int m, double r_factor) {
  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().mean());
  if (sd == 0.0) return 0.0;
  const double r = r_factor * sd;
  return apen_phi(x, m, r) - apen_phi(x, m + 1, r);
}

inline double population_variance(const Eigen::VectorXd& x) {
  return (x.array() - x.mean()).square().mean();
}

// Labels of the k nearest training rows by full sort on (distance, index).
inline double knn_fraction(const Eigen::MatrixXd& train, const Eigen::VectorXi& y,
                           const Eigen::RowVectorXd& q, int k) {
  std::vector<std::pair<double, Eigen::Index>> d;
  for (Eigen::Index i = 0; i < train.rows(); ++i)
    d.emplace_back((train.row(i) - q).norm(), i);
  std::sort(d.begin(), d.end());
  k = std::min<int>(k, static_cast<int>(train.rows()));
  int pos = 0;
  for (int i = 0; i < k; ++i) pos += y[d[static_cast<std::size_t>(i)].second];
  return static_cast<double>(pos) / k;
}

// Largest half-gap between two 2-D point sets over unit normals sampled on a
// fine angular grid, refined around the best angle.
inline double max_margin_2d(const Eigen::MatrixXd& x, const Eigen::VectorXi& y) {
  auto margin_at = [&](double theta) {
    const Eigen::Vector2d w(std::cos(theta), std::sin(theta));
    double lo_pos = INFINITY, hi_neg = -INFINITY;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double p = x.row(i).dot(w);
      if (y[i] == 1) lo_pos = std::min(lo_pos, p);
      else hi_neg = std::max(hi_neg, p);
    }
    return (lo_pos - hi_neg) / 2.0;
  };
  double best = -INFINITY, best_t = 0.0;
  for (int i = 0; i < 36000; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 36000.0;
    const double m = margin_at(t);
    if (m > best) {
      best = m;
      best_t = t;
    }
  }
  const double step = 2.0 * std::numbers::pi / 36000.0;
  for (int i = -1000; i <= 1000; ++i) best = std::max(best, margin_at(best_t + step * i / 1000.0));
  return best;
}

}  // namespace oracle
