#include "pdeeg/wavelet.hpp"
#include "pdeeg/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace pdeeg {

namespace {

constexpr Eigen::Index kTaps = 8;

WaveletFilterPair make_db4() {
  WaveletFilterPair p{};
  p.lowpass = {-0.010597401785069032, 0.0328830116668852,  0.030841381835560764,
               -0.18703481171909309,  -0.027983769416859854, 0.6308807679298589,
               0.7148465705529157,    0.2303778133088965};
  for (std::size_t k = 0; k < p.lowpass.size(); ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    p.highpass[k] = sign * p.lowpass[p.lowpass.size() - 1 - k];
  }
  return p;
}

Eigen::Index symmetric_index(Eigen::Index j, Eigen::Index n) {
  while (j < 0 || j >= n) {
    if (j < 0) j = -j - 1;
    if (j >= n) j = 2 * n - 1 - j;
  }
  return j;
}

Eigen::Index periodic_len(Eigen::Index n) { return n + (n % 2); }

}  // namespace

const WaveletFilterPair& db4() {
  static const WaveletFilterPair pair = make_db4();
  return pair;
}

Eigen::Index dwt_length(Eigen::Index n, BoundaryMode mode) {
  return mode == BoundaryMode::Symmetric ? (n + kTaps - 1) / 2 : periodic_len(n) / 2;
}

WaveletDecomposition dwt_db4(const Eigen::Ref<const Eigen::VectorXd>& x, BoundaryMode mode) {
  const Eigen::Index n = x.size();
  if (n < kTaps)
    throw Error(Errc::SignalTooShort, "db4 needs >= 8 samples, got " + std::to_string(n));
  const auto& [h, g] = db4();
  const Eigen::Index out_len = dwt_length(n, mode);

  WaveletDecomposition dec;
  dec.mode = mode;
  dec.original_len = n;
  dec.approx.resize(out_len);
  dec.detail.resize(out_len);

  if (mode == BoundaryMode::Symmetric) {
    for (Eigen::Index i = 0; i < out_len; ++i) {
      double a = 0.0, d = 0.0;
      for (Eigen::Index k = 0; k < kTaps; ++k) {
        const double v = x[symmetric_index(2 * i + 1 - k, n)];
        a += h[static_cast<std::size_t>(k)] * v;
        d += g[static_cast<std::size_t>(k)] * v;
      }
      dec.approx[i] = a;
      dec.detail[i] = d;
    }
  } else {
    const Eigen::Index np = periodic_len(n);
    auto at = [&](Eigen::Index j) {
      j = ((j % np) + np) % np;
      return j < n ? x[j] : x[n - 1];
    };
    for (Eigen::Index i = 0; i < out_len; ++i) {
      double a = 0.0, d = 0.0;
      for (Eigen::Index k = 0; k < kTaps; ++k) {
        const double v = at(2 * i + kTaps / 2 - k);
        a += h[static_cast<std::size_t>(k)] * v;
        d += g[static_cast<std::size_t>(k)] * v;
      }
      dec.approx[i] = a;
      dec.detail[i] = d;
    }
  }
  return dec;
}

Eigen::VectorXd idwt_db4(const WaveletDecomposition& dec, Eigen::Index original_len) {
  const Eigen::Index len = dwt_length(original_len, dec.mode);
  if (original_len < kTaps || dec.approx.size() != len || dec.detail.size() != len)
    throw Error(Errc::LengthMismatch, "coefficients of length " +
                                          std::to_string(dec.approx.size()) + "/" +
                                          std::to_string(dec.detail.size()) + " cannot rebuild " +
                                          std::to_string(original_len) + " samples");
  const auto& [h, g] = db4();

  if (dec.mode == BoundaryMode::Symmetric) {
    Eigen::VectorXd x(original_len);
    for (Eigen::Index m = 0; m < original_len; ++m) {
      double acc = 0.0;
      // i ranges over (m - 1) / 2 .. (m + 6) / 2, so 2i + 1 - m stays in [0, 7].
      const Eigen::Index i_lo = m / 2;
      const Eigen::Index i_hi = (m + kTaps - 2) / 2;
      for (Eigen::Index i = i_lo; i <= i_hi && i < len; ++i) {
        const Eigen::Index k = 2 * i + 1 - m;
        if (k < 0 || k >= kTaps) continue;
        acc += dec.approx[i] * h[static_cast<std::size_t>(k)] +
               dec.detail[i] * g[static_cast<std::size_t>(k)];
      }
      x[m] = acc;
    }
    return x;
  }

  const Eigen::Index np = periodic_len(original_len);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(np);
  for (Eigen::Index i = 0; i < len; ++i) {
    for (Eigen::Index k = 0; k < kTaps; ++k) {
      const Eigen::Index j = (((2 * i + kTaps / 2 - k) % np) + np) % np;
      full[j] += dec.approx[i] * h[static_cast<std::size_t>(k)] +
                 dec.detail[i] * g[static_cast<std::size_t>(k)];
    }
  }
  return full.head(original_len);
}

double wavelet_energy(const WaveletDecomposition& dec) {
  return dec.approx.squaredNorm() + dec.detail.squaredNorm();
}

double approximate_entropy(const Eigen::Ref<const Eigen::VectorXd>& series, int m,
                           double r_factor) {
  const Eigen::Index n = series.size();
  if (m < 1 || n <= m + 1)
    throw Error(Errc::SeriesTooShort, "approximate entropy needs more than m + 1 = " +
                                          std::to_string(m + 1) + " samples, got " +
                                          std::to_string(n));
  const double mean = series.mean();
  const double sd = std::sqrt((series.array() - mean).square().sum() / static_cast<double>(n));
  if (sd == 0.0) return 0.0;
  const double r = r_factor * sd;

  const Eigen::Index count_m = n - m + 1;  // templates of length m
  const Eigen::Index count_m1 = n - m;     // templates of length m + 1
  std::vector<long> matches_m(static_cast<std::size_t>(count_m), 1);  // self-match
  std::vector<long> matches_m1(static_cast<std::size_t>(count_m1), 1);
  const double* x = series.data();
  const Eigen::Index stride = series.innerStride();

  for (Eigen::Index i = 0; i < count_m; ++i) {
    for (Eigen::Index j = i + 1; j < count_m; ++j) {
      bool close = true;
      for (int k = 0; k < m && close; ++k)
        close = std::abs(x[(i + k) * stride] - x[(j + k) * stride]) <= r;
      if (!close) continue;
      ++matches_m[static_cast<std::size_t>(i)];
      ++matches_m[static_cast<std::size_t>(j)];
      if (j < count_m1 && std::abs(x[(i + m) * stride] - x[(j + m) * stride]) <= r) {
        ++matches_m1[static_cast<std::size_t>(i)];
        ++matches_m1[static_cast<std::size_t>(j)];
      }
    }
  }

  auto phi = [](const std::vector<long>& matches) {
    const double count = static_cast<double>(matches.size());
    double acc = 0.0;
    for (long c : matches) acc += std::log(static_cast<double>(c) / count);
    return acc / count;
  };
  return phi(matches_m) - phi(matches_m1);
}

}  // namespace pdeeg
