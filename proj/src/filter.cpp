#include "pdeeg/filter.hpp"
#include "pdeeg/error.hpp"

#include <cmath>
#include <numeric>
#include <numbers>

namespace pdeeg {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

Eigen::VectorXd hamming(Eigen::Index n) {
  Eigen::VectorXd w(n);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
  return w;
}

Eigen::VectorXd kaiser(Eigen::Index n, double beta) {
  Eigen::VectorXd w(n);
  const double denom = std::cyl_bessel_i(0.0, beta);
  const double half = static_cast<double>(n - 1) / 2.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = (static_cast<double>(i) - half) / half;
    w[i] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
  }
  return w;
}

}  // namespace

Eigen::Index hamming_tap_count(double rate_hz, double transition_hz) {
  auto n = static_cast<Eigen::Index>(std::ceil(3.3 * rate_hz / transition_hz - 1e-9));
  if (n % 2 == 0) ++n;
  return n;
}

FirFilter design_fir_bandpass(double low_hz, double high_hz, double rate_hz,
                              double transition_hz) {
  if (!(rate_hz > 0.0) || !(transition_hz > 0.0) || !(low_hz > 0.0) || !(low_hz < high_hz) ||
      !(high_hz < rate_hz / 2.0))
    throw Error(Errc::InvalidBand, "need 0 < low < high < rate/2, got " + std::to_string(low_hz) +
                                       ".." + std::to_string(high_hz) + " Hz at " +
                                       std::to_string(rate_hz) + " Hz");

  const Eigen::Index n = hamming_tap_count(rate_hz, transition_hz);
  const Eigen::VectorXd w = hamming(n);
  const double lo = low_hz / rate_hz;
  const double hi = high_hz / rate_hz;
  const double mid = static_cast<double>(n - 1) / 2.0;

  FirFilter f;
  f.taps.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = static_cast<double>(i) - mid;
    f.taps[i] = w[i] * (2.0 * hi * sinc(2.0 * hi * m) - 2.0 * lo * sinc(2.0 * lo * m));
  }
  // Exact symmetry, independent of rounding in the two halves.
  for (Eigen::Index i = 0; i < n / 2; ++i) f.taps[n - 1 - i] = f.taps[i];
  f.band = {low_hz, high_hz};
  f.transition_hz = transition_hz;
  f.design_rate_hz = rate_hz;
  f.window_name = "hamming";
  return f;
}

Eigen::VectorXd magnitude_response(const FirFilter& filter,
                                   const Eigen::Ref<const Eigen::VectorXd>& freqs_hz) {
  const Eigen::Index mid = filter.group_delay();
  Eigen::VectorXd out(freqs_hz.size());
  for (Eigen::Index j = 0; j < freqs_hz.size(); ++j) {
    const double omega = 2.0 * std::numbers::pi * freqs_hz[j] / filter.design_rate_hz;
    double amplitude = filter.taps[mid];
    for (Eigen::Index k = 1; k <= mid; ++k)
      amplitude += 2.0 * filter.taps[mid + k] * std::cos(omega * static_cast<double>(k));
    out[j] = std::abs(amplitude);
  }
  return out;
}

Eigen::VectorXd apply_zero_phase(const FirFilter& filter,
                                 const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index taps = filter.size();
  if (n <= taps)
    throw Error(Errc::SignalTooShort, "signal of " + std::to_string(n) +
                                          " samples needs more than " + std::to_string(taps));
  const Eigen::Index pad = filter.group_delay();

  Eigen::VectorXd padded(n + 2 * pad);
  padded.segment(pad, n) = x;
  for (Eigen::Index k = 1; k <= pad; ++k) {
    padded[pad - k] = x[k];
    padded[pad + n - 1 + k] = x[n - 1 - k];
  }

  // Symmetric taps: correlation equals convolution.
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = padded.segment(i, taps).dot(filter.taps);
  return y;
}

ResampleRatio resample_ratio(double source_hz, double target_hz) {
  const auto src = std::llround(source_hz * 1000.0);
  const auto dst = std::llround(target_hz * 1000.0);
  const auto g = std::gcd(src, dst);
  return {static_cast<long>(dst / g), static_cast<long>(src / g)};
}

Eigen::VectorXd resample(const Eigen::Ref<const Eigen::VectorXd>& x, double source_hz,
                         double target_hz) {
  if (!(source_hz > 0.0) || !(target_hz > 0.0))
    throw Error(Errc::InvalidSpec, "rates must be positive");
  if (target_hz > source_hz)
    throw Error(Errc::UpsampleUnsupported, std::to_string(source_hz) + " -> " +
                                               std::to_string(target_hz) + " Hz");
  if (x.size() == 0) throw Error(Errc::EmptySignal, "nothing to resample");
  const auto [up, down] = resample_ratio(source_hz, target_hz);
  if (up == down) return x;

  // Anti-alias low-pass at the upsampled rate.
  const double fast_rate = source_hz * static_cast<double>(up);
  const double cutoff = 0.9 * target_hz / 2.0 / fast_rate;  // cycles per fast sample
  const Eigen::Index half_len = 10 * std::max(up, down);
  const Eigen::Index len = 2 * half_len + 1;
  const Eigen::VectorXd w = kaiser(len, 5.0);
  Eigen::VectorXd h(len);
  for (Eigen::Index i = 0; i < len; ++i) {
    const double m = static_cast<double>(i - half_len);
    h[i] = w[i] * 2.0 * cutoff * sinc(2.0 * cutoff * m);
  }
  h *= static_cast<double>(up) / h.sum();

  const Eigen::Index n = x.size();
  const Eigen::Index out_len = (n * up + down - 1) / down;
  Eigen::VectorXd y(out_len);
  for (Eigen::Index m = 0; m < out_len; ++m) {
    const Eigen::Index t = m * down + half_len;
    Eigen::Index first = t - len + 1;
    first = first <= 0 ? 0 : (first + up - 1) / up;
    const Eigen::Index last = std::min(t / up, n - 1);
    double acc = 0.0;
    for (Eigen::Index k = first; k <= last; ++k) acc += x[k] * h[t - k * up];
    y[m] = acc;
  }
  return y;
}

}  // namespace pdeeg
