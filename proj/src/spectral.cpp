#include "pdeeg/spectral.hpp"
#include "pdeeg/error.hpp"
#include "pdeeg/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace pdeeg {

std::string_view window_name(Window w) noexcept {
  switch (w) {
    case Window::Rectangular: return "rectangular";
    case Window::Hamming: return "hamming";
    case Window::Hann: return "hann";
  }
  return "unknown";
}

Window parse_window(std::string_view name) {
  if (name == "rectangular" || name == "boxcar") return Window::Rectangular;
  if (name == "hamming") return Window::Hamming;
  if (name == "hann") return Window::Hann;
  throw Error(Errc::ConfigError, "unknown window '" + std::string(name) + "'");
}

Eigen::VectorXd make_window(Window w, Eigen::Index n) {
  Eigen::VectorXd out = Eigen::VectorXd::Ones(n);
  const double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = std::cos(two_pi * static_cast<double>(i) / static_cast<double>(n));
    if (w == Window::Hamming) out[i] = 0.54 - 0.46 * c;
    if (w == Window::Hann) out[i] = 0.5 - 0.5 * c;
  }
  return out;
}

namespace {

// Accumulates the scaled one-sided periodogram of `x` into `acc`.
void accumulate_periodogram(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::VectorXd& window, double scale, Eigen::VectorXd& acc) {
  const Eigen::Index n = x.size();
  const Eigen::VectorXcd spectrum = rfft(x.cwiseProduct(window));
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
    double p = std::norm(spectrum[k]) * scale;
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    if (!unpaired) p *= 2.0;
    acc[k] += p;
  }
}

Eigen::VectorXd bin_freqs(Eigen::Index n, double rate_hz) {
  Eigen::VectorXd f(n / 2 + 1);
  for (Eigen::Index k = 0; k < f.size(); ++k)
    f[k] = static_cast<double>(k) * rate_hz / static_cast<double>(n);
  return f;
}

void check_segments(Eigen::Index n, Eigen::Index segment_len, Eigen::Index overlap_len) {
  if (segment_len < 1 || overlap_len < 0 || overlap_len >= segment_len)
    throw Error(Errc::InvalidSpec, "need 0 <= overlap < segment length");
  if (n < segment_len)
    throw Error(Errc::SignalShorterThanSegment, std::to_string(n) + " samples < segment of " +
                                                    std::to_string(segment_len));
}

}  // namespace

PsdEstimate periodogram(const Eigen::Ref<const Eigen::VectorXd>& x, double rate_hz,
                        Window window) {
  if (x.size() == 0) throw Error(Errc::EmptySignal, "periodogram of an empty signal");
  const Eigen::Index n = x.size();
  const Eigen::VectorXd w = make_window(window, n);
  PsdEstimate psd;
  psd.config = {n, 0, window, rate_hz};
  psd.freqs_hz = bin_freqs(n, rate_hz);
  psd.power = Eigen::VectorXd::Zero(n / 2 + 1);
  accumulate_periodogram(x, w, 1.0 / (rate_hz * w.squaredNorm()), psd.power);
  return psd;
}

Eigen::Index welch_segment_count(Eigen::Index n, const WelchConfig& cfg) {
  if (n < cfg.segment_len) return 0;
  return (n - cfg.segment_len) / (cfg.segment_len - cfg.overlap_len) + 1;
}

PsdEstimate welch_psd(const Eigen::Ref<const Eigen::VectorXd>& x, const WelchConfig& cfg) {
  check_segments(x.size(), cfg.segment_len, cfg.overlap_len);
  const Eigen::Index m = cfg.segment_len;
  const Eigen::Index step = m - cfg.overlap_len;
  const Eigen::Index segments = welch_segment_count(x.size(), cfg);
  const Eigen::VectorXd w = make_window(cfg.window, m);
  const double scale = 1.0 / (cfg.rate_hz * w.squaredNorm());

  PsdEstimate psd;
  psd.config = cfg;
  psd.freqs_hz = bin_freqs(m, cfg.rate_hz);
  psd.power = Eigen::VectorXd::Zero(m / 2 + 1);
  for (Eigen::Index s = 0; s < segments; ++s)
    accumulate_periodogram(x.segment(s * step, m), w, scale, psd.power);
  psd.power /= static_cast<double>(segments);
  return psd;
}

double spectral_entropy(const PsdEstimate& psd) {
  const double total = psd.power.sum();
  if (!(total > 0.0)) throw Error(Errc::ZeroSpectrum, "spectrum has no power");
  double h = 0.0;
  for (Eigen::Index k = 0; k < psd.power.size(); ++k) {
    const double p = psd.power[k] / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

Spectrogram spectrogram(const Eigen::Ref<const Eigen::VectorXd>& x, double rate_hz,
                        Eigen::Index segment_len, Eigen::Index overlap_len, Window window) {
  check_segments(x.size(), segment_len, overlap_len);
  const Eigen::Index step = segment_len - overlap_len;
  const Eigen::Index segments = (x.size() - segment_len) / step + 1;
  const Eigen::VectorXd w = make_window(window, segment_len);
  const double scale = 1.0 / (rate_hz * w.squaredNorm());

  Spectrogram sg;
  sg.freqs_hz = bin_freqs(segment_len, rate_hz);
  sg.times_s.resize(segments);
  sg.power = Eigen::MatrixXd::Zero(segment_len / 2 + 1, segments);
  Eigen::VectorXd column(segment_len / 2 + 1);
  for (Eigen::Index s = 0; s < segments; ++s) {
    column.setZero();
    accumulate_periodogram(x.segment(s * step, segment_len), w, scale, column);
    sg.power.col(s) = column;
    sg.times_s[s] = (static_cast<double>(s * step) + static_cast<double>(segment_len) / 2.0) / rate_hz;
  }
  return sg;
}

}  // namespace pdeeg
