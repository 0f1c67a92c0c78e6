#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace pdeeg {

enum class Window { Rectangular, Hamming, Hann };

std::string_view window_name(Window w) noexcept;
/// Throws Error(ConfigError) for unknown names.
Window parse_window(std::string_view name);

/// Periodic (DFT-even) window of length n.
Eigen::VectorXd make_window(Window w, Eigen::Index n);

struct WelchConfig {
  Eigen::Index segment_len = 1250;
  Eigen::Index overlap_len = 250;
  Window window = Window::Hamming;
  double rate_hz = 250.0;
};

/// One-sided power spectral density in uV^2/Hz.
struct PsdEstimate {
  Eigen::VectorXd freqs_hz;
  Eigen::VectorXd power;
  WelchConfig config;

  double bin_width() const { return config.rate_hz / static_cast<double>(config.segment_len); }
  /// sum(power) * bin width: the one-sided integral.
  double integral() const { return power.sum() * bin_width(); }
};

/// Windowed periodogram scaled by 1 / (rate * sum(w^2)), doubled off DC and
/// Nyquist, so the integral equals mean((w x)^2) / mean(w^2).
/// Errors: EmptySignal.
PsdEstimate periodogram(const Eigen::Ref<const Eigen::VectorXd>& x, double rate_hz,
                        Window window = Window::Hamming);

/// Number of Welch segments for n samples.
Eigen::Index welch_segment_count(Eigen::Index n, const WelchConfig& cfg);

/// Mean of the segment periodograms. Errors: SignalShorterThanSegment,
/// InvalidSpec (overlap outside [0, segment_len)).
PsdEstimate welch_psd(const Eigen::Ref<const Eigen::VectorXd>& x, const WelchConfig& cfg = {});

/// Shannon entropy (nats) of the PSD normalized to unit sum.
/// Errors: ZeroSpectrum.
double spectral_entropy(const PsdEstimate& psd);

struct Spectrogram {
  Eigen::VectorXd freqs_hz;
  Eigen::VectorXd times_s;  // segment centres
  Eigen::MatrixXd power;    // bins x segments
};

/// Column t holds the periodogram of segment t.
/// Errors: SignalShorterThanSegment, InvalidSpec.
Spectrogram spectrogram(const Eigen::Ref<const Eigen::VectorXd>& x, double rate_hz,
                        Eigen::Index segment_len, Eigen::Index overlap_len,
                        Window window = Window::Hamming);

}  // namespace pdeeg
