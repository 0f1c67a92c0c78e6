#pragma once

#include <Eigen/Dense>

#include <string>

namespace pdeeg {

struct FrequencyBand {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

/// Linear-phase FIR kernel plus the parameters it was designed from.
/// Immutable after design; safe to share across threads.
struct FirFilter {
  Eigen::VectorXd taps;
  FrequencyBand band;
  double transition_hz = 0.0;
  double design_rate_hz = 0.0;
  std::string window_name;

  Eigen::Index size() const { return taps.size(); }
  Eigen::Index group_delay() const { return (taps.size() - 1) / 2; }
};

/// Smallest odd integer >= 3.3 * rate / transition (hamming main-lobe rule).
Eigen::Index hamming_tap_count(double rate_hz, double transition_hz);

/// Windowed-sinc band-pass with a hamming window; the -6 dB points sit on the
/// band edges. Errors: InvalidBand.
FirFilter design_fir_bandpass(double low_hz, double high_hz, double rate_hz,
                              double transition_hz = 0.5);

/// |H(f)| of a symmetric kernel at each requested frequency.
Eigen::VectorXd magnitude_response(const FirFilter& filter,
                                   const Eigen::Ref<const Eigen::VectorXd>& freqs_hz);

/// One convolution pass, shifted by the group delay so the output is aligned
/// with the input (zero phase). Edges are reflection-padded by (N-1)/2.
/// Errors: SignalTooShort (length <= tap count).
Eigen::VectorXd apply_zero_phase(const FirFilter& filter,
                                 const Eigen::Ref<const Eigen::VectorXd>& x);

struct ResampleRatio {
  long up = 1;
  long down = 1;
};

/// Reduced up/down factors for source -> target (512 -> 250 gives 125/256).
ResampleRatio resample_ratio(double source_hz, double target_hz);

/// Polyphase rational resampling with a Kaiser-windowed anti-alias low-pass
/// cut at 0.9 of the target Nyquist. Output length ceil(n * up / down).
/// Errors: UpsampleUnsupported (target > source).
Eigen::VectorXd resample(const Eigen::Ref<const Eigen::VectorXd>& x, double source_hz,
                         double target_hz);

}  // namespace pdeeg
