#pragma once

// Seeded synthetic EEG: tone mixtures for unit fixtures and a labelled
// two-group cohort whose PD members carry extra alpha power.

#include "pdeeg/recording.hpp"

#include <cstdint>
#include <vector>

namespace pdeeg::synth {

struct Tone {
  double freq_hz = 0.0;
  double amplitude_uv = 1.0;
  double phase_rad = 0.0;
};

struct SynthSpec {
  double rate_hz = 250.0;
  double duration_s = 1.0;
  std::vector<Tone> components;
  double noise_std_uv = 0.0;
  std::uint64_t seed = 0;
};

/// Single channel "SYN": sum of tones plus seeded gaussian noise.
/// Errors: NyquistViolation, InvalidSpec.
Recording sinusoid(const SynthSpec& spec);

/// Zero-mean noise with power spectrum proportional to 1/f, scaled to the
/// requested sample standard deviation.
Eigen::VectorXd pink_noise(Eigen::Index n, double std_uv, std::uint64_t seed);

/// Gaussian noise confined to [low_hz, high_hz] (flat in-band spectrum),
/// scaled to the requested sample standard deviation.
Eigen::VectorXd band_noise(Eigen::Index n, double rate_hz, double low_hz, double high_hz,
                           double std_uv, std::uint64_t seed);

struct CohortOptions {
  double rate_hz = kRawRateHz;
  double duration_s = 180.0;
  /// Shared cortical source, present on every scalp channel.
  double source_std_uv = 10.0;
  /// Independent per-channel pink noise.
  double channel_std_uv = 10.0;
  /// PD amplitude gain per unit contrast: gain = 1 + elevation * contrast.
  double elevation_per_contrast = 0.1;
  double alpha_low_hz = 8.5;
  double alpha_high_hz = 11.5;
  /// Eight auxiliary EXG channels follow the 32 scalp channels (40 total).
  int aux_channels = 8;
};

/// n_hc healthy controls followed by n_pd patients. `contrast` is the extra
/// alpha-band variance of the PD source relative to source_std_uv^2; zero
/// contrast makes the groups identically distributed.
/// Errors: InvalidSpec (counts < 1, negative contrast).
std::vector<Recording> cohort(int n_hc, int n_pd, double contrast, std::uint64_t seed,
                              const CohortOptions& options = {});

/// Stream seed for (seed, index) pairs; distinct indices give unrelated
/// streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace pdeeg::synth
