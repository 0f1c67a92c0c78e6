#include "pdeeg/synth.hpp"
#include "pdeeg/error.hpp"
#include "pdeeg/fft.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace pdeeg::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Eigen::VectorXd rescale(Eigen::VectorXd x, double std_uv) {
  x.array() -= x.mean();
  const double sd = std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
  if (sd > 0.0) x *= std_uv / sd;
  return x;
}

// Random-phase synthesis from a per-bin amplitude profile.
template <typename Profile>
Eigen::VectorXd shaped_noise(Eigen::Index n, std::uint64_t seed, Profile amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd half(n / 2 + 1);
  for (Eigen::Index k = 0; k < half.size(); ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    half[k] = amplitude(k) * std::complex<double>(re, im);
  }
  half[0] = 0.0;
  return irfft(half, n);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x5851F42D4C957F2DULL));
}

Recording sinusoid(const SynthSpec& spec) {
  if (!(spec.rate_hz > 0.0) || !(spec.duration_s > 0.0))
    throw Error(Errc::InvalidSpec, "rate and duration must be positive");
  if (spec.noise_std_uv < 0.0) throw Error(Errc::InvalidSpec, "noise std must be >= 0");
  for (const auto& tone : spec.components)
    if (!(spec.rate_hz > 2.0 * tone.freq_hz))
      throw Error(Errc::NyquistViolation, std::to_string(tone.freq_hz) + " Hz at " +
                                              std::to_string(spec.rate_hz) + " Hz sampling");

  const auto n = static_cast<Eigen::Index>(std::llround(spec.rate_hz * spec.duration_s));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (const auto& tone : spec.components) {
    const double w = 2.0 * std::numbers::pi * tone.freq_hz / spec.rate_hz;
    for (Eigen::Index i = 0; i < n; ++i)
      x[i] += tone.amplitude_uv * std::sin(w * static_cast<double>(i) + tone.phase_rad);
  }
  if (spec.noise_std_uv > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, spec.noise_std_uv);
    for (Eigen::Index i = 0; i < n; ++i) x[i] += normal(rng);
  }

  Recording rec;
  rec.rate_hz = spec.rate_hz;
  rec.subject.id = "synthetic";
  rec.channels.push_back({"SYN", std::move(x), ChannelKind::Eeg});
  return rec;
}

Eigen::VectorXd pink_noise(Eigen::Index n, double std_uv, std::uint64_t seed) {
  const double dn = static_cast<double>(n);
  return rescale(shaped_noise(n, seed,
                              [dn](Eigen::Index k) {
                                return k == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(k) / dn);
                              }),
                 std_uv);
}

Eigen::VectorXd band_noise(Eigen::Index n, double rate_hz, double low_hz, double high_hz,
                           double std_uv, std::uint64_t seed) {
  const double df = rate_hz / static_cast<double>(n);
  return rescale(shaped_noise(n, seed,
                              [=](Eigen::Index k) {
                                const double f = static_cast<double>(k) * df;
                                return (f >= low_hz && f <= high_hz) ? 1.0 : 0.0;
                              }),
                 std_uv);
}

std::vector<Recording> cohort(int n_hc, int n_pd, double contrast, std::uint64_t seed,
                              const CohortOptions& options) {
  if (n_hc < 1 || n_pd < 1) throw Error(Errc::InvalidSpec, "each group needs >= 1 subject");
  if (!(contrast >= 0.0)) throw Error(Errc::InvalidSpec, "contrast must be >= 0");
  if (!(options.rate_hz > 2.0 * options.alpha_high_hz) || !(options.duration_s > 0.0))
    throw Error(Errc::InvalidSpec, "invalid cohort rate or duration");

  const auto n = static_cast<Eigen::Index>(std::llround(options.rate_hz * options.duration_s));
  const int total = n_hc + n_pd;
  std::vector<Recording> out;
  out.reserve(static_cast<std::size_t>(total));

  for (int s = 0; s < total; ++s) {
    const bool pd = s >= n_hc;
    const std::uint64_t subject_seed = derive_seed(seed, static_cast<std::uint64_t>(s));
    std::uint64_t stream = 0;
    auto next_seed = [&] { return derive_seed(subject_seed, stream++); };

    Eigen::VectorXd source = pink_noise(n, options.source_std_uv, next_seed());
    double gain = 1.0;
    if (pd && contrast > 0.0) {
      const double alpha_std = options.source_std_uv * std::sqrt(contrast);
      source += band_noise(n, options.rate_hz, options.alpha_low_hz, options.alpha_high_hz,
                           alpha_std, next_seed());
      gain += options.elevation_per_contrast * contrast;
    }

    Recording rec;
    rec.rate_hz = options.rate_hz;
    char id[32];
    std::snprintf(id, sizeof id, "%s%02d", pd ? "pd" : "hc", pd ? s - n_hc + 1 : s + 1);
    rec.subject = {id, pd ? Group::PD : Group::HC, "rest"};

    for (const auto label : kScalpLabels) {
      Eigen::VectorXd x = gain * (source + pink_noise(n, options.channel_std_uv, next_seed()));
      rec.channels.push_back({std::string(label), std::move(x), ChannelKind::Eeg});
    }
    for (int a = 0; a < options.aux_channels; ++a) {
      Eigen::VectorXd x = pink_noise(n, options.channel_std_uv, next_seed());
      rec.channels.push_back({"EXG" + std::to_string(a + 1), std::move(x), ChannelKind::Auxiliary});
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace pdeeg::synth
