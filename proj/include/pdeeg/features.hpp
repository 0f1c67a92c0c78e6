#pragma once

// Eight scalar features per band-filtered epoch: time domain (mean, std),
// frequency domain (band power, spectral entropy), time-frequency (wavelet
// energy) and nonlinear (approximate entropy of cA, Hjorth activity and
// mobility).

#include "pdeeg/error.hpp"
#include "pdeeg/filter.hpp"
#include "pdeeg/preprocess.hpp"
#include "pdeeg/recording.hpp"
#include "pdeeg/spectral.hpp"
#include "pdeeg/wavelet.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pdeeg {

inline constexpr std::size_t kFeaturesPerBand = 8;

inline constexpr std::array<std::string_view, kFeaturesPerBand> kFeatureNames = {
    "mean",           "std",          "band_power",      "spectral_entropy",
    "energy",         "approx_entropy", "hjorth_activity", "hjorth_mobility"};

struct FeatureVector {
  double mean = 0.0;
  double std = 0.0;
  double band_power = 0.0;
  double spectral_entropy = 0.0;
  double energy = 0.0;
  double approx_entropy = 0.0;
  double hjorth_activity = 0.0;
  double hjorth_mobility = 0.0;

  /// Values in kFeatureNames order.
  std::array<double, kFeaturesPerBand> values() const {
    return {mean,   std,           band_power,      spectral_entropy,
            energy, approx_entropy, hjorth_activity, hjorth_mobility};
  }
};

struct TimeStats {
  double mean = 0.0;
  double std = 0.0;
};

/// Arithmetic mean and population standard deviation. Errors: EmptyEpoch.
template <typename Derived>
TimeStats time_stats(const Eigen::MatrixBase<Derived>& epoch) {
  const auto n = epoch.size();
  if (n == 0) throw Error(Errc::EmptyEpoch, "time statistics of an empty epoch");
  const double mean = epoch.mean();
  const double var = (epoch.array() - mean).square().sum() / static_cast<double>(n);
  return {mean, std::sqrt(var)};
}

struct Hjorth {
  double activity = 0.0;
  double mobility = 0.0;
};

/// activity = var(y); mobility = sqrt(var(y') / var(y)) with y' the first
/// difference times the sampling rate. Zero variance gives mobility 0.
/// Errors: EpochTooShort (fewer than 2 samples).
template <typename Derived>
Hjorth hjorth(const Eigen::MatrixBase<Derived>& epoch, double rate_hz) {
  const auto n = epoch.size();
  if (n < 2) throw Error(Errc::EpochTooShort, "Hjorth parameters need >= 2 samples");
  auto variance = [](const auto& v) {
    const double m = v.mean();
    return (v.array() - m).square().sum() / static_cast<double>(v.size());
  };
  const Eigen::VectorXd y = epoch;
  const Eigen::VectorXd dy = (y.tail(n - 1) - y.head(n - 1)) * rate_hz;
  const double activity = variance(y);
  const double mobility = activity > 0.0 ? std::sqrt(variance(dy) / activity) : 0.0;
  return {activity, mobility};
}

struct FeatureConfig {
  WelchConfig welch;
  int apen_m = 2;
  double apen_r_factor = 0.2;
  BoundaryMode wavelet_mode = BoundaryMode::Symmetric;
};

/// Mean PSD over bins with low <= f <= high (0 when no bin falls inside).
double band_power(const PsdEstimate& psd, FrequencyBand band);

/// All eight features of one epoch. A zero spectrum yields entropy 0.
/// Errors: EpochTooShort (shorter than a Welch segment), propagated.
FeatureVector extract_epoch_features(const Eigen::Ref<const Eigen::VectorXd>& epoch,
                                     FrequencyBand band, const FeatureConfig& config = {});

/// "<band>_<feature>" for every band, band-major.
std::vector<std::string> feature_column_names(std::span<const BandSpec> bands);

/// Epoched band signals of one subject; every EpochSet shares the same kept
/// epochs.
struct SubjectEpochs {
  Subject subject;
  std::vector<EpochSet> bands;
};

struct FeatureMatrix {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;     // rows = epochs
  Eigen::VectorXi labels;     // 0 = HC, 1 = PD
  std::vector<std::string> subjects;
  std::vector<int> epochs;    // original epoch index within the subject

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// One row per (subject, kept epoch) in input order. Errors: EmptyCohort,
/// InconsistentBands.
FeatureMatrix build_feature_matrix(std::span<const SubjectEpochs> cohort,
                                   std::span<const BandSpec> bands = default_bands(),
                                   const FeatureConfig& config = {});

}  // namespace pdeeg
