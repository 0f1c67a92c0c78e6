#pragma once

// Channel averaging, band splitting and epoching of one recording.

#include "pdeeg/filter.hpp"
#include "pdeeg/recording.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pdeeg {

struct BandSpec {
  std::string name;
  FrequencyBand range;
};

/// delta 0.5-4.5, theta 4.5-8.5, alpha 8.5-11.5, beta 15.5-30, gamma 30-45 Hz.
/// 11.5-15.5 Hz belongs to no band.
const std::vector<BandSpec>& default_bands();

inline constexpr double kTargetRateHz = 250.0;
inline constexpr double kDefaultTransitionHz = 0.5;
inline constexpr double kDefaultEpochSeconds = 5.0;
inline constexpr double kDefaultOverlapSeconds = 1.0;
inline constexpr double kDefaultPeakToPeakUv = 150.0;

/// Sample-wise arithmetic mean of the named channels, as a one-channel
/// recording labelled "mean". Errors: EmptySelection, UnknownChannel.
Recording average_channels(const Recording& rec, std::span<const std::string> labels);

struct BandSignal {
  BandSpec band;
  Eigen::VectorXd samples;
};

struct BandSet {
  double rate_hz = kTargetRateHz;
  std::vector<BandSignal> bands;

  const BandSignal& at(std::string_view name) const;
};

struct BandFilter {
  BandSpec band;
  FirFilter filter;
};

/// One designed filter per band, sharing rate and transition width.
std::vector<BandFilter> design_filter_bank(std::span<const BandSpec> bands, double rate_hz,
                                          double transition_hz = kDefaultTransitionHz);

/// Applies each filter of `bank` (zero phase) to the signal.
/// Errors: InvalidBand (rate differs from the bank's design rate), SignalTooShort.
BandSet split_bands(const Eigen::Ref<const Eigen::VectorXd>& x, double rate_hz,
                    std::span<const BandFilter> bank);

/// split_bands with the default band table at 250 Hz.
BandSet split_bands(const Eigen::Ref<const Eigen::VectorXd>& x, double rate_hz = kTargetRateHz);

/// Fixed-length windows over a shared, read-only signal.
struct EpochSet {
  std::shared_ptr<const Eigen::VectorXd> signal;
  Eigen::Index epoch_len = 0;
  Eigen::Index stride = 0;
  std::vector<Eigen::Index> starts;  // kept epochs, ascending
  std::vector<bool> kept_mask;       // one entry per epoch originally cut
  std::string band;
  std::string subject;

  Eigen::Index size() const { return static_cast<Eigen::Index>(starts.size()); }
  auto epoch(Eigen::Index i) const {
    return signal->segment(starts[static_cast<std::size_t>(i)], epoch_len);
  }
  /// Kept epochs as rows.
  Eigen::MatrixXd matrix() const;
};

/// floor((n - epoch_len) / stride) + 1, or 0 when n < epoch_len.
Eigen::Index epoch_count(Eigen::Index n, Eigen::Index epoch_len, Eigen::Index stride);

/// Errors: SignalTooShort (fewer samples than one epoch), InvalidSpec.
EpochSet epoch(Eigen::VectorXd x, double rate_hz, double epoch_s = kDefaultEpochSeconds,
               double overlap_s = kDefaultOverlapSeconds);

/// Per-epoch keep flags: peak-to-peak amplitude <= limit.
std::vector<bool> peak_to_peak_keep(const EpochSet& es, double p2p_limit_uv);

/// Restricts `es` to epochs whose flag in `keep` (indexed like es.starts) is
/// set. Errors: AllEpochsDropped.
EpochSet keep_epochs(const EpochSet& es, const std::vector<bool>& keep);

/// Drops epochs whose peak-to-peak amplitude exceeds the limit.
/// Errors: InvalidSpec (limit <= 0), AllEpochsDropped.
EpochSet drop_bad_epochs(const EpochSet& es, double p2p_limit_uv = kDefaultPeakToPeakUv);

}  // namespace pdeeg
