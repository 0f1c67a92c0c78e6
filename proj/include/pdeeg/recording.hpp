#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace pdeeg {

enum class Group { HC, PD };

std::string_view group_name(Group g) noexcept;
/// Parses "HC" / "PD" (case-insensitive). Throws Error(InvalidRecording).
Group parse_group(std::string_view text);
/// HC = 0, PD = 1; PD is the positive class everywhere.
inline int group_label(Group g) noexcept { return g == Group::PD ? 1 : 0; }

struct Subject {
  std::string id;
  Group group = Group::HC;
  std::string session;
};

enum class ChannelKind { Eeg, Auxiliary };

/// EXG* and Status channels are auxiliary; everything else is scalp EEG.
ChannelKind classify_channel(std::string_view label);

struct Channel {
  std::string label;
  Eigen::VectorXd samples;  // microvolts
  ChannelKind kind = ChannelKind::Eeg;
};

struct Recording {
  double rate_hz = 0.0;
  std::vector<Channel> channels;
  Subject subject;

  Eigen::Index length() const {
    return channels.empty() ? 0 : channels.front().samples.size();
  }
  const Channel* find(std::string_view label) const;

  /// rate > 0, at least one channel, equal channel lengths.
  void validate() const;
};

/// The 32 scalp electrodes of the BioSemi ActiveTwo montage used for the
/// resting-state cohort; the default averaging selection.
inline constexpr std::array<std::string_view, 32> kScalpLabels = {
    "Fp1", "AF3", "F7",  "F3",  "FC1", "FC5", "T7", "C3",  "CP1", "CP5", "P7",
    "P3",  "Pz",  "PO3", "O1",  "Oz",  "O2",  "PO4", "P4", "P8",  "CP6", "CP2",
    "C4",  "T8",  "FC6", "FC2", "F4",  "F8",  "AF4", "Fp2", "Fz",  "Cz"};

/// Native rate of the raw dataset files.
inline constexpr double kRawRateHz = 512.0;

}  // namespace pdeeg
