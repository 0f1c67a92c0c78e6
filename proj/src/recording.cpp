#include "pdeeg/recording.hpp"
#include "pdeeg/error.hpp"

#include <algorithm>
#include <cctype>

namespace pdeeg {

namespace {
bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}
}  // namespace

std::string_view group_name(Group g) noexcept { return g == Group::PD ? "PD" : "HC"; }

Group parse_group(std::string_view text) {
  if (iequals(text, "HC")) return Group::HC;
  if (iequals(text, "PD")) return Group::PD;
  throw Error(Errc::InvalidRecording, "unknown group '" + std::string(text) + "'");
}

ChannelKind classify_channel(std::string_view label) {
  if (label.size() >= 3 && iequals(label.substr(0, 3), "EXG")) return ChannelKind::Auxiliary;
  if (iequals(label, "Status")) return ChannelKind::Auxiliary;
  return ChannelKind::Eeg;
}

const Channel* Recording::find(std::string_view label) const {
  for (const auto& ch : channels)
    if (ch.label == label) return &ch;
  return nullptr;
}

void Recording::validate() const {
  if (!(rate_hz > 0.0)) throw Error(Errc::InvalidRecording, "sampling rate must be positive");
  if (channels.empty()) throw Error(Errc::InvalidRecording, "recording has no channels");
  const auto n = channels.front().samples.size();
  for (const auto& ch : channels)
    if (ch.samples.size() != n)
      throw Error(Errc::InvalidRecording, "channel '" + ch.label + "' length differs");
}

}  // namespace pdeeg
