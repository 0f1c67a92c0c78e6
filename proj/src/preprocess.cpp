#include "pdeeg/preprocess.hpp"
#include "pdeeg/error.hpp"

#include <cmath>

namespace pdeeg {

const std::vector<BandSpec>& default_bands() {
  static const std::vector<BandSpec> bands = {
      {"delta", {0.5, 4.5}},  {"theta", {4.5, 8.5}},  {"alpha", {8.5, 11.5}},
      {"beta", {15.5, 30.0}}, {"gamma", {30.0, 45.0}},
  };
  return bands;
}

Recording average_channels(const Recording& rec, std::span<const std::string> labels) {
  if (labels.empty()) throw Error(Errc::EmptySelection, "no channels selected");
  rec.validate();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rec.length());
  for (const auto& label : labels) {
    const Channel* ch = rec.find(label);
    if (ch == nullptr)
      throw Error(Errc::UnknownChannel, "'" + label + "' not in recording of " + rec.subject.id);
    sum += ch->samples;
  }
  Recording out;
  out.rate_hz = rec.rate_hz;
  out.subject = rec.subject;
  out.channels.push_back({"mean", sum / static_cast<double>(labels.size()), ChannelKind::Eeg});
  return out;
}

const BandSignal& BandSet::at(std::string_view name) const {
  for (const auto& b : bands)
    if (b.band.name == name) return b;
  throw Error(Errc::InconsistentBands, "band '" + std::string(name) + "' missing");
}

std::vector<BandFilter> design_filter_bank(std::span<const BandSpec> bands, double rate_hz,
                                           double transition_hz) {
  std::vector<BandFilter> bank;
  bank.reserve(bands.size());
  for (const auto& b : bands)
    bank.push_back(
        {b, design_fir_bandpass(b.range.low_hz, b.range.high_hz, rate_hz, transition_hz)});
  return bank;
}

BandSet split_bands(const Eigen::Ref<const Eigen::VectorXd>& x, double rate_hz,
                    std::span<const BandFilter> bank) {
  BandSet out;
  out.rate_hz = rate_hz;
  for (const auto& [band, f] : bank) {
    if (f.design_rate_hz != rate_hz)
      throw Error(Errc::InvalidBand, "filter designed for " + std::to_string(f.design_rate_hz) +
                                         " Hz applied at " + std::to_string(rate_hz) + " Hz");
    out.bands.push_back({band, apply_zero_phase(f, x)});
  }
  return out;
}

BandSet split_bands(const Eigen::Ref<const Eigen::VectorXd>& x, double rate_hz) {
  static const std::vector<BandFilter> bank = design_filter_bank(default_bands(), kTargetRateHz);
  if (rate_hz == kTargetRateHz) return split_bands(x, rate_hz, bank);
  return split_bands(x, rate_hz, design_filter_bank(default_bands(), rate_hz));
}

Eigen::MatrixXd EpochSet::matrix() const {
  Eigen::MatrixXd m(size(), epoch_len);
  for (Eigen::Index i = 0; i < size(); ++i) m.row(i) = epoch(i).transpose();
  return m;
}

Eigen::Index epoch_count(Eigen::Index n, Eigen::Index epoch_len, Eigen::Index stride) {
  if (n < epoch_len) return 0;
  return (n - epoch_len) / stride + 1;
}

EpochSet epoch(Eigen::VectorXd x, double rate_hz, double epoch_s, double overlap_s) {
  const auto len = static_cast<Eigen::Index>(std::llround(epoch_s * rate_hz));
  const auto overlap = static_cast<Eigen::Index>(std::llround(overlap_s * rate_hz));
  if (len < 1 || overlap < 0 || overlap >= len)
    throw Error(Errc::InvalidSpec, "need 0 <= overlap < epoch length");
  if (x.size() < len)
    throw Error(Errc::SignalTooShort, std::to_string(x.size()) + " samples < epoch of " +
                                          std::to_string(len));
  EpochSet es;
  es.epoch_len = len;
  es.stride = len - overlap;
  const Eigen::Index count = epoch_count(x.size(), len, es.stride);
  es.starts.resize(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) es.starts[static_cast<std::size_t>(i)] = i * es.stride;
  es.kept_mask.assign(static_cast<std::size_t>(count), true);
  es.signal = std::make_shared<const Eigen::VectorXd>(std::move(x));
  return es;
}

std::vector<bool> peak_to_peak_keep(const EpochSet& es, double p2p_limit_uv) {
  std::vector<bool> keep(es.starts.size());
  for (Eigen::Index i = 0; i < es.size(); ++i) {
    const auto e = es.epoch(i);
    keep[static_cast<std::size_t>(i)] = (e.maxCoeff() - e.minCoeff()) <= p2p_limit_uv;
  }
  return keep;
}

EpochSet keep_epochs(const EpochSet& es, const std::vector<bool>& keep) {
  EpochSet out = es;
  out.starts.clear();
  // Map the kept positions back onto the original mask.
  std::size_t kept_seen = 0;
  for (std::size_t m = 0; m < out.kept_mask.size(); ++m) {
    if (!out.kept_mask[m]) continue;
    const bool k = keep.at(kept_seen++);
    out.kept_mask[m] = k;
    if (k) out.starts.push_back(static_cast<Eigen::Index>(m) * es.stride);
  }
  if (out.starts.empty())
    throw Error(Errc::AllEpochsDropped, "every epoch of " +
                                            (es.subject.empty() ? std::string("signal")
                                                                : es.subject) +
                                            " exceeded the amplitude limit");
  return out;
}

EpochSet drop_bad_epochs(const EpochSet& es, double p2p_limit_uv) {
  if (!(p2p_limit_uv > 0.0)) throw Error(Errc::InvalidSpec, "peak-to-peak limit must be > 0");
  return keep_epochs(es, peak_to_peak_keep(es, p2p_limit_uv));
}

}  // namespace pdeeg
