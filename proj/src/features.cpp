#include "pdeeg/features.hpp"
#include "pdeeg/parallel.hpp"

namespace pdeeg {

double band_power(const PsdEstimate& psd, FrequencyBand band) {
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index k = 0; k < psd.freqs_hz.size(); ++k) {
    const double f = psd.freqs_hz[k];
    if (f >= band.low_hz && f <= band.high_hz) {
      sum += psd.power[k];
      ++count;
    }
  }
  return count > 0 ? sum / count : 0.0;
}

FeatureVector extract_epoch_features(const Eigen::Ref<const Eigen::VectorXd>& epoch,
                                     FrequencyBand band, const FeatureConfig& config) {
  if (epoch.size() < config.welch.segment_len)
    throw Error(Errc::EpochTooShort, "epoch of " + std::to_string(epoch.size()) +
                                         " samples is shorter than a Welch segment");
  FeatureVector fv;
  const auto ts = time_stats(epoch);
  fv.mean = ts.mean;
  fv.std = ts.std;

  const PsdEstimate psd = welch_psd(epoch, config.welch);
  fv.band_power = band_power(psd, band);
  try {
    fv.spectral_entropy = spectral_entropy(psd);
  } catch (const Error& e) {
    if (e.code() != Errc::ZeroSpectrum) throw;
    fv.spectral_entropy = 0.0;
  }

  const auto dec = dwt_db4(epoch, config.wavelet_mode);
  fv.energy = wavelet_energy(dec);
  fv.approx_entropy = approximate_entropy(dec.approx, config.apen_m, config.apen_r_factor);

  const auto hj = hjorth(epoch, config.welch.rate_hz);
  fv.hjorth_activity = hj.activity;
  fv.hjorth_mobility = hj.mobility;
  return fv;
}

std::vector<std::string> feature_column_names(std::span<const BandSpec> bands) {
  std::vector<std::string> names;
  names.reserve(bands.size() * kFeaturesPerBand);
  for (const auto& b : bands)
    for (const auto f : kFeatureNames) names.push_back(b.name + "_" + std::string(f));
  return names;
}

FeatureMatrix build_feature_matrix(std::span<const SubjectEpochs> cohort,
                                   std::span<const BandSpec> bands, const FeatureConfig& config) {
  if (cohort.empty()) throw Error(Errc::EmptyCohort, "no subjects");

  struct Task {
    std::size_t subject;
    Eigen::Index epoch;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < cohort.size(); ++s) {
    const auto& subj = cohort[s];
    if (subj.bands.size() != bands.size())
      throw Error(Errc::InconsistentBands, subj.subject.id + " has " +
                                               std::to_string(subj.bands.size()) + " bands, need " +
                                               std::to_string(bands.size()));
    for (std::size_t b = 0; b < bands.size(); ++b) {
      const auto& es = subj.bands[b];
      if (es.starts != subj.bands.front().starts || es.epoch_len != subj.bands.front().epoch_len)
        throw Error(Errc::InconsistentBands, subj.subject.id + " band '" + bands[b].name +
                                                 "' keeps different epochs");
      if (!es.band.empty() && es.band != bands[b].name)
        throw Error(Errc::InconsistentBands, subj.subject.id + " band order: expected '" +
                                                 bands[b].name + "', got '" + es.band + "'");
    }
    for (Eigen::Index e = 0; e < subj.bands.front().size(); ++e) tasks.push_back({s, e});
  }

  FeatureMatrix fm;
  fm.columns = feature_column_names(bands);
  const auto rows = static_cast<Eigen::Index>(tasks.size());
  fm.values.resize(rows, static_cast<Eigen::Index>(fm.columns.size()));
  fm.labels.resize(rows);
  fm.subjects.resize(tasks.size());
  fm.epochs.resize(tasks.size());

  parallel_for(tasks.size(), [&](std::size_t t) {
    const auto [s, e] = tasks[t];
    const auto& subj = cohort[s];
    const auto row = static_cast<Eigen::Index>(t);
    for (std::size_t b = 0; b < bands.size(); ++b) {
      const auto fv = extract_epoch_features(subj.bands[b].epoch(e), bands[b].range, config).values();
      for (std::size_t f = 0; f < kFeaturesPerBand; ++f)
        fm.values(row, static_cast<Eigen::Index>(b * kFeaturesPerBand + f)) = fv[f];
    }
    fm.labels[row] = group_label(subj.subject.group);
    fm.subjects[t] = subj.subject.id;
    fm.epochs[t] = static_cast<int>(subj.bands.front().starts[static_cast<std::size_t>(e)] /
                                    subj.bands.front().stride);
  });
  return fm;
}

}  // namespace pdeeg
