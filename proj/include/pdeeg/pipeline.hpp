#pragma once

// End-to-end orchestration: cohort ingest, feature extraction, cross-validated
// training and evaluation, and plot rendering from persisted artifacts.

#include "pdeeg/eval.hpp"
#include "pdeeg/features.hpp"
#include "pdeeg/models.hpp"
#include "pdeeg/preprocess.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pdeeg {

inline constexpr int kConfigVersion = 1;

struct SynthConfig {
  int n_hc = 16;
  int n_pd = 15;
  double contrast = 1.0;
  double duration_s = 180.0;
};

/// Defaults reproduce the published pipeline constants.
struct PipelineConfig {
  std::filesystem::path input_dir = "data";
  std::string manifest = "manifest.json";  // relative to input_dir
  std::filesystem::path output_dir = "out";
  std::vector<std::string> channels;       // empty: the 32 scalp electrodes
  std::string subjects;                    // comma-separated ids; "x*" matches a prefix
  double resample_hz = kTargetRateHz;
  double transition_hz = kDefaultTransitionHz;
  std::vector<BandSpec> bands = default_bands();
  double epoch_s = kDefaultEpochSeconds;
  double overlap_s = kDefaultOverlapSeconds;
  double p2p_limit_uv = kDefaultPeakToPeakUv;
  WelchConfig welch;
  int apen_m = 2;
  double apen_r_factor = 0.2;
  BoundaryMode wavelet_mode = BoundaryMode::Symmetric;
  std::vector<ModelKind> classifiers = {ModelKind::RandomForest, ModelKind::ExtraTrees,
                                        ModelKind::LinearSvm, ModelKind::Knn};
  HyperParams params;
  CvOptions cv;
  std::uint64_t seed = 42;
  SynthConfig synth;

  std::vector<std::string> channel_list() const;
  FeatureConfig feature_config() const;
};

/// Errors: ConfigError (unknown key, wrong type, version mismatch, non-positive
/// numeric field).
PipelineConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const PipelineConfig& config);
/// Errors: IoError, ConfigError.
PipelineConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 over the canonical JSON text, as 16 hex digits.
std::string config_hash(const PipelineConfig& config);

/// Process exit status for an error: 1 config, 2 data, 3 numeric.
int exit_code(Errc code);

// ---------------------------------------------------------------------------

struct CohortEntry {
  std::string file;
  Subject subject;
  int channels = 0;
  double rate_hz = 0.0;
  double duration_s = 0.0;
};

struct IngestResult {
  std::vector<CohortEntry> entries;  // sorted by file name
  int n_hc = 0;
  int n_pd = 0;

  std::string summary() const;  // "16 HC / 15 PD"
};

/// Writes the synthetic cohort as BDF files plus manifest.json into
/// config.input_dir. Returns the file names.
std::vector<std::string> cmd_synth(const PipelineConfig& config);

/// Parses every labelled BDF file. Errors: ConfigError (missing directory or
/// manifest, empty cohort, unlabelled file), or a data error listing every
/// file that failed to parse.
IngestResult cmd_ingest(const PipelineConfig& config, std::ostream& log);

struct SubjectLog {
  std::string subject;
  int kept = 0;
  int dropped = 0;
};

struct FeaturesResult {
  FeatureMatrix matrix;
  std::vector<SubjectLog> subjects;
  std::filesystem::path csv_path;
};

/// Writes features.csv, features.json, spectrogram.csv and the manifest.
FeaturesResult cmd_features(const PipelineConfig& config, std::ostream& log);

struct TrainEvalResult {
  std::vector<CvReport> reports;
  std::vector<std::string> failures;  // "<kind>: <error>"
  std::string summary;                // table layout, one row per classifier
};

/// Cross-validates every configured classifier on features.csv and writes the
/// run artifacts. A failing classifier is recorded and the rest still run.
TrainEvalResult cmd_train_eval(const PipelineConfig& config, std::ostream& log);

/// Renders SVG plots from the artifacts in `dir`. Returns written paths.
/// Errors: MissingArtifact.
std::vector<std::filesystem::path> cmd_report(const std::filesystem::path& dir,
                                              std::ostream& log);

/// Table layout: classifier, accuracy %, precision %, recall %, F1, ROC AUC.
std::string summary_table(const std::vector<CvReport>& reports);

}  // namespace pdeeg
