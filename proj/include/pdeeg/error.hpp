#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdeeg {

/// Named failure conditions raised across the pipeline.
enum class Errc {
  // container parsing / writing
  BadMagic,
  TruncatedHeader,
  NonNumericField,
  TruncatedBody,
  GainDegenerate,
  OutOfRangeSample,
  InvalidRecording,
  // synthesis
  NyquistViolation,
  InvalidSpec,
  // preprocessing
  UnknownChannel,
  EmptySelection,
  UpsampleUnsupported,
  InvalidBand,
  SignalTooShort,
  AllEpochsDropped,
  // spectral
  EmptySignal,
  SignalShorterThanSegment,
  ZeroSpectrum,
  // wavelet
  LengthMismatch,
  SeriesTooShort,
  // features
  EmptyEpoch,
  EpochTooShort,
  EmptyCohort,
  InconsistentBands,
  // models
  DegenerateLabels,
  SingleClass,
  NoConvergence,
  EmptyTrainingSet,
  WidthMismatch,
  EmptySpace,
  UnsupportedModel,
  // evaluation
  KTooLarge,
  EmptyConfusion,
  SingleClassTruth,
  RankDeficient,
  // orchestration
  ConfigError,
  MissingArtifact,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), detail_(what) {}

  Errc code() const noexcept { return code_; }
  /// The message without the error name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace pdeeg
