#include "pdeeg/error.hpp"

namespace pdeeg {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::TruncatedHeader: return "TruncatedHeader";
    case Errc::NonNumericField: return "NonNumericField";
    case Errc::TruncatedBody: return "TruncatedBody";
    case Errc::GainDegenerate: return "GainDegenerate";
    case Errc::OutOfRangeSample: return "OutOfRangeSample";
    case Errc::InvalidRecording: return "InvalidRecording";
    case Errc::NyquistViolation: return "NyquistViolation";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::UnknownChannel: return "UnknownChannel";
    case Errc::EmptySelection: return "EmptySelection";
    case Errc::UpsampleUnsupported: return "UpsampleUnsupported";
    case Errc::InvalidBand: return "InvalidBand";
    case Errc::SignalTooShort: return "SignalTooShort";
    case Errc::AllEpochsDropped: return "AllEpochsDropped";
    case Errc::EmptySignal: return "EmptySignal";
    case Errc::SignalShorterThanSegment: return "SignalShorterThanSegment";
    case Errc::ZeroSpectrum: return "ZeroSpectrum";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::EmptyEpoch: return "EmptyEpoch";
    case Errc::EpochTooShort: return "EpochTooShort";
    case Errc::EmptyCohort: return "EmptyCohort";
    case Errc::InconsistentBands: return "InconsistentBands";
    case Errc::DegenerateLabels: return "DegenerateLabels";
    case Errc::SingleClass: return "SingleClass";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
    case Errc::WidthMismatch: return "WidthMismatch";
    case Errc::EmptySpace: return "EmptySpace";
    case Errc::UnsupportedModel: return "UnsupportedModel";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::EmptyConfusion: return "EmptyConfusion";
    case Errc::SingleClassTruth: return "SingleClassTruth";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::ConfigError: return "ConfigError";
    case Errc::MissingArtifact: return "MissingArtifact";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace pdeeg
