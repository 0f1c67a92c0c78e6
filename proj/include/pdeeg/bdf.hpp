#pragma once

// BioSemi BDF container: 256-byte main header, 256 bytes of header per
// channel, then data records holding each channel's block of 24-bit
// little-endian two's-complement samples in turn.

#include "pdeeg/recording.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pdeeg::bdf {

inline constexpr std::size_t kBlockBytes = 256;
inline constexpr std::int32_t kDigitalMin = -8388608;
inline constexpr std::int32_t kDigitalMax = 8388607;

struct ChannelHeader {
  std::string label;
  std::string transducer;
  std::string physical_dimension;
  double physical_min = 0.0;
  double physical_max = 0.0;
  std::int64_t digital_min = 0;
  std::int64_t digital_max = 0;
  std::string prefiltering;
  std::int64_t samples_per_record = 0;

  double gain() const {
    return (physical_max - physical_min) /
           static_cast<double>(digital_max - digital_min);
  }
  double offset() const {
    return physical_min - gain() * static_cast<double>(digital_min);
  }
};

struct StartDateTime {
  int day = 1, month = 1, year = 0;
  int hour = 0, minute = 0, second = 0;
};

struct BdfHeader {
  std::string subject_id;
  std::string recording_id;
  StartDateTime start;
  std::int64_t header_bytes = 0;
  std::string reserved;
  std::int64_t num_records = 0;  // -1 when the writer did not know
  double record_duration = 0.0;  // seconds
  std::vector<ChannelHeader> channels;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t expected_header_bytes() const {
    return kBlockBytes * (channels.size() + 1);
  }
  std::size_t record_bytes() const;
};

/// Errors: BadMagic, TruncatedHeader, NonNumericField, InvalidRecording.
BdfHeader parse_header(std::span<const std::uint8_t> bytes);

/// Decodes the body that follows the header in `bytes`. All channels must
/// share one samples_per_record. Errors: TruncatedBody (short body, trailing
/// bytes, or a record count that does not divide the body), GainDegenerate.
Recording read_samples(std::span<const std::uint8_t> bytes, const BdfHeader& header);

struct Quantization {
  double physical_min = -8192.0;
  double physical_max = 8192.0;
};

/// Encodes a recording. Errors: InvalidRecording (no channels, ragged or
/// non-integral rate), OutOfRangeSample.
std::vector<std::uint8_t> write_bdf(const Recording& recording,
                                    Quantization quantization = {});

/// parse_header + read_samples.
Recording read_bdf(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pdeeg::bdf
