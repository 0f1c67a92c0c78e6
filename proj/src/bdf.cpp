#include "pdeeg/bdf.hpp"
#include "pdeeg/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace pdeeg::bdf {

namespace {

constexpr std::string_view kMagicTail = "BIOSEMI";

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(' ');
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(' ');
  return std::string(s.substr(first, last - first + 1));
}

class FieldReader {
 public:
  explicit FieldReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string text(std::size_t width) {
    if (pos_ + width > bytes_.size())
      throw Error(Errc::TruncatedHeader, "header ends inside a field at byte " +
                                             std::to_string(pos_));
    std::string_view raw(reinterpret_cast<const char*>(bytes_.data()) + pos_, width);
    pos_ += width;
    return trim(raw);
  }

  std::int64_t integer(std::size_t width, std::string_view name) {
    const auto field = text(width);
    std::int64_t value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end)
      throw Error(Errc::NonNumericField, std::string(name) + " = '" + field + "'");
    return value;
  }

  double real(std::size_t width, std::string_view name) {
    const auto field = text(width);
    double value = 0.0;
    const char* begin = field.data();
    if (!field.empty() && field.front() == '+') ++begin;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value))
      throw Error(Errc::NonNumericField, std::string(name) + " = '" + field + "'");
    return value;
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// Parses "dd.mm.yy" / "hh.mm.ss" into three integers.
std::array<int, 3> dotted_triplet(const std::string& field, std::string_view name) {
  std::array<int, 3> out{};
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const auto stop = i < 2 ? field.find('.', start) : field.size();
    if (stop == std::string::npos)
      throw Error(Errc::NonNumericField, std::string(name) + " = '" + field + "'");
    const char* b = field.data() + start;
    const char* e = field.data() + stop;
    auto [ptr, ec] = std::from_chars(b, e, out[i]);
    if (b == e || ec != std::errc{} || ptr != e)
      throw Error(Errc::NonNumericField, std::string(name) + " = '" + field + "'");
    start = stop + 1;
  }
  return out;
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s.substr(0, width));
  out.resize(width, ' ');
  return out;
}

// Shortest representation that fits the field width.
std::string format_number(double value, std::size_t width) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, ptr);
  for (int precision = 8; s.size() > width && precision > 0; --precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    s = buf;
  }
  if (s.size() > width)
    throw Error(Errc::InvalidRecording, "value " + s + " does not fit a header field");
  return s;
}

double reparse(const std::string& s) {
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

std::int32_t decode_int24(const std::uint8_t* p) {
  std::int32_t v = static_cast<std::int32_t>(p[0]) | (static_cast<std::int32_t>(p[1]) << 8) |
                   (static_cast<std::int32_t>(p[2]) << 16);
  if (v & 0x800000) v -= 0x1000000;
  return v;
}

void encode_int24(std::int32_t v, std::uint8_t* p) {
  const auto u = static_cast<std::uint32_t>(v);
  p[0] = static_cast<std::uint8_t>(u & 0xFF);
  p[1] = static_cast<std::uint8_t>((u >> 8) & 0xFF);
  p[2] = static_cast<std::uint8_t>((u >> 16) & 0xFF);
}

// Subject field layout written by write_bdf: "<id> <group> <session>".
Subject parse_subject_field(const std::string& field) {
  Subject subject;
  std::istringstream in(field);
  std::string group;
  in >> subject.id >> group >> subject.session;
  if (group == "HC" || group == "PD") subject.group = parse_group(group);
  return subject;
}

}  // namespace

std::size_t BdfHeader::record_bytes() const {
  std::size_t total = 0;
  for (const auto& ch : channels) total += static_cast<std::size_t>(ch.samples_per_record) * 3;
  return total;
}

BdfHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kBlockBytes)
    throw Error(Errc::TruncatedHeader,
                "need 256 bytes, got " + std::to_string(bytes.size()));
  if (bytes[0] != 0xFF ||
      !std::equal(kMagicTail.begin(), kMagicTail.end(), bytes.begin() + 1))
    throw Error(Errc::BadMagic, "identification is not 0xFF 'BIOSEMI'");

  FieldReader r(bytes);
  r.text(8);
  BdfHeader h;
  h.subject_id = r.text(80);
  h.recording_id = r.text(80);
  const auto date = dotted_triplet(r.text(8), "start date");
  const auto time = dotted_triplet(r.text(8), "start time");
  h.start = {date[0], date[1], date[2], time[0], time[1], time[2]};
  h.header_bytes = r.integer(8, "header bytes");
  h.reserved = r.text(44);
  h.num_records = r.integer(8, "number of records");
  h.record_duration = r.real(8, "record duration");
  const auto ns = r.integer(4, "number of signals");
  if (ns < 1) throw Error(Errc::InvalidRecording, "number of signals must be >= 1");
  if (h.num_records < 1 && h.num_records != -1)
    throw Error(Errc::InvalidRecording, "number of records must be >= 1 or -1");
  if (!(h.record_duration > 0.0))
    throw Error(Errc::InvalidRecording, "record duration must be positive");

  const auto n = static_cast<std::size_t>(ns);
  if (bytes.size() < kBlockBytes * (n + 1))
    throw Error(Errc::TruncatedHeader, "header declares " + std::to_string(n) +
                                           " channels but input has only " +
                                           std::to_string(bytes.size()) + " bytes");
  if (h.header_bytes != static_cast<std::int64_t>(kBlockBytes * (n + 1)))
    throw Error(Errc::TruncatedHeader, "header byte count " + std::to_string(h.header_bytes) +
                                           " does not match " + std::to_string(n) + " channels");

  h.channels.resize(n);
  for (auto& ch : h.channels) ch.label = r.text(16);
  for (auto& ch : h.channels) ch.transducer = r.text(80);
  for (auto& ch : h.channels) ch.physical_dimension = r.text(8);
  for (auto& ch : h.channels) ch.physical_min = r.real(8, "physical minimum");
  for (auto& ch : h.channels) ch.physical_max = r.real(8, "physical maximum");
  for (auto& ch : h.channels) ch.digital_min = r.integer(8, "digital minimum");
  for (auto& ch : h.channels) ch.digital_max = r.integer(8, "digital maximum");
  for (auto& ch : h.channels) ch.prefiltering = r.text(80);
  for (auto& ch : h.channels) {
    ch.samples_per_record = r.integer(8, "samples per record");
    if (ch.samples_per_record < 1)
      throw Error(Errc::InvalidRecording, "channel '" + ch.label + "' has no samples per record");
  }
  for (std::size_t i = 0; i < n; ++i) r.text(32);
  return h;
}

Recording read_samples(std::span<const std::uint8_t> bytes, const BdfHeader& header) {
  const std::size_t header_len = header.expected_header_bytes();
  if (bytes.size() < header_len)
    throw Error(Errc::TruncatedBody, "input shorter than its header");
  const std::size_t body_len = bytes.size() - header_len;
  const std::size_t record_len = header.record_bytes();

  std::int64_t records = header.num_records;
  if (records == -1) {
    if (record_len == 0 || body_len % record_len != 0)
      throw Error(Errc::TruncatedBody, "body of " + std::to_string(body_len) +
                                           " bytes is not a whole number of records");
    records = static_cast<std::int64_t>(body_len / record_len);
    if (records < 1) throw Error(Errc::TruncatedBody, "body holds no records");
  }
  const std::size_t expected = static_cast<std::size_t>(records) * record_len;
  if (body_len < expected)
    throw Error(Errc::TruncatedBody, "expected " + std::to_string(expected) + " body bytes, got " +
                                         std::to_string(body_len));
  if (body_len > expected)
    throw Error(Errc::TruncatedBody,
                std::to_string(body_len - expected) + " trailing bytes after the last record");

  const auto spr = header.channels.front().samples_per_record;
  for (const auto& ch : header.channels) {
    if (ch.samples_per_record != spr)
      throw Error(Errc::InvalidRecording, "mixed samples-per-record is not supported");
    if (ch.digital_max <= ch.digital_min || !(ch.physical_max > ch.physical_min))
      throw Error(Errc::GainDegenerate, "channel '" + ch.label + "' has an empty range");
  }

  Recording rec;
  rec.rate_hz = static_cast<double>(spr) / header.record_duration;
  rec.subject = parse_subject_field(header.subject_id);
  rec.channels.resize(header.channels.size());
  const Eigen::Index total = static_cast<Eigen::Index>(records * spr);
  for (std::size_t c = 0; c < header.channels.size(); ++c) {
    rec.channels[c].label = header.channels[c].label;
    rec.channels[c].kind = classify_channel(rec.channels[c].label);
    rec.channels[c].samples.resize(total);
  }

  const std::uint8_t* p = bytes.data() + header_len;
  for (std::int64_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < header.channels.size(); ++c) {
      const auto& ch = header.channels[c];
      const double gain = ch.gain();
      const double offset = ch.offset();
      auto& out = rec.channels[c].samples;
      const Eigen::Index base = static_cast<Eigen::Index>(r * spr);
      for (std::int64_t s = 0; s < spr; ++s, p += 3)
        out[base + s] = gain * static_cast<double>(decode_int24(p)) + offset;
    }
  }
  return rec;
}

std::vector<std::uint8_t> write_bdf(const Recording& recording, Quantization q) {
  recording.validate();
  if (!(q.physical_max > q.physical_min))
    throw Error(Errc::GainDegenerate, "quantization range is empty");

  const double rate = recording.rate_hz;
  const auto n = recording.length();
  if (n == 0) throw Error(Errc::InvalidRecording, "recording has no samples");

  // One-second records when the geometry allows, otherwise a single record.
  std::int64_t spr = 0;
  std::int64_t records = 0;
  double duration = 0.0;
  const double rounded_rate = std::round(rate);
  if (rounded_rate == rate && n % static_cast<Eigen::Index>(rate) == 0) {
    spr = static_cast<std::int64_t>(rate);
    records = n / spr;
    duration = 1.0;
  } else {
    spr = n;
    records = 1;
    duration = static_cast<double>(n) / rate;
  }

  const std::string pmin_s = format_number(q.physical_min, 8);
  const std::string pmax_s = format_number(q.physical_max, 8);
  ChannelHeader geometry;
  geometry.physical_min = reparse(pmin_s);
  geometry.physical_max = reparse(pmax_s);
  geometry.digital_min = kDigitalMin;
  geometry.digital_max = kDigitalMax;
  const double gain = geometry.gain();
  const double offset = geometry.offset();

  for (const auto& ch : recording.channels) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = ch.samples[i];
      if (!(v >= geometry.physical_min && v <= geometry.physical_max))
        throw Error(Errc::OutOfRangeSample, "channel '" + ch.label + "' sample " +
                                                std::to_string(i) + " = " + std::to_string(v));
    }
  }

  const std::size_t ns = recording.channels.size();
  std::string head;
  head.reserve(kBlockBytes * (ns + 1));
  head += '\xFF';
  head += kMagicTail;
  const auto& s = recording.subject;
  head += pad(s.id + " " + std::string(group_name(s.group)) + " " +
                  (s.session.empty() ? std::string("X") : s.session),
              80);
  head += pad("Startdate X X X pdeeg", 80);
  head += "01.01.00";
  head += "00.00.00";
  head += pad(std::to_string(kBlockBytes * (ns + 1)), 8);
  head += pad("24BIT", 44);
  head += pad(std::to_string(records), 8);
  head += pad(format_number(duration, 8), 8);
  head += pad(std::to_string(ns), 4);
  for (const auto& ch : recording.channels) head += pad(ch.label, 16);
  for (const auto& ch : recording.channels)
    head += pad(ch.kind == ChannelKind::Eeg ? "Active electrode" : "", 80);
  for (std::size_t i = 0; i < ns; ++i) head += pad("uV", 8);
  for (std::size_t i = 0; i < ns; ++i) head += pad(pmin_s, 8);
  for (std::size_t i = 0; i < ns; ++i) head += pad(pmax_s, 8);
  for (std::size_t i = 0; i < ns; ++i) head += pad(std::to_string(kDigitalMin), 8);
  for (std::size_t i = 0; i < ns; ++i) head += pad(std::to_string(kDigitalMax), 8);
  for (std::size_t i = 0; i < ns; ++i) head += pad("", 80);
  for (std::size_t i = 0; i < ns; ++i) head += pad(std::to_string(spr), 8);
  for (std::size_t i = 0; i < ns; ++i) head += pad("", 32);

  std::vector<std::uint8_t> out(head.begin(), head.end());
  const std::size_t body_start = out.size();
  out.resize(body_start + static_cast<std::size_t>(n) * ns * 3);
  std::uint8_t* p = out.data() + body_start;
  for (std::int64_t r = 0; r < records; ++r) {
    for (const auto& ch : recording.channels) {
      for (std::int64_t k = 0; k < spr; ++k, p += 3) {
        const double v = ch.samples[static_cast<Eigen::Index>(r * spr + k)];
        auto d = static_cast<std::int64_t>(std::llround((v - offset) / gain));
        d = std::clamp<std::int64_t>(d, kDigitalMin, kDigitalMax);
        encode_int24(static_cast<std::int32_t>(d), p);
      }
    }
  }
  return out;
}

Recording read_bdf(std::span<const std::uint8_t> bytes) {
  return read_samples(bytes, parse_header(bytes));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace pdeeg::bdf
