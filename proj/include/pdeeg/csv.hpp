#pragma once

// RFC 4180 CSV reading and writing, and the feature-matrix CSV layout
// (subject, epoch, label, then one column per feature).

#include "pdeeg/features.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pdeeg::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;

  /// Index of a header column. Errors: InvalidSpec.
  std::size_t column(std::string_view name) const;
};

/// Shortest text that parses back to the same double; "inf", "-inf", "nan".
std::string format_number(double v);
/// Errors: InvalidSpec.
double parse_number(std::string_view s);

/// Quotes fields containing a comma, quote, CR or LF; quotes are doubled.
std::string escape(std::string_view field);

/// CRLF-terminated records.
std::string to_string(const Table& table);
/// Accepts CRLF or LF line ends and quoted fields spanning lines.
/// Errors: InvalidSpec (unterminated quote, ragged rows).
Table parse(std::string_view text);

/// Errors: IoError.
void write_file(const std::filesystem::path& path, const Table& table);
/// Errors: IoError, InvalidSpec.
Table read_file(const std::filesystem::path& path);

Table feature_table(const FeatureMatrix& fm);
/// Errors: InvalidSpec (missing subject/epoch/label columns, bad numbers).
FeatureMatrix feature_matrix(const Table& table);

}  // namespace pdeeg::csv
