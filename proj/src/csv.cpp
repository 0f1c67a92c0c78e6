#include "pdeeg/csv.hpp"
#include "pdeeg/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pdeeg::csv {

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(Errc::InvalidSpec, "missing CSV column '" + std::string(name) + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_number(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw Error(Errc::InvalidSpec, "not a number: '" + std::string(s) + "'");
  return v;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string to_string(const Table& table) {
  std::string out;
  auto emit = [&](const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += escape(row[i]);
    }
    out += "\r\n";
  };
  emit(table.header);
  for (const auto& r : table.rows) emit(r);
  return out;
}

Table parse(std::string_view text) {
  std::vector<Row> records;
  Row row;
  std::string field;
  bool quoted = false;
  bool at_field_start = true;
  std::size_t i = 0;
  auto end_record = [&] {
    row.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(row));
    row.clear();
    at_field_start = true;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      ++i;
      continue;
    }
    if (c == '"' && at_field_start) {
      quoted = true;
      at_field_start = false;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      at_field_start = true;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (c == '\n') {
      end_record();
    } else {
      field += c;
      at_field_start = false;
    }
    ++i;
  }
  if (quoted) throw Error(Errc::InvalidSpec, "unterminated quoted CSV field");
  if (!at_field_start || !row.empty() || !field.empty()) end_record();

  Table t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size())
      throw Error(Errc::InvalidSpec, "CSV record " + std::to_string(r) + " has " +
                                         std::to_string(records[r].size()) + " fields, header has " +
                                         std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

void write_file(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  const auto text = to_string(table);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Table feature_table(const FeatureMatrix& fm) {
  Table t;
  t.header = {"subject", "epoch", "label"};
  t.header.insert(t.header.end(), fm.columns.begin(), fm.columns.end());
  t.rows.reserve(static_cast<std::size_t>(fm.rows()));
  for (Eigen::Index r = 0; r < fm.rows(); ++r) {
    Row row;
    row.reserve(t.header.size());
    row.push_back(fm.subjects[static_cast<std::size_t>(r)]);
    row.push_back(std::to_string(fm.epochs[static_cast<std::size_t>(r)]));
    row.push_back(std::to_string(fm.labels[r]));
    for (Eigen::Index c = 0; c < fm.cols(); ++c) row.push_back(format_number(fm.values(r, c)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

FeatureMatrix feature_matrix(const Table& t) {
  const auto subject = t.column("subject");
  const auto epoch = t.column("epoch");
  const auto label = t.column("label");
  std::vector<std::size_t> feature_cols;
  FeatureMatrix fm;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == subject || c == epoch || c == label) continue;
    feature_cols.push_back(c);
    fm.columns.push_back(t.header[c]);
  }
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  fm.values.resize(n, static_cast<Eigen::Index>(feature_cols.size()));
  fm.labels.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = t.rows[static_cast<std::size_t>(r)];
    fm.subjects.push_back(row[subject]);
    fm.epochs.push_back(static_cast<int>(parse_number(row[epoch])));
    const double lab = parse_number(row[label]);
    if (lab != 0.0 && lab != 1.0)
      throw Error(Errc::InvalidSpec, "label must be 0 or 1, got '" + row[label] + "'");
    fm.labels[r] = static_cast<int>(lab);
    for (std::size_t j = 0; j < feature_cols.size(); ++j)
      fm.values(r, static_cast<Eigen::Index>(j)) = parse_number(row[feature_cols[j]]);
  }
  return fm;
}

}  // namespace pdeeg::csv
