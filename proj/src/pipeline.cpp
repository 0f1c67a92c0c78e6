#include "pdeeg/pipeline.hpp"

#include "pdeeg/bdf.hpp"
#include "pdeeg/csv.hpp"
#include "pdeeg/error.hpp"
#include "pdeeg/filter.hpp"
#include "pdeeg/parallel.hpp"
#include "pdeeg/plot.hpp"
#include "pdeeg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace pdeeg {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

namespace {

// Reads known keys from one JSON object and rejects any it did not consume.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(Errc::ConfigError, path_ + "." + key + ": wrong type");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Reader sub(const char* key) {
    seen_.insert(key);
    return Reader(j_.contains(key) ? j_.at(key) : empty(), path_ + "." + key);
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? j_.at(key) : empty();
  }

  void done() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail("unknown key '" + k + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::ConfigError, path_ + ": " + msg);
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void positive(double v, const char* name) {
  if (!(v > 0.0)) throw Error(Errc::ConfigError, std::string(name) + " must be positive");
}

std::string_view mode_name(BoundaryMode m) {
  return m == BoundaryMode::Symmetric ? "symmetric" : "periodic";
}

}  // namespace

std::vector<std::string> PipelineConfig::channel_list() const {
  if (!channels.empty()) return channels;
  return {kScalpLabels.begin(), kScalpLabels.end()};
}

FeatureConfig PipelineConfig::feature_config() const {
  FeatureConfig fc;
  fc.welch = welch;
  fc.welch.rate_hz = resample_hz;
  fc.apen_m = apen_m;
  fc.apen_r_factor = apen_r_factor;
  fc.wavelet_mode = wavelet_mode;
  return fc;
}

PipelineConfig config_from_json(const json& doc) {
  PipelineConfig c;
  Reader root(doc, "config");
  int version = kConfigVersion;
  root.read("version", version);
  if (version != kConfigVersion)
    throw Error(Errc::ConfigError, "unsupported config version " + std::to_string(version));

  {
    auto in = root.sub("input");
    std::string dir = c.input_dir.string();
    in.read("dir", dir);
    c.input_dir = dir;
    in.read("manifest", c.manifest);
    in.read("subjects", c.subjects);
    in.done();
  }
  {
    std::string out = c.output_dir.string();
    root.read("output_dir", out);
    c.output_dir = out;
  }
  {
    auto pre = root.sub("preprocess");
    pre.read("channels", c.channels);
    pre.read("resample_hz", c.resample_hz);
    pre.read("transition_hz", c.transition_hz);
    pre.read("epoch_s", c.epoch_s);
    pre.read("overlap_s", c.overlap_s);
    pre.read("p2p_limit_uv", c.p2p_limit_uv);
    if (pre.has("bands")) {
      const auto& arr = pre.raw("bands");
      if (!arr.is_array() || arr.empty()) pre.fail("bands must be a non-empty array");
      c.bands.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Reader b(arr[i], "config.preprocess.bands[" + std::to_string(i) + "]");
        BandSpec spec;
        b.read("name", spec.name);
        b.read("low_hz", spec.range.low_hz);
        b.read("high_hz", spec.range.high_hz);
        b.done();
        if (spec.name.empty()) b.fail("band needs a name");
        if (!(spec.range.low_hz > 0.0 && spec.range.high_hz > spec.range.low_hz))
          b.fail("band edges must satisfy 0 < low < high");
        c.bands.push_back(spec);
      }
    } else {
      pre.raw("bands");
    }
    pre.done();
  }
  {
    auto feat = root.sub("features");
    auto welch = feat.sub("welch");
    welch.read("segment_len", c.welch.segment_len);
    welch.read("overlap_len", c.welch.overlap_len);
    std::string window(window_name(c.welch.window));
    welch.read("window", window);
    c.welch.window = parse_window(window);
    welch.done();
    auto apen = feat.sub("apen");
    apen.read("m", c.apen_m);
    apen.read("r_factor", c.apen_r_factor);
    apen.done();
    std::string mode(mode_name(c.wavelet_mode));
    feat.read("wavelet_mode", mode);
    if (mode == "symmetric") c.wavelet_mode = BoundaryMode::Symmetric;
    else if (mode == "periodic") c.wavelet_mode = BoundaryMode::Periodic;
    else feat.fail("wavelet_mode must be 'symmetric' or 'periodic'");
    feat.done();
  }
  {
    std::vector<std::string> names;
    for (auto k : c.classifiers) names.emplace_back(model_kind_name(k));
    root.read("classifiers", names);
    c.classifiers.clear();
    for (const auto& n : names) c.classifiers.push_back(parse_model_kind(n));
  }
  {
    auto hp = root.sub("hyperparams");
    auto f = hp.sub("forest");
    f.read("n_estimators", c.params.forest.n_estimators);
    f.read("max_leaf_nodes", c.params.forest.max_leaf_nodes);
    f.read("max_depth", c.params.forest.max_depth);
    f.read("min_samples_split", c.params.forest.min_samples_split);
    f.done();
    auto s = hp.sub("svm");
    std::string kernel = "linear";
    s.read("kernel", kernel);
    if (kernel != "linear") s.fail("only the linear kernel is supported");
    s.read("c", c.params.svm.c);
    s.read("shrinking", c.params.svm.shrinking);
    if (c.params.svm.shrinking) s.fail("shrinking is not supported");
    s.read("standardize", c.params.svm.standardize);
    s.read("tolerance", c.params.svm.tolerance);
    s.read("max_iter", c.params.svm.max_iter);
    s.done();
    auto k = hp.sub("knn");
    k.read("n_neighbors", c.params.knn.n_neighbors);
    k.done();
    hp.done();
  }
  {
    auto cv = root.sub("cv");
    cv.read("k", c.cv.k);
    cv.read("grouped_by_subject", c.cv.grouped_by_subject);
    auto search = cv.sub("search");
    search.read("enabled", c.cv.search.enabled);
    std::string mode = c.cv.search.nested ? "nested" : "flat";
    search.read("mode", mode);
    if (mode != "nested" && mode != "flat") search.fail("mode must be 'nested' or 'flat'");
    c.cv.search.nested = mode == "nested";
    search.read("n_draws", c.cv.search.n_draws);
    search.read("inner_k", c.cv.search.inner_k);
    auto space = search.sub("space");
    space.read("n_estimators", c.cv.search.space.n_estimators);
    space.read("max_leaf_nodes", c.cv.search.space.max_leaf_nodes);
    space.read("max_depth", c.cv.search.space.max_depth);
    space.read("c", c.cv.search.space.c);
    space.read("n_neighbors", c.cv.search.space.n_neighbors);
    space.done();
    search.done();
    cv.done();
  }
  root.read("seed", c.seed);
  {
    auto s = root.sub("synth");
    s.read("n_hc", c.synth.n_hc);
    s.read("n_pd", c.synth.n_pd);
    s.read("contrast", c.synth.contrast);
    s.read("duration_s", c.synth.duration_s);
    s.done();
  }
  root.done();

  positive(c.resample_hz, "resample_hz");
  positive(c.transition_hz, "transition_hz");
  positive(c.epoch_s, "epoch_s");
  positive(c.p2p_limit_uv, "p2p_limit_uv");
  positive(static_cast<double>(c.welch.segment_len), "welch.segment_len");
  positive(c.apen_r_factor, "apen.r_factor");
  positive(c.apen_m, "apen.m");
  positive(c.params.svm.c, "svm.c");
  positive(c.params.forest.n_estimators, "n_estimators");
  positive(c.params.forest.max_depth, "max_depth");
  positive(c.params.knn.n_neighbors, "n_neighbors");
  positive(c.synth.duration_s, "synth.duration_s");
  if (c.overlap_s < 0.0 || c.overlap_s >= c.epoch_s)
    throw Error(Errc::ConfigError, "overlap_s must lie in [0, epoch_s)");
  if (c.welch.overlap_len < 0 || c.welch.overlap_len >= c.welch.segment_len)
    throw Error(Errc::ConfigError, "welch.overlap_len must lie in [0, segment_len)");
  if (c.cv.k < 2) throw Error(Errc::ConfigError, "cv.k must be >= 2");
  if (c.classifiers.empty()) throw Error(Errc::ConfigError, "no classifiers configured");
  c.cv.seed = c.seed;
  return c;
}

json config_to_json(const PipelineConfig& c) {
  json bands = json::array();
  for (const auto& b : c.bands)
    bands.push_back({{"name", b.name}, {"low_hz", b.range.low_hz}, {"high_hz", b.range.high_hz}});
  std::vector<std::string> classifiers;
  for (auto k : c.classifiers) classifiers.emplace_back(model_kind_name(k));
  const auto& sp = c.cv.search.space;
  return {
      {"version", kConfigVersion},
      {"input", {{"dir", c.input_dir.string()}, {"manifest", c.manifest}, {"subjects", c.subjects}}},
      {"output_dir", c.output_dir.string()},
      {"preprocess",
       {{"channels", c.channels},
        {"resample_hz", c.resample_hz},
        {"transition_hz", c.transition_hz},
        {"bands", bands},
        {"epoch_s", c.epoch_s},
        {"overlap_s", c.overlap_s},
        {"p2p_limit_uv", c.p2p_limit_uv}}},
      {"features",
       {{"welch",
         {{"segment_len", c.welch.segment_len},
          {"overlap_len", c.welch.overlap_len},
          {"window", std::string(window_name(c.welch.window))}}},
        {"apen", {{"m", c.apen_m}, {"r_factor", c.apen_r_factor}}},
        {"wavelet_mode", std::string(mode_name(c.wavelet_mode))}}},
      {"classifiers", classifiers},
      {"hyperparams",
       {{"forest",
         {{"n_estimators", c.params.forest.n_estimators},
          {"max_leaf_nodes", c.params.forest.max_leaf_nodes},
          {"max_depth", c.params.forest.max_depth},
          {"min_samples_split", c.params.forest.min_samples_split}}},
        {"svm",
         {{"kernel", "linear"},
          {"c", c.params.svm.c},
          {"shrinking", c.params.svm.shrinking},
          {"standardize", c.params.svm.standardize},
          {"tolerance", c.params.svm.tolerance},
          {"max_iter", c.params.svm.max_iter}}},
        {"knn", {{"n_neighbors", c.params.knn.n_neighbors}}}}},
      {"cv",
       {{"k", c.cv.k},
        {"grouped_by_subject", c.cv.grouped_by_subject},
        {"search",
         {{"enabled", c.cv.search.enabled},
          {"mode", c.cv.search.nested ? "nested" : "flat"},
          {"n_draws", c.cv.search.n_draws},
          {"inner_k", c.cv.search.inner_k},
          {"space",
           {{"n_estimators", sp.n_estimators},
            {"max_leaf_nodes", sp.max_leaf_nodes},
            {"max_depth", sp.max_depth},
            {"c", sp.c},
            {"n_neighbors", sp.n_neighbors}}}}}}},
      {"seed", c.seed},
      {"synth",
       {{"n_hc", c.synth.n_hc},
        {"n_pd", c.synth.n_pd},
        {"contrast", c.synth.contrast},
        {"duration_s", c.synth.duration_s}}}};
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot read config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string config_hash(const PipelineConfig& config) {
  return hex(fnv1a(config_to_json(config).dump()));
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::UnknownChannel:
    case Errc::EmptySelection:
    case Errc::InvalidBand:
    case Errc::UpsampleUnsupported:
    case Errc::KTooLarge:
    case Errc::InvalidSpec:
    case Errc::EmptySpace:
    case Errc::UnsupportedModel:
    case Errc::NyquistViolation:
      return 1;
    case Errc::NoConvergence:
    case Errc::RankDeficient:
    case Errc::ZeroSpectrum:
    case Errc::SingleClass:
    case Errc::DegenerateLabels:
    case Errc::SingleClassTruth:
    case Errc::EmptyConfusion:
      return 3;
    default:
      return 2;
  }
}

// ---------------------------------------------------------------------------
// Artifacts

namespace {

// Every file a command writes goes through one sink, which then merges its
// entries into <dir>/artifacts.json.
class ArtifactSink {
 public:
  explicit ArtifactSink(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir_.string() + ": " + ec.message());
  }

  fs::path write(const std::string& rel, std::string_view content) {
    const fs::path p = dir_ / rel;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::IoError, "cannot write " + p.string());
    entries_[rel] = {{"bytes", content.size()}, {"fnv1a", hex(fnv1a(content))}};
    return p;
  }

  fs::path write_json(const std::string& rel, const json& doc) { return write(rel, doc.dump(2) + "\n"); }

  fs::path write_csv(const std::string& rel, const csv::Table& t) { return write(rel, csv::to_string(t)); }

  void commit() {
    const fs::path p = dir_ / "artifacts.json";
    json manifest = {{"format", "pdeeg-artifacts"}, {"version", 1}, {"files", json::object()}};
    if (fs::exists(p)) {
      try {
        std::ifstream in(p);
        json old;
        in >> old;
        if (old.contains("files")) manifest["files"] = old["files"];
      } catch (const json::exception&) {
      }
    }
    for (const auto& [k, v] : entries_) manifest["files"][k] = v;
    std::ofstream out(p, std::ios::binary);
    out << manifest.dump(2) << "\n";
    if (!out) throw Error(Errc::IoError, "cannot write " + p.string());
  }

 private:
  fs::path dir_;
  std::map<std::string, json> entries_;
};

bool subject_selected(const std::string& filter, const std::string& id) {
  if (filter.empty()) return true;
  std::stringstream ss(filter);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (tok.back() == '*') {
      if (id.rfind(tok.substr(0, tok.size() - 1), 0) == 0) return true;
    } else if (tok == id) {
      return true;
    }
  }
  return false;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// synth / ingest

std::vector<std::string> cmd_synth(const PipelineConfig& config) {
  synth::CohortOptions opts;
  opts.duration_s = config.synth.duration_s;
  const auto cohort =
      synth::cohort(config.synth.n_hc, config.synth.n_pd, config.synth.contrast, config.seed, opts);
  ArtifactSink sink(config.input_dir);
  json manifest = json::object();
  std::vector<std::string> files(cohort.size());
  std::vector<std::vector<std::uint8_t>> bytes(cohort.size());
  parallel_for(cohort.size(), [&](std::size_t i) { bytes[i] = bdf::write_bdf(cohort[i]); });
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto& s = cohort[i].subject;
    files[i] = s.id + ".bdf";
    sink.write(files[i], std::string_view(reinterpret_cast<const char*>(bytes[i].data()),
                                          bytes[i].size()));
    manifest[files[i]] = {{"subject", s.id}, {"group", std::string(group_name(s.group))}};
  }
  const fs::path mp = config.input_dir / config.manifest;
  std::ofstream out(mp, std::ios::binary);
  out << manifest.dump(2) << "\n";
  if (!out) throw Error(Errc::IoError, "cannot write " + mp.string());
  return files;
}

std::string IngestResult::summary() const {
  return std::to_string(n_hc) + " HC / " + std::to_string(n_pd) + " PD";
}

IngestResult cmd_ingest(const PipelineConfig& config, std::ostream& log) {
  const fs::path dir = config.input_dir;
  if (!fs::is_directory(dir))
    throw Error(Errc::ConfigError, "input directory " + dir.string() + " does not exist");
  const fs::path mp = dir / config.manifest;
  if (!fs::exists(mp)) throw Error(Errc::ConfigError, "label manifest " + mp.string() + " is missing");
  json manifest;
  try {
    std::ifstream in(mp);
    in >> manifest;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, mp.string() + ": " + e.what());
  }
  if (!manifest.is_object()) throw Error(Errc::ConfigError, mp.string() + ": expected an object");

  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (e.is_regular_file() && ext == ".bdf") files.push_back(e.path().filename().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(Errc::ConfigError, "no BDF files in " + dir.string());

  IngestResult result;
  std::vector<std::string> unlabelled;
  for (const auto& f : files) {
    if (!manifest.contains(f)) {
      unlabelled.push_back(f);
      continue;
    }
    const auto& lab = manifest[f];
    CohortEntry e;
    e.file = f;
    try {
      e.subject.id = lab.at("subject").get<std::string>();
      e.subject.group = parse_group(lab.at("group").get<std::string>());
    } catch (const json::exception&) {
      throw Error(Errc::ConfigError, "manifest entry for " + f + " needs 'subject' and 'group'");
    }
    e.subject.session = "rest";
    if (subject_selected(config.subjects, e.subject.id)) result.entries.push_back(e);
  }
  if (!unlabelled.empty()) {
    std::string list;
    for (const auto& u : unlabelled) list += (list.empty() ? "" : ", ") + u;
    throw Error(Errc::ConfigError, "no label for " + list);
  }
  if (result.entries.empty()) throw Error(Errc::ConfigError, "subject filter selects no files");

  std::vector<std::string> problems(result.entries.size());
  std::vector<Errc> codes(result.entries.size(), Errc::IoError);
  parallel_for(result.entries.size(), [&](std::size_t i) {
    auto& e = result.entries[i];
    try {
      const auto bytes = bdf::read_file(dir / e.file);
      const auto header = bdf::parse_header(bytes);
      const auto rec = bdf::read_samples(bytes, header);
      e.channels = static_cast<int>(rec.channels.size());
      e.rate_hz = rec.rate_hz;
      e.duration_s = static_cast<double>(rec.length()) / rec.rate_hz;
    } catch (const Error& err) {
      problems[i] = e.file + ": " + err.what();
      codes[i] = err.code();
    }
  });
  std::string failed;
  Errc first = Errc::IoError;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    if (problems[i].empty()) continue;
    if (failed.empty()) first = codes[i];
    failed += "\n  " + problems[i];
  }
  if (!failed.empty()) throw Error(first, "unreadable recordings:" + failed);

  for (const auto& e : result.entries) {
    if (e.subject.group == Group::PD) ++result.n_pd;
    else ++result.n_hc;
    log << e.file << "  " << e.subject.id << "  " << group_name(e.subject.group) << "  "
        << e.channels << " ch  " << fmt("%g", e.rate_hz) << " Hz  " << fmt("%.1f", e.duration_s)
        << " s\n";
  }
  log << result.summary() << "\n";
  return result;
}

// ---------------------------------------------------------------------------
// features

namespace {

struct Prepared {
  SubjectEpochs epochs;
  Eigen::VectorXd signal;  // averaged, resampled
  SubjectLog log;
};

Prepared prepare_subject(const PipelineConfig& config, const CohortEntry& entry,
                         std::span<const BandFilter> bank) {
  Prepared p;
  auto rec = bdf::read_bdf(bdf::read_file(config.input_dir / entry.file));
  rec.subject = entry.subject;
  const auto labels = config.channel_list();
  const auto avg = average_channels(rec, labels);
  p.signal = resample(avg.channels.front().samples, rec.rate_hz, config.resample_hz);
  const auto split = split_bands(p.signal, config.resample_hz, bank);

  std::vector<EpochSet> sets;
  std::vector<bool> keep;
  for (const auto& b : split.bands) {
    auto es = epoch(b.samples, config.resample_hz, config.epoch_s, config.overlap_s);
    es.band = b.band.name;
    es.subject = entry.subject.id;
    const auto k = peak_to_peak_keep(es, config.p2p_limit_uv);
    if (keep.empty()) keep = k;
    else
      for (std::size_t i = 0; i < k.size(); ++i) keep[i] = keep[i] && k[i];
    sets.push_back(std::move(es));
  }
  p.epochs.subject = entry.subject;
  for (auto& es : sets) p.epochs.bands.push_back(keep_epochs(es, keep));
  p.log.subject = entry.subject.id;
  p.log.kept = static_cast<int>(std::count(keep.begin(), keep.end(), true));
  p.log.dropped = static_cast<int>(keep.size()) - p.log.kept;
  return p;
}

}  // namespace

FeaturesResult cmd_features(const PipelineConfig& config, std::ostream& log) {
  const auto ingest = cmd_ingest(config, log);
  const auto bank = design_filter_bank(config.bands, config.resample_hz, config.transition_hz);

  std::vector<Prepared> prepared(ingest.entries.size());
  parallel_for(ingest.entries.size(), [&](std::size_t i) {
    const auto& e = ingest.entries[i];
    try {
      prepared[i] = prepare_subject(config, e, bank);
    } catch (const Error& err) {
      throw Error(err.code(), "subject " + e.subject.id + " (" + e.file + "): " + err.detail());
    }
  });

  std::vector<SubjectEpochs> cohort;
  FeaturesResult result;
  for (auto& p : prepared) {
    result.subjects.push_back(p.log);
    log << p.log.subject << ": kept " << p.log.kept << " epochs, dropped " << p.log.dropped << "\n";
    cohort.push_back(std::move(p.epochs));
  }
  result.matrix = build_feature_matrix(cohort, config.bands, config.feature_config());

  ArtifactSink sink(config.output_dir);
  result.csv_path = sink.write_csv("features.csv", csv::feature_table(result.matrix));

  json subjects = json::array();
  for (std::size_t i = 0; i < result.subjects.size(); ++i)
    subjects.push_back({{"subject", result.subjects[i].subject},
                        {"group", std::string(group_name(ingest.entries[i].subject.group))},
                        {"file", ingest.entries[i].file},
                        {"kept", result.subjects[i].kept},
                        {"dropped", result.subjects[i].dropped}});
  sink.write_json("features.json", {{"format", "pdeeg-features"},
                                    {"version", 1},
                                    {"config_hash", config_hash(config)},
                                    {"rows", result.matrix.rows()},
                                    {"columns", result.matrix.columns},
                                    {"subjects", subjects},
                                    {"cohort", ingest.summary()}});

  // Spectrogram of the first subject's averaged signal, up to 50 Hz.
  const auto& first = prepared.front();
  const auto sg = spectrogram(first.signal, config.resample_hz, config.welch.segment_len,
                              config.welch.overlap_len, config.welch.window);
  csv::Table st;
  st.header = {"subject", "time_s", "freq_hz", "power"};
  for (Eigen::Index t = 0; t < sg.times_s.size(); ++t)
    for (Eigen::Index f = 0; f < sg.freqs_hz.size() && sg.freqs_hz[f] <= 50.0; ++f)
      st.rows.push_back({first.log.subject, csv::format_number(sg.times_s[t]),
                         csv::format_number(sg.freqs_hz[f]), csv::format_number(sg.power(f, t))});
  sink.write_csv("spectrogram.csv", st);
  sink.commit();
  log << "features: " << result.matrix.rows() << " rows x " << result.matrix.cols()
      << " columns -> " << result.csv_path.string() << "\n";
  return result;
}

// ---------------------------------------------------------------------------
// train-eval

std::string summary_table(const std::vector<CvReport>& reports) {
  std::string out = "Classifier  Accuracy (%)  Precision (%)  Recall (%)  F1-score  ROC AUC\n";
  for (const auto& r : reports) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s  %12.3f  %13.3f  %10.3f  %8.3f  %7.3f\n",
                  std::string(model_kind_name(r.kind)).c_str(), 100.0 * r.mean.accuracy,
                  100.0 * r.mean.precision, 100.0 * r.mean.recall, r.mean.f1, r.roc_auc);
    out += line;
  }
  return out;
}

TrainEvalResult cmd_train_eval(const PipelineConfig& config, std::ostream& log) {
  const fs::path features = config.output_dir / "features.csv";
  if (!fs::exists(features))
    throw Error(Errc::MissingArtifact, features.string() + " not found; run 'features' first");
  const auto fm = csv::feature_matrix(csv::read_file(features));
  const std::string hash = config_hash(config);

  TrainEvalResult result;
  const auto n_models = config.classifiers.size();
  std::vector<std::optional<CvReport>> reports(n_models);
  std::vector<std::optional<TrainedModel>> finals(n_models);
  std::vector<std::string> errors(n_models);
  parallel_for(n_models, [&](std::size_t i) {
    const ClassifierSpec spec{config.classifiers[i], config.params};
    try {
      reports[i] = cross_validate(spec, fm, config.cv);
      ClassifierSpec final_spec{spec.kind, reports[i]->params};
      auto model = fit(final_spec, fm.values, fm.labels, config.seed);
      model.feature_names = fm.columns;
      finals[i] = std::move(model);
    } catch (const Error& e) {
      errors[i] = std::string(model_kind_name(spec.kind)) + ": " + e.what();
    }
  });

  ArtifactSink sink(config.output_dir);
  std::string run_log = "config_hash " + hash + "\n" + "config " + config_to_json(config).dump() +
                        "\nrows " + std::to_string(fm.rows()) + " columns " +
                        std::to_string(fm.cols()) + "\n";
  json classifiers = json::object();
  csv::Table roc{{"classifier", "fpr", "tpr", "threshold"}, {}};
  csv::Table pr{{"classifier", "recall", "precision", "threshold"}, {}};
  csv::Table conf{{"classifier", "fold", "tp", "tn", "fp", "fn"}, {}};
  csv::Table imp{{"classifier", "level", "name", "importance"}, {}};
  auto num = csv::format_number;
  for (std::size_t i = 0; i < n_models; ++i) {
    const std::string kind(model_kind_name(config.classifiers[i]));
    if (!reports[i]) {
      result.failures.push_back(errors[i]);
      run_log += "FAILED " + errors[i] + "\n";
      log << "FAILED " << errors[i] << "\n";
      continue;
    }
    const auto& r = *reports[i];
    classifiers[kind] = cv_report_to_json(r);
    for (const auto& p : r.roc.points)
      roc.rows.push_back({kind, num(p.fpr), num(p.tpr), num(p.threshold)});
    for (const auto& p : r.pr)
      pr.rows.push_back({kind, num(p.recall), num(p.precision), num(p.threshold)});
    auto add_conf = [&](const std::string& fold, const ConfusionMatrix& cm) {
      conf.rows.push_back({kind, fold, std::to_string(cm.tp), std::to_string(cm.tn),
                           std::to_string(cm.fp), std::to_string(cm.fn)});
    };
    for (std::size_t f = 0; f < r.folds.size(); ++f) add_conf(std::to_string(f), r.folds[f].confusion);
    add_conf("pooled", r.pooled);
    if (r.importance) {
      const auto& im = *r.importance;
      for (std::size_t c = 0; c < im.columns.size(); ++c)
        imp.rows.push_back({kind, "column", im.columns[c], num(im.per_column[static_cast<Eigen::Index>(c)])});
      for (std::size_t b = 0; b < im.bands.size(); ++b)
        imp.rows.push_back({kind, "band", im.bands[b], num(im.per_band[static_cast<Eigen::Index>(b)])});
      for (std::size_t t = 0; t < im.feature_types.size(); ++t)
        imp.rows.push_back({kind, "feature_type", im.feature_types[t],
                            num(im.per_feature_type[static_cast<Eigen::Index>(t)])});
    }
    for (const auto& w : r.warnings) run_log += kind + " warning " + w + "\n";
    sink.write_json("models/" + kind + ".json", model_to_json(*finals[i]));
    run_log += kind + " accuracy " + num(r.mean.accuracy) + " auc " + num(r.roc_auc) + "\n";
    result.reports.push_back(r);
  }

  const auto corr = correlation_matrix(fm, config.bands);
  csv::Table ct;
  ct.header = {"variable"};
  ct.header.insert(ct.header.end(), corr.names.begin(), corr.names.end());
  ct.header.push_back("zero_variance");
  for (Eigen::Index r = 0; r < corr.values.rows(); ++r) {
    csv::Row row{corr.names[static_cast<std::size_t>(r)]};
    for (Eigen::Index c = 0; c < corr.values.cols(); ++c) row.push_back(num(corr.values(r, c)));
    row.push_back(corr.zero_variance[static_cast<std::size_t>(r)] ? "1" : "0");
    ct.rows.push_back(std::move(row));
  }

  const auto ols = ols_stats(fm.values, fm.labels.cast<double>());
  json p_values = json::object();
  for (std::size_t c = 0; c < fm.columns.size(); ++c)
    p_values[fm.columns[c]] = ols.p_values[static_cast<Eigen::Index>(c)];
  json ols_doc = {{"note", "full-model OLS over the " + std::to_string(fm.cols()) +
                               " feature columns; census counts univariate slope p-values per column"},
                  {"full_model", ols.full_model},
                  {"full_model_note", ols.full_model_note},
                  {"r_squared", ols.r_squared},
                  {"log_likelihood", ols.log_likelihood},
                  {"p_values", p_values},
                  {"census",
                   {{"p<0.001", ols.census.below_0001},
                    {"0.001<=p<0.01", ols.census.below_001},
                    {"0.01<=p<0.05", ols.census.below_005},
                    {"p>=0.05", ols.census.rest}}}};

  result.summary = summary_table(result.reports);
  sink.write_json("cv_report.json", {{"format", "pdeeg-cv-report"},
                                     {"version", 1},
                                     {"config_hash", hash},
                                     {"rows", fm.rows()},
                                     {"columns", fm.cols()},
                                     {"classifiers", classifiers},
                                     {"failures", result.failures}});
  sink.write_csv("roc.csv", roc);
  sink.write_csv("pr.csv", pr);
  sink.write_csv("confusion.csv", conf);
  sink.write_csv("importance.csv", imp);
  sink.write_csv("correlation.csv", ct);
  sink.write_json("ols.json", ols_doc);
  sink.write("summary.txt", result.summary);
  sink.write("run.log", run_log);
  sink.commit();
  log << result.summary;
  return result;
}

// ---------------------------------------------------------------------------
// report

namespace {

csv::Table require_csv(const fs::path& p) {
  if (!fs::exists(p)) throw Error(Errc::MissingArtifact, p.string() + " not found");
  return csv::read_file(p);
}

std::map<std::string, plot::Series> curves(const csv::Table& t, const char* x, const char* y) {
  const auto ck = t.column("classifier"), cx = t.column(x), cy = t.column(y);
  std::map<std::string, plot::Series> out;
  for (const auto& row : t.rows) {
    auto& s = out[row[ck]];
    s.name = row[ck];
    s.x.push_back(csv::parse_number(row[cx]));
    s.y.push_back(csv::parse_number(row[cy]));
  }
  return out;
}

}  // namespace

std::vector<fs::path> cmd_report(const fs::path& dir, std::ostream& log) {
  const auto roc = require_csv(dir / "roc.csv");
  const auto pr = require_csv(dir / "pr.csv");
  const auto conf = require_csv(dir / "confusion.csv");
  const auto imp = require_csv(dir / "importance.csv");
  const auto corr = require_csv(dir / "correlation.csv");
  const auto spec = require_csv(dir / "spectrogram.csv");

  ArtifactSink sink(dir);
  std::vector<fs::path> written;

  plot::LinePlot rp{"ROC curve", "False positive rate", "True positive rate", {}, 0, 1, 0, 1, true};
  for (auto& [k, s] : curves(roc, "fpr", "tpr")) rp.series.push_back(s);
  written.push_back(sink.write("plots/roc.svg", plot::line_svg(rp)));

  plot::LinePlot pp{"Precision-recall curve", "Recall", "Precision", {}, 0, 1, 0, 1.05, false};
  for (auto& [k, s] : curves(pr, "recall", "precision")) pp.series.push_back(s);
  written.push_back(sink.write("plots/pr.svg", plot::line_svg(pp)));

  {
    const auto ck = conf.column("classifier"), cf = conf.column("fold");
    for (const auto& row : conf.rows) {
      if (row[cf] != "pooled") continue;
      Eigen::Matrix2d m;
      m << csv::parse_number(row[conf.column("tn")]), csv::parse_number(row[conf.column("fp")]),
          csv::parse_number(row[conf.column("fn")]), csv::parse_number(row[conf.column("tp")]);
      written.push_back(sink.write(
          "plots/confusion_" + row[ck] + ".svg",
          plot::heatmap_svg(row[ck] + " confusion (pooled)", {"true HC", "true PD"},
                            {"pred HC", "pred PD"}, m, 0.0, m.maxCoeff())));
    }
  }
  {
    const auto ck = imp.column("classifier"), cl = imp.column("level"), cn = imp.column("name"),
               cv = imp.column("importance");
    std::map<std::pair<std::string, std::string>, std::pair<std::vector<std::string>, std::vector<double>>> bars;
    for (const auto& row : imp.rows) {
      auto& b = bars[{row[ck], row[cl]}];
      b.first.push_back(row[cn]);
      b.second.push_back(csv::parse_number(row[cv]));
    }
    for (const auto& [key, b] : bars)
      written.push_back(sink.write("plots/importance_" + key.first + "_" + key.second + ".svg",
                                   plot::bar_svg(key.first + " importance by " + key.second,
                                                 b.first, b.second)));
  }
  {
    std::vector<std::string> names(corr.header.begin() + 1, corr.header.end() - 1);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(corr.rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t r = 0; r < corr.rows.size(); ++r)
      for (std::size_t c = 0; c < names.size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            csv::parse_number(corr.rows[r][c + 1]);
    written.push_back(sink.write("plots/correlation.svg",
                                 plot::heatmap_svg("Band correlation", names, names, m, -1.0, 1.0)));
  }
  {
    std::vector<double> times, freqs;
    const auto ct = spec.column("time_s"), cf = spec.column("freq_hz"), cp = spec.column("power");
    std::map<std::pair<double, double>, double> cells;
    for (const auto& row : spec.rows) {
      const double t = csv::parse_number(row[ct]), f = csv::parse_number(row[cf]);
      if (std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
      if (std::find(freqs.begin(), freqs.end(), f) == freqs.end()) freqs.push_back(f);
      cells[{t, f}] = csv::parse_number(row[cp]);
    }
    // Rows are frequencies, highest first; values in dB.
    Eigen::MatrixXd m(static_cast<Eigen::Index>(freqs.size()), static_cast<Eigen::Index>(times.size()));
    std::vector<std::string> rl, cl;
    for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
      const double f = freqs[freqs.size() - 1 - fi];
      rl.push_back(fmt("%g Hz", f));
      for (std::size_t ti = 0; ti < times.size(); ++ti)
        m(static_cast<Eigen::Index>(fi), static_cast<Eigen::Index>(ti)) =
            10.0 * std::log10(std::max(cells[{times[ti], f}], 1e-12));
    }
    for (double t : times) cl.push_back(fmt("%g s", t));
    const double lo = m.size() ? m.minCoeff() : 0.0, hi = m.size() ? m.maxCoeff() : 1.0;
    plot::HeatmapStyle style{12, 2, false, 25};
    written.push_back(sink.write("plots/spectrogram.svg",
                                 plot::heatmap_svg("Spectrogram (dB)", rl, cl, m, lo, hi, style)));
  }
  sink.commit();
  for (const auto& p : written) log << "wrote " << p.string() << "\n";
  return written;
}

}  // namespace pdeeg
