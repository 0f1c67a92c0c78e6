#include <doctest.h>

#include "pdeeg/csv.hpp"
#include "pdeeg/error.hpp"
#include "pdeeg/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace pdeeg;
namespace fs = std::filesystem;

namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::IoError;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pdeeg_test_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig small_config(const fs::path& root) {
  PipelineConfig c;
  c.input_dir = root / "data";
  c.output_dir = root / "out";
  c.synth = {3, 3, 2.0, 20.0};
  c.params.forest.n_estimators = 20;
  c.cv.k = 3;
  return c;
}

}  // namespace

TEST_CASE("default configuration") {
  const PipelineConfig c;
  const auto j = config_to_json(c);
  CHECK(j["version"] == 1);
  CHECK(j["preprocess"]["resample_hz"] == 250.0);
  CHECK(j["preprocess"]["transition_hz"] == 0.5);
  CHECK(j["preprocess"]["epoch_s"] == 5.0);
  CHECK(j["preprocess"]["overlap_s"] == 1.0);
  CHECK(j["preprocess"]["p2p_limit_uv"] == 150.0);
  CHECK(j["preprocess"]["bands"].size() == 5);
  CHECK(j["features"]["welch"]["segment_len"] == 1250);
  CHECK(j["features"]["welch"]["overlap_len"] == 250);
  CHECK(j["features"]["welch"]["window"] == "hamming");
  CHECK(j["hyperparams"]["forest"]["n_estimators"] == 1000);
  CHECK(j["hyperparams"]["forest"]["max_leaf_nodes"] == 100);
  CHECK(j["hyperparams"]["forest"]["max_depth"] == 10);
  CHECK(j["hyperparams"]["svm"]["kernel"] == "linear");
  CHECK(j["hyperparams"]["svm"]["shrinking"] == false);
  CHECK(j["hyperparams"]["knn"]["n_neighbors"] == 1000);
  CHECK(j["cv"]["k"] == 10);
  CHECK(j["classifiers"] == nlohmann::json({"RF", "ET", "SVM", "KNN"}));
  CHECK(c.channel_list().size() == 32);
  CHECK(config_to_json(config_from_json(nlohmann::json::object())) == j);
}

TEST_CASE("configuration round trip and hashing") {
  PipelineConfig c;
  c.seed = 7;
  c.channels = {"Fz", "Cz"};
  c.cv.grouped_by_subject = true;
  c.cv.search.enabled = true;
  c.cv.search.space.n_estimators = {10, 20};
  c.wavelet_mode = BoundaryMode::Periodic;
  const auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.cv.seed == 7);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  CHECK(config_hash(c).find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(config_hash(c) != config_hash(PipelineConfig{}));
  CHECK(config_hash(PipelineConfig{}) == config_hash(PipelineConfig{}));
}

TEST_CASE("configuration errors are fatal") {
  CHECK(error_of([] { config_from_json({{"sed", 4}}); }) == Errc::ConfigError);
  CHECK(error_of([] { config_from_json({{"preprocess", {{"epochs", 5}}}}); }) == Errc::ConfigError);
  CHECK(error_of([] { config_from_json({{"version", 2}}); }) == Errc::ConfigError);
  CHECK(error_of([] { config_from_json({{"seed", "x"}}); }) == Errc::ConfigError);
  CHECK(error_of([] { config_from_json({{"preprocess", {{"epoch_s", -1.0}}}}); }) == Errc::ConfigError);
  CHECK(error_of([] { config_from_json({{"classifiers", {"GBM"}}}); }) == Errc::ConfigError);
  CHECK(error_of([] { load_config("/nonexistent/config.json"); }) == Errc::ConfigError);
}

TEST_CASE("exit codes by error class") {
  CHECK(exit_code(Errc::ConfigError) == 1);
  CHECK(exit_code(Errc::UnknownChannel) == 1);
  CHECK(exit_code(Errc::KTooLarge) == 1);
  CHECK(exit_code(Errc::BadMagic) == 2);
  CHECK(exit_code(Errc::TruncatedBody) == 2);
  CHECK(exit_code(Errc::MissingArtifact) == 2);
  CHECK(exit_code(Errc::NoConvergence) == 3);
  CHECK(exit_code(Errc::RankDeficient) == 3);
}

TEST_CASE("CSV quoting round trip") {
  csv::Table t{{"name", "value"}, {{"plain", "1"}, {"with,comma", "2"}, {"quote \"x\"", "3"}, {"multi\nline", ""}}};
  const auto text = csv::to_string(t);
  CHECK(text.find("\r\n") != std::string::npos);
  CHECK(csv::escape("a\"b") == "\"a\"\"b\"");
  const auto back = csv::parse(text);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(csv::parse("a,b\n1,2\n").rows.size() == 1);
  CHECK(error_of([] { csv::parse("a,b\n1\n"); }) == Errc::InvalidSpec);
  CHECK(error_of([] { csv::parse("a\n\"open\n"); }) == Errc::InvalidSpec);
  CHECK(back.column("value") == 1);
  CHECK(error_of([&] { back.column("missing"); }) == Errc::InvalidSpec);
}

TEST_CASE("numbers survive text") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(csv::parse_number(csv::format_number(v)) == v);
  }
  CHECK(csv::format_number(0.1) == "0.1");
  CHECK(csv::format_number(INFINITY) == "inf");
  CHECK(std::isnan(csv::parse_number("nan")));
  CHECK(error_of([] { csv::parse_number("1.5x"); }) == Errc::InvalidSpec);
}

TEST_CASE("feature tables round trip") {
  FeatureMatrix fm;
  fm.columns = {"alpha_mean", "alpha_std"};
  fm.values.resize(2, 2);
  fm.values << 0.1, 1e-300, -3.5, 1.0 / 3.0;
  fm.labels.resize(2);
  fm.labels << 0, 1;
  fm.subjects = {"hc01", "pd,01"};
  fm.epochs = {0, 7};
  const auto t = csv::feature_table(fm);
  CHECK(t.header == csv::Row{"subject", "epoch", "label", "alpha_mean", "alpha_std"});
  const auto back = csv::feature_matrix(csv::parse(csv::to_string(t)));
  CHECK(back.columns == fm.columns);
  CHECK(back.values == fm.values);
  CHECK(back.labels == fm.labels);
  CHECK(back.subjects == fm.subjects);
  CHECK(back.epochs == fm.epochs);
}

TEST_CASE("pipeline commands on a small cohort") {
  const auto root = fresh_dir("small");
  const auto c = small_config(root);
  std::ostringstream log;

  const auto files = cmd_synth(c);
  CHECK(files.size() == 6);
  CHECK(fs::exists(c.input_dir / "manifest.json"));

  const auto ingest = cmd_ingest(c, log);
  CHECK(ingest.summary() == "3 HC / 3 PD");
  CHECK(ingest.entries[0].channels == 40);
  CHECK(ingest.entries[0].rate_hz == 512.0);

  auto filtered = c;
  filtered.subjects = "pd*,hc02";
  CHECK(cmd_ingest(filtered, log).summary() == "1 HC / 3 PD");
  filtered.subjects = "zz*";
  CHECK(error_of([&] { cmd_ingest(filtered, log); }) == Errc::ConfigError);

  const auto features = cmd_features(c, log);
  CHECK(features.matrix.rows() == 6 * 4);
  CHECK(features.matrix.cols() == 40);
  const auto csv_text = slurp(c.output_dir / "features.csv");
  CHECK(fs::exists(c.output_dir / "spectrogram.csv"));

  const auto r = cmd_train_eval(c, log);
  CHECK(r.failures.empty());
  CHECK(r.reports.size() == 4);
  CHECK(r.summary.find("Classifier") == 0);
  for (const char* f : {"cv_report.json", "roc.csv", "pr.csv", "confusion.csv", "importance.csv",
                        "correlation.csv", "ols.json", "summary.txt", "artifacts.json", "models/RF.json"})
    CHECK_MESSAGE(fs::exists(c.output_dir / f), f);
  const auto report = slurp(c.output_dir / "cv_report.json");
  const auto doc = nlohmann::json::parse(report);
  CHECK(doc["format"] == "pdeeg-cv-report");
  CHECK(doc["config_hash"] == config_hash(c));

  const auto plots = cmd_report(c.output_dir, log);
  CHECK(!plots.empty());
  for (const auto& p : plots) CHECK(slurp(p).rfind("<svg", 0) == 0);

  // A second run reproduces the artifacts byte for byte.
  fs::remove_all(c.output_dir);
  cmd_features(c, log);
  cmd_train_eval(c, log);
  CHECK(slurp(c.output_dir / "features.csv") == csv_text);
  CHECK(slurp(c.output_dir / "cv_report.json") == report);
}

TEST_CASE("pipeline command failures") {
  const auto root = fresh_dir("fail");
  auto c = small_config(root);
  std::ostringstream log;
  CHECK(error_of([&] { cmd_ingest(c, log); }) == Errc::ConfigError);
  CHECK(error_of([&] { cmd_train_eval(c, log); }) == Errc::MissingArtifact);
  CHECK(error_of([&] { cmd_report(c.output_dir, log); }) == Errc::MissingArtifact);

  cmd_synth(c);
  {
    std::ofstream bad(c.input_dir / "hc01.bdf", std::ios::binary | std::ios::trunc);
    bad << "not a bdf file at all";
  }
  CHECK(error_of([&] { cmd_ingest(c, log); }) == Errc::TruncatedHeader);

  c.channels = {"Fp1", "Nope"};
  c.subjects = "pd01";
  CHECK(error_of([&] { cmd_features(c, log); }) == Errc::UnknownChannel);
}

TEST_CASE("summary table layout") {
  CvReport r;
  r.kind = ModelKind::RandomForest;
  r.mean = {0.975, 1.0, 0.95, 0.9744};
  r.roc_auc = 0.975;
  const auto s = summary_table({r});
  CHECK(s.find("Classifier  Accuracy (%)  Precision (%)  Recall (%)  F1-score  ROC AUC") == 0);
  CHECK(s.find("97.5") != std::string::npos);
  CHECK(s.find("RF") != std::string::npos);
}
