// pdeeg: resting-state EEG classification pipeline.
//
//   pdeeg synth      --out DIR [--seed N] [--contrast X] [--duration S]
//   pdeeg ingest     --config FILE [--subjects LIST]
//   pdeeg features   --config FILE [--out DIR] [--subjects LIST]
//   pdeeg train-eval --config FILE [--out DIR] [--seed N]
//   pdeeg report     --out DIR
//
// PDEEG_LOG_LEVEL=quiet silences progress output.

#include "pdeeg/error.hpp"
#include "pdeeg/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <streambuf>
#include <string>

namespace {

class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

std::ostream& progress_stream() {
  static NullBuffer null_buffer;
  static std::ostream null_stream(&null_buffer);
  const char* level = std::getenv("PDEEG_LOG_LEVEL");
  if (level && std::string(level) == "quiet") return null_stream;
  return std::cout;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parkinson's disease vs healthy control resting EEG pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string subjects;
  std::optional<double> contrast;
  std::optional<double> duration;

  auto add_common = [&](CLI::App* sub, bool config) {
    if (config) sub->add_option("--config", config_path, "pipeline config (JSON)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--subjects", subjects, "comma-separated subject ids, 'x*' for a prefix");
  };
  auto* synth = app.add_subcommand("synth", "write a synthetic BDF cohort and label manifest");
  add_common(synth, true);
  synth->add_option("--contrast", contrast, "extra PD alpha variance (0 = identical groups)");
  synth->add_option("--duration", duration, "seconds per recording");
  auto* ingest = app.add_subcommand("ingest", "validate recordings and summarize the cohort");
  add_common(ingest, true);
  auto* features = app.add_subcommand("features", "extract the feature matrix");
  add_common(features, true);
  auto* train = app.add_subcommand("train-eval", "cross-validate the classifiers");
  add_common(train, true);
  auto* report = app.add_subcommand("report", "render plots from stored artifacts");
  add_common(report, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::ostream& log = progress_stream();
  try {
    pdeeg::PipelineConfig config;
    if (!config_path.empty()) config = pdeeg::load_config(config_path);
    if (seed) {
      config.seed = *seed;
      config.cv.seed = *seed;
    }
    if (!subjects.empty()) config.subjects = subjects;
    if (contrast) config.synth.contrast = *contrast;
    if (duration) config.synth.duration_s = *duration;

    if (synth->parsed()) {
      if (!out_dir.empty()) config.input_dir = out_dir;
      const auto files = pdeeg::cmd_synth(config);
      log << "wrote " << files.size() << " recordings to " << config.input_dir.string() << "\n";
    } else if (ingest->parsed()) {
      const auto r = pdeeg::cmd_ingest(config, log);
      if (&log != &std::cout) std::cout << r.summary() << "\n";
    } else if (features->parsed()) {
      if (!out_dir.empty()) config.output_dir = out_dir;
      pdeeg::cmd_features(config, log);
    } else if (train->parsed()) {
      if (!out_dir.empty()) config.output_dir = out_dir;
      const auto r = pdeeg::cmd_train_eval(config, log);
      if (&log != &std::cout) std::cout << r.summary;
      if (!r.failures.empty()) {
        for (const auto& f : r.failures) std::cerr << "error: " << f << "\n";
        return 3;
      }
    } else if (report->parsed()) {
      pdeeg::cmd_report(out_dir.empty() ? config.output_dir : std::filesystem::path(out_dir), log);
    }
  } catch (const pdeeg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pdeeg::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
