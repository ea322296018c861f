#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moocgraph/config.hpp"
#include "moocgraph/errors.hpp"
#include "moocgraph/pipeline.hpp"
#include "moocgraph/synth.hpp"

namespace fs = std::filesystem;
using namespace moocgraph;

namespace {

// Options shared by every subcommand. Flags override the config file.
struct CommonOptions {
  std::string config_path;
  std::string setup;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> settings;  // key=value

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Flat key = value configuration file");
    cmd->add_option("--setup", setup, "Sequence setup")->check(CLI::IsMember({"curr", "tcurr"}, CLI::ignore_case));
    cmd->add_option("--model", model, "Feature family")
        ->check(CLI::IsMember({"baseline", "graph", "combined"}, CLI::ignore_case));
    cmd->add_option("--seed", seed, "Seed for generation and solver tie-breaking");
    cmd->add_option("--out-dir", out_dir, "Output directory");
    cmd->add_option("--set", settings, "Extra key=value setting (repeatable)");
  }

  PipelineConfig resolve() const {
    PipelineConfig config;
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw CommandError(kExitUnreadableInput, "cannot read " + config_path);
      config = load_config_file(config_path);
    }
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + s + "'");
      apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!setup.empty()) apply_setting(config, "setup", setup);
    if (!model.empty()) apply_setting(config, "model", model);
    if (seed) apply_setting(config, "seed", std::to_string(*seed));
    if (!out_dir.empty()) apply_setting(config, "out_dir", out_dir);
    return config;
  }
};

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Activity-graph features and dropout prediction for course interaction logs"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* synth = app.add_subcommand("synth", "Generate seeded synthetic clickstream and forum logs");
  common.attach(synth);
  SynthProfile profile;
  std::vector<double> mix;
  synth->add_option("--students", profile.n_students, "Number of students")->capture_default_str();
  synth->add_option("--weeks", profile.weeks, "Course length in weeks")->capture_default_str();
  synth->add_option("--signal", profile.dropout_signal_strength, "Planted dropout signal in [0, 1]")
      ->capture_default_str();
  synth->add_option("--hazard", profile.weekly_hazard, "Weekly dropout hazard")->capture_default_str();
  synth->add_option("--mix", mix, "Lurker, editor and creator shares")->expected(3)->delimiter(',');

  auto* ingest = app.add_subcommand("ingest", "Parse, filter and encode raw logs into an event store");
  common.attach(ingest);
  std::string clickstream_path;
  std::string forum_path;
  ingest->add_option("--clickstream", clickstream_path, "Clickstream JSON-lines (default: <out-dir>/clickstream.jsonl)");
  ingest->add_option("--forum", forum_path, "Forum JSON-lines (default: <out-dir>/forum.jsonl)");

  auto* featurize = app.add_subcommand("featurize", "Build sequences, graphs and train/test feature files");
  common.attach(featurize);
  std::string events_path;
  featurize->add_option("--events", events_path, "Event store (default: <out-dir>/events.jsonl)");

  auto* train = app.add_subcommand("train", "Train the cost-sensitive SVM on the train split");
  common.attach(train);

  auto* eval = app.add_subcommand("eval", "Evaluate the trained model on the test split");
  common.attach(eval);
  std::string compare_dir;
  eval->add_option("--compare", compare_dir, "Another run directory; adds a paired t-test");

  auto* report = app.add_subcommand("report", "DOT graph, interaction gains and contingency tables");
  common.attach(report);
  std::optional<std::int64_t> student;
  std::optional<int> week;
  report->add_option("--events", events_path, "Event store (default: <out-dir>/events.jsonl)");
  report->add_option("--student", student, "Student id for the DOT export");
  report->add_option("--week", week, "Course week for the DOT export");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  std::string summary;
  const int code = run_command(
      [&] {
        const auto config = common.resolve();
        if (synth->parsed()) {
          if (!mix.empty()) profile.archetype_mix = {mix[0], mix[1], mix[2]};
          summary = cmd_synth(config, profile);
        } else if (ingest->parsed()) {
          summary = cmd_ingest(config, or_default(clickstream_path, config.out_dir / "clickstream.jsonl"),
                               or_default(forum_path, config.out_dir / "forum.jsonl"));
        } else if (featurize->parsed()) {
          summary = cmd_featurize(config, or_default(events_path, config.out_dir / "events.jsonl"));
        } else if (train->parsed()) {
          summary = cmd_train(config);
        } else if (eval->parsed()) {
          summary = cmd_eval(config, compare_dir.empty() ? std::nullopt : std::optional<fs::path>(compare_dir));
        } else if (report->parsed()) {
          summary = cmd_report(config, or_default(events_path, config.out_dir / "events.jsonl"), student, week);
        }
      },
      std::cerr);
  if (code == kExitOk) std::cout << summary << '\n';
  return code;
}
