#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "moocgraph/config.hpp"
#include "moocgraph/synth.hpp"

namespace moocgraph {

// Process exit codes of the pipeline commands.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUnreadableInput = 2,
  kExitEmptyEventStore = 3,
  kExitSingleClass = 4,
  kExitUnknownInstance = 5,
};

class CommandError : public std::runtime_error {
 public:
  CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

// Replaces `path` with what `write` produced, via a temporary sibling file
// and a rename. Throws IoError if the file cannot be written.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& write);

// Each command writes into config.out_dir and returns a one-line JSON
// summary of what it did.

// clickstream.jsonl, forum.jsonl and synth.conf (the course start, so later
// stages assign the same weeks the generator planned).
std::string cmd_synth(const PipelineConfig& config, const SynthProfile& profile);

// events.jsonl and diagnostics.jsonl.
std::string cmd_ingest(const PipelineConfig& config, const std::filesystem::path& clickstream,
                       const std::filesystem::path& forum);

// sequences_curr.jsonl, sequences_tcurr.jsonl, graph_metrics.csv,
// train.svm/test.svm, train.ids/test.ids, features.idx and featurize.json.
std::string cmd_featurize(const PipelineConfig& config, const std::filesystem::path& events);

// Trains on the train split in out_dir; writes model.txt and train.json.
std::string cmd_train(const PipelineConfig& config);

// Evaluates out_dir/model.txt on the test split; writes predictions.txt and
// report.json. With compare_dir, the other run's model is evaluated on its
// own test split (same instances required) and a paired t-test on
// per-instance correctness is added.
std::string cmd_eval(const PipelineConfig& config, const std::optional<std::filesystem::path>& compare_dir = {});

// interaction_gain.csv and contingency.csv from all instances; with a
// student and week also dot/<student>_w<week>_<setup>.dot.
std::string cmd_report(const PipelineConfig& config, const std::filesystem::path& events,
                       std::optional<std::int64_t> student = {}, std::optional<int> week = {});

// Runs `command`, mapping failures to an exit code and a JSON error line on
// `err`: {"error": message, "code": n}.
int run_command(const std::function<void()>& command, std::ostream& err);

std::string error_json(const std::string& message, int code);

}  // namespace moocgraph
