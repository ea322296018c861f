#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "moocgraph/features.hpp"
#include "moocgraph/footprint.hpp"
#include "moocgraph/svm.hpp"

namespace moocgraph {

struct PipelineConfig {
  std::optional<double> course_start;  // unset: earliest event timestamp
  std::size_t min_unique_viewers = kDefaultMinUniqueViewers;
  Setup setup = Setup::Curr;
  ModelFamily model_family = ModelFamily::Graph;
  SvmParams svm;
  std::size_t rare_threshold = kDefaultRareThreshold;
  std::int64_t test_id_min = 798619;
  std::int64_t test_id_max = 1882807;
  std::uint64_t seed = 42;
  std::filesystem::path out_dir = "out";

  FeaturizeOptions featurize_options() const { return {rare_threshold, test_id_min, test_id_max}; }
};

// Applies one key=value setting. Keys: course_start, min_unique_viewers,
// setup, model, C, gamma, class_cost ("auto" or "0:1,1:19"), tolerance,
// max_passes, rare_threshold, test_id_min, test_id_max, seed, out_dir.
// Throws ConfigError on an unknown key or malformed value.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

// Flat "key = value" text; '#' starts a comment.
PipelineConfig parse_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base = {});

std::string to_config_text(const PipelineConfig& config);

}  // namespace moocgraph
