#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moocgraph/actgraph.hpp"
#include "moocgraph/footprint.hpp"
#include "moocgraph/token.hpp"

namespace moocgraph {

// Sparse feature values keyed by namespaced name: "ng:", "prop:", "graph:",
// "ctl:". Zero values are not stored.
using FeatureMap = std::map<std::string, double>;

enum class ModelFamily : std::uint8_t { Baseline, Graph, Combined };

std::string_view to_string(ModelFamily family);
std::optional<ModelFamily> parse_model_family(std::string_view s);

inline bool includes_baseline(ModelFamily f) { return f != ModelFamily::Graph; }
inline bool includes_graph(ModelFamily f) { return f != ModelFamily::Baseline; }

inline constexpr std::string_view kControlPrefix = "ctl:";

inline bool is_control_feature(std::string_view name) { return name.starts_with(kControlPrefix); }

struct InstanceId {
  std::int64_t student_id = 0;
  int courseweek = 0;
  Setup setup = Setup::Curr;

  auto operator<=>(const InstanceId&) const = default;
};

struct FeatureVector {
  InstanceId id;
  FeatureMap features;
  int label = 0;  // 1 = dropout (student's last participation week)

  bool operator==(const FeatureVector&) const = default;
};

struct Dataset {
  std::vector<FeatureVector> instances;
  std::vector<std::string> feature_index;  // column order, sorted by name
  Setup setup = Setup::Curr;
  ModelFamily family = ModelFamily::Graph;

  // Rebuilds feature_index as the sorted union of stored feature names.
  void rebuild_index();
  std::optional<std::size_t> column_of(std::string_view name) const;
  std::vector<int> labels() const;

  bool operator==(const Dataset&) const = default;
};

// ---------------------------------------------------------------------------
// Per-sequence extractors

// Counts of each contiguous n-token window for n in [n_min, n_max], named
// "ng:PL_PA". Throws std::invalid_argument unless 2 <= n_min <= n_max.
FeatureMap ngram_features(std::span<const Token> tokens, int n_min = 2, int n_max = 5);

std::size_t sequence_length(std::span<const Token> tokens);

struct ActivePassive {
  double video_active = 0.0;
  double video_passive = 0.0;
  double forum_active = 0.0;
  double forum_passive = 0.0;

  bool operator==(const ActivePassive&) const = default;
};

// Video shares are over video tokens only, forum shares over forum tokens
// only; a source with no tokens gets 0 for both of its members.
ActivePassive active_passive_proportions(std::span<const Token> tokens);

// ---------------------------------------------------------------------------
// Dichotomization

enum class BinningStrategy : std::uint8_t { EqualWidth, EqualFrequency };

// EqualWidth: threshold = (min + max) / 2, bin = value >= threshold.
// EqualFrequency: threshold = lower median, bin = value > threshold.
// A constant fitting sample bins everything to 0 under either strategy.
class Dichotomizer {
 public:
  // Throws std::invalid_argument on an empty or non-finite sample.
  static Dichotomizer fit(std::span<const double> values, BinningStrategy strategy);

  int apply(double value) const;
  double threshold() const { return threshold_; }
  BinningStrategy strategy() const { return strategy_; }
  bool degenerate() const { return degenerate_; }

 private:
  BinningStrategy strategy_ = BinningStrategy::EqualWidth;
  double threshold_ = 0.0;
  bool degenerate_ = true;
};

struct Dichotomized {
  std::vector<int> bins;
  double threshold = 0.0;
};

Dichotomized dichotomize(std::span<const double> values, BinningStrategy strategy);

// ---------------------------------------------------------------------------
// Instances before train-fitted transforms

struct RawInstance {
  InstanceId id;
  int userweek = 1;
  int label = 0;
  std::size_t seq_length = 0;
  NominalActivityType nominal = NominalActivityType::None;
  FeatureMap ngrams;
  ActivePassive proportions;
  GraphMetrics graph;
};

// 1 for each student's max-courseweek key, 0 elsewhere.
std::map<SequenceKey, int> dropout_labels(const SequenceMap& curr);

// Extracts per-instance features from the sequences of the chosen setup.
// Labels always come from the Curr keys. Throws ConfigError when the setup
// needs TCurr sequences whose keys do not match curr, or when a map carries
// sequences of the wrong setup.
std::vector<RawInstance> extract_instances(const SequenceMap& curr, const SequenceMap& tcurr, Setup setup,
                                           ModelFamily family);

// Train-fitted encoding: proportion dichotomizers (equal width), graph-count
// dichotomizers (equal frequency) and one-hot vocabularies.
class FeatureEncoder {
 public:
  static FeatureEncoder fit(std::span<const RawInstance> train, ModelFamily family);

  FeatureVector encode(const RawInstance& instance) const;
  Dataset encode_all(std::span<const RawInstance> instances, Setup setup) const;

  ModelFamily family() const { return family_; }
  const std::map<std::string, Dichotomizer>& dichotomizers() const { return dichotomizers_; }
  const std::set<std::string>& vocabulary() const { return vocabulary_; }

 private:
  ModelFamily family_ = ModelFamily::Graph;
  std::map<std::string, Dichotomizer> dichotomizers_;
  std::set<std::string> vocabulary_;
};

// Extracts and encodes every instance, fitting thresholds on all of them.
Dataset assemble_dataset(const SequenceMap& curr, const SequenceMap& tcurr, Setup setup, ModelFamily family);

// ---------------------------------------------------------------------------
// Rare threshold, splitting, scaling

inline constexpr std::size_t kDefaultRareThreshold = 4;

struct RareFilterResult {
  Dataset dataset;
  std::set<std::string> retained;
};

// Drops features that are nonzero in fewer than `threshold` instances.
// Control features are always retained.
RareFilterResult apply_rare_threshold(const Dataset& train, std::size_t threshold = kDefaultRareThreshold);

// Keeps only features in `columns` and sets feature_index to it.
Dataset restrict_features(const Dataset& data, const std::vector<std::string>& columns);

struct DatasetSplit {
  Dataset train;
  Dataset test;
  std::vector<std::string> warnings;
};

// Students with id in [test_id_min, test_id_max] go to test. Throws
// std::invalid_argument if min > max; an empty side yields a warning.
DatasetSplit split_by_student(const Dataset& data, std::int64_t test_id_min, std::int64_t test_id_max);

// Min-max scaling to [0, 1] fitted on train; test values may fall outside.
class MinMaxScaler {
 public:
  static MinMaxScaler fit(const Dataset& train, const std::vector<std::string>& names);
  void apply(Dataset& data) const;

 private:
  struct Range {
    double lo = 0.0;
    double hi = 0.0;
  };
  std::map<std::string, Range> ranges_;
};

// Numeric features that are scaled rather than dichotomized.
const std::vector<std::string>& scaled_feature_names();

struct FeaturizeOptions {
  std::size_t rare_threshold = kDefaultRareThreshold;
  std::int64_t test_id_min = 798619;
  std::int64_t test_id_max = 1882807;
};

struct PreparedDatasets {
  Dataset train;
  Dataset test;  // shares train.feature_index
  std::vector<std::string> warnings;
};

// Full chain with every fitted quantity learned on train only:
// extract -> split -> encode -> rare threshold -> scale.
PreparedDatasets prepare_datasets(const SequenceMap& curr, const SequenceMap& tcurr, Setup setup,
                                  ModelFamily family, const FeaturizeOptions& options);

}  // namespace moocgraph
