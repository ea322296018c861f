#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "moocgraph/features.hpp"

namespace moocgraph {

// Category code of a discrete (already binned) feature column.
using Category = std::int64_t;

// Shannon entropy of the label distribution, in bits.
double class_entropy(std::span<const int> labels);

// H(class) - H(class | feature), in bits.
double information_gain(std::span<const Category> feature, std::span<const int> labels);

// [Gain(A x B) - Gain(A) - Gain(B)] / H(class): the share of class entropy
// removed only by the two features jointly. Negative values mean redundancy.
// Returns 0 when H(class) == 0. Throws std::invalid_argument on misaligned or
// empty columns.
double interaction_gain(std::span<const Category> a, std::span<const Category> b, std::span<const int> labels);

struct ContingencyRow {
  Category category = 0;
  std::size_t dropout = 0;
  std::size_t non_dropout = 0;
};

// Category x {dropout, non-dropout} counts, rows in category order.
std::vector<ContingencyRow> contingency_table(std::span<const Category> feature, std::span<const int> labels);

void write_contingency_csv(const std::vector<ContingencyRow>& table, std::string_view feature_name,
                           std::ostream& out, bool header = true);

struct InteractionGainEntry {
  std::string feature_a;
  std::string feature_b;
  double gain = 0.0;
};

// Binary column for every feature of the dataset: scaled numeric features
// are split at their lower median, all others by presence (value != 0).
std::vector<Category> discretize_column(const Dataset& data, const std::string& feature);

// Ranks all pairs among the `max_features` columns with the highest
// individual information gain. Sorted by gain descending, then by names.
std::vector<InteractionGainEntry> rank_interaction_gains(const Dataset& data, std::size_t max_features = 30);

void write_interaction_gain_csv(const std::vector<InteractionGainEntry>& ranking, std::ostream& out);

}  // namespace moocgraph
