#include "moocgraph/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "moocgraph/dataset_io.hpp"

namespace moocgraph {

namespace {

double entropy_of(const std::map<int, std::size_t>& counts, std::size_t total) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

template <class Key>
double conditional_entropy(std::span<const Key> feature, std::span<const int> labels) {
  std::map<Key, std::map<int, std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) ++groups[feature[i]][labels[i]];
  double h = 0.0;
  const double total = static_cast<double>(labels.size());
  for (const auto& [key, counts] : groups) {
    std::size_t n = 0;
    for (const auto& [label, c] : counts) n += c;
    h += static_cast<double>(n) / total * entropy_of(counts, n);
  }
  return h;
}

void check_aligned(std::size_t a, std::size_t labels) {
  if (labels == 0) throw std::invalid_argument("empty label column");
  if (a != labels) throw std::invalid_argument("feature and label columns are misaligned");
}

}  // namespace

double class_entropy(std::span<const int> labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  return labels.empty() ? 0.0 : entropy_of(counts, labels.size());
}

double information_gain(std::span<const Category> feature, std::span<const int> labels) {
  check_aligned(feature.size(), labels.size());
  return class_entropy(labels) - conditional_entropy(feature, labels);
}

double interaction_gain(std::span<const Category> a, std::span<const Category> b, std::span<const int> labels) {
  check_aligned(a.size(), labels.size());
  check_aligned(b.size(), labels.size());
  const double h = class_entropy(labels);
  if (h == 0.0) return 0.0;
  std::vector<std::pair<Category, Category>> joint(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) joint[i] = {a[i], b[i]};
  const double gain_joint = h - conditional_entropy<std::pair<Category, Category>>(joint, labels);
  return (gain_joint - information_gain(a, labels) - information_gain(b, labels)) / h;
}

std::vector<ContingencyRow> contingency_table(std::span<const Category> feature, std::span<const int> labels) {
  if (feature.size() != labels.size()) throw std::invalid_argument("feature and label columns are misaligned");
  std::map<Category, ContingencyRow> rows;
  for (std::size_t i = 0; i < feature.size(); ++i) {
    auto& row = rows[feature[i]];
    row.category = feature[i];
    (labels[i] == 1 ? row.dropout : row.non_dropout) += 1;
  }
  std::vector<ContingencyRow> out;
  out.reserve(rows.size());
  for (const auto& [category, row] : rows) out.push_back(row);
  return out;
}

void write_contingency_csv(const std::vector<ContingencyRow>& table, std::string_view feature_name,
                           std::ostream& out, bool header) {
  if (header) out << "feature,category,dropout,non_dropout\n";
  for (const auto& row : table) {
    out << feature_name << ',' << row.category << ',' << row.dropout << ',' << row.non_dropout << '\n';
  }
}

std::vector<Category> discretize_column(const Dataset& data, const std::string& feature) {
  std::vector<double> values;
  values.reserve(data.instances.size());
  for (const auto& inst : data.instances) {
    const auto it = inst.features.find(feature);
    values.push_back(it == inst.features.end() ? 0.0 : it->second);
  }
  const auto& scaled = scaled_feature_names();
  std::vector<Category> out(values.size(), 0);
  if (std::find(scaled.begin(), scaled.end(), feature) != scaled.end() && !values.empty()) {
    const auto bins = dichotomize(values, BinningStrategy::EqualFrequency).bins;
    std::copy(bins.begin(), bins.end(), out.begin());
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] != 0.0 ? 1 : 0;
  }
  return out;
}

std::vector<InteractionGainEntry> rank_interaction_gains(const Dataset& data, std::size_t max_features) {
  const auto labels = data.labels();
  if (labels.empty()) return {};

  struct Column {
    std::string name;
    std::vector<Category> values;
    double gain;
  };
  std::vector<Column> columns;
  for (const auto& name : data.feature_index) {
    auto values = discretize_column(data, name);
    const double gain = information_gain(values, labels);
    columns.push_back({name, std::move(values), gain});
  }
  std::stable_sort(columns.begin(), columns.end(), [](const Column& a, const Column& b) { return a.gain > b.gain; });
  if (columns.size() > max_features) columns.resize(max_features);
  std::sort(columns.begin(), columns.end(), [](const Column& a, const Column& b) { return a.name < b.name; });

  std::vector<InteractionGainEntry> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      out.push_back({columns[i].name, columns[j].name, interaction_gain(columns[i].values, columns[j].values, labels)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const InteractionGainEntry& a, const InteractionGainEntry& b) {
    return a.gain > b.gain;
  });
  return out;
}

void write_interaction_gain_csv(const std::vector<InteractionGainEntry>& ranking, std::ostream& out) {
  out << "feature_a,feature_b,interaction_gain,percent_class_entropy\n";
  for (const auto& e : ranking) {
    out << e.feature_a << ',' << e.feature_b << ',' << format_double(e.gain) << ','
        << format_double(100.0 * e.gain) << '\n';
  }
}

}  // namespace moocgraph
