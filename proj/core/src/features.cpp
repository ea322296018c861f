#include "moocgraph/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "moocgraph/errors.hpp"

namespace moocgraph {

namespace {

const char* const kPropNames[4] = {"prop:video_active", "prop:video_passive", "prop:forum_active",
                                   "prop:forum_passive"};
const char* const kGraphBinned[4] = {"graph:nodes", "graph:edges", "graph:self_loops", "graph:density"};

std::array<double, 4> proportion_values(const ActivePassive& p) {
  return {p.video_active, p.video_passive, p.forum_active, p.forum_passive};
}

std::array<double, 4> graph_binned_values(const GraphMetrics& g) {
  return {static_cast<double>(g.num_nodes), static_cast<double>(g.num_edges),
          static_cast<double>(g.num_self_loops), g.density};
}

std::string transition_name(const Edge& e) {
  return std::string(to_string(e.from)) + ">" + std::string(to_string(e.to));
}

// One-hot names an instance would switch on, before vocabulary filtering.
std::vector<std::string> categorical_names(const RawInstance& r, ModelFamily family) {
  std::vector<std::string> names;
  names.push_back("ctl:nominal=" + std::string(to_string(r.nominal)));
  if (includes_graph(family)) {
    for (std::size_t i = 0; i < r.graph.top_indegree.size(); ++i) {
      names.push_back("graph:central" + std::to_string(i + 1) + "=" +
                      std::string(to_string(r.graph.top_indegree[i].token)));
    }
    if (r.graph.central_transition) {
      names.push_back("graph:transition=" + transition_name(r.graph.central_transition->edge));
    }
  }
  return names;
}

void set_nonzero(FeatureMap& f, const std::string& name, double value) {
  if (value != 0.0) f[name] = value;
}

template <class T>
std::vector<T> collect_column(std::span<const RawInstance> rows, T (*get)(const RawInstance&, std::size_t),
                              std::size_t which) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(get(r, which));
  return out;
}

double prop_at(const RawInstance& r, std::size_t i) { return proportion_values(r.proportions)[i]; }
double graph_at(const RawInstance& r, std::size_t i) { return graph_binned_values(r.graph)[i]; }

}  // namespace

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::Baseline: return "baseline";
    case ModelFamily::Graph: return "graph";
    case ModelFamily::Combined: return "combined";
  }
  return "graph";
}

std::optional<ModelFamily> parse_model_family(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "baseline") return ModelFamily::Baseline;
  if (lower == "graph") return ModelFamily::Graph;
  if (lower == "combined") return ModelFamily::Combined;
  return std::nullopt;
}

void Dataset::rebuild_index() {
  std::set<std::string> names;
  for (const auto& inst : instances) {
    for (const auto& [name, value] : inst.features) names.insert(name);
  }
  feature_index.assign(names.begin(), names.end());
}

std::optional<std::size_t> Dataset::column_of(std::string_view name) const {
  auto it = std::lower_bound(feature_index.begin(), feature_index.end(), name,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == feature_index.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - feature_index.begin());
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.push_back(inst.label);
  return out;
}

FeatureMap ngram_features(std::span<const Token> tokens, int n_min, int n_max) {
  if (n_min < 2 || n_min > n_max) throw std::invalid_argument("ngram_features: need 2 <= n_min <= n_max");
  FeatureMap out;
  for (int n = n_min; n <= n_max; ++n) {
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t start = 0; start + width <= tokens.size(); ++start) {
      std::string name = "ng:" + join_tokens(tokens.subspan(start, width), "_");
      out[name] += 1.0;
    }
  }
  return out;
}

std::size_t sequence_length(std::span<const Token> tokens) { return tokens.size(); }

ActivePassive active_passive_proportions(std::span<const Token> tokens) {
  std::size_t video_active = 0;
  std::size_t video_total = 0;
  std::size_t forum_active = 0;
  std::size_t forum_total = 0;
  for (Token t : tokens) {
    if (is_video(t)) {
      ++video_total;
      if (is_active(t)) ++video_active;
    } else {
      ++forum_total;
      if (is_active(t)) ++forum_active;
    }
  }
  ActivePassive out;
  if (video_total > 0) {
    out.video_active = static_cast<double>(video_active) / static_cast<double>(video_total);
    out.video_passive = static_cast<double>(video_total - video_active) / static_cast<double>(video_total);
  }
  if (forum_total > 0) {
    out.forum_active = static_cast<double>(forum_active) / static_cast<double>(forum_total);
    out.forum_passive = static_cast<double>(forum_total - forum_active) / static_cast<double>(forum_total);
  }
  return out;
}

Dichotomizer Dichotomizer::fit(std::span<const double> values, BinningStrategy strategy) {
  if (values.empty()) throw std::invalid_argument("dichotomize: empty sample");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("dichotomize: non-finite value");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  Dichotomizer d;
  d.strategy_ = strategy;
  d.degenerate_ = *lo == *hi;
  if (strategy == BinningStrategy::EqualWidth) {
    d.threshold_ = (*lo + *hi) / 2.0;
  } else {
    std::vector<double> sorted(values.begin(), values.end());
    const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>((sorted.size() - 1) / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    d.threshold_ = *mid;
  }
  return d;
}

int Dichotomizer::apply(double value) const {
  if (degenerate_) return 0;
  if (strategy_ == BinningStrategy::EqualWidth) return value >= threshold_ ? 1 : 0;
  return value > threshold_ ? 1 : 0;
}

Dichotomized dichotomize(std::span<const double> values, BinningStrategy strategy) {
  const auto d = Dichotomizer::fit(values, strategy);
  Dichotomized out;
  out.threshold = d.threshold();
  out.bins.reserve(values.size());
  for (double v : values) out.bins.push_back(d.apply(v));
  return out;
}

std::map<SequenceKey, int> dropout_labels(const SequenceMap& curr) {
  std::map<std::int64_t, int> last_week;
  for (const auto& [key, seq] : curr) {
    auto [it, fresh] = last_week.try_emplace(key.student_id, key.courseweek);
    if (!fresh) it->second = std::max(it->second, key.courseweek);
  }
  std::map<SequenceKey, int> labels;
  for (const auto& [key, seq] : curr) {
    labels[key] = key.courseweek == last_week.at(key.student_id) ? 1 : 0;
  }
  return labels;
}

std::vector<RawInstance> extract_instances(const SequenceMap& curr, const SequenceMap& tcurr, Setup setup,
                                           ModelFamily family) {
  for (const auto& [key, seq] : curr) {
    if (seq.setup != Setup::Curr) throw ConfigError("curr map holds a non-Curr sequence");
  }
  if (setup == Setup::TCurr) {
    if (tcurr.size() != curr.size() ||
        !std::equal(curr.begin(), curr.end(), tcurr.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw ConfigError("TCurr setup requires cumulative sequences with the same keys as Curr");
    }
    for (const auto& [key, seq] : tcurr) {
      if (seq.setup != Setup::TCurr) throw ConfigError("tcurr map holds a non-TCurr sequence");
    }
  }

  const auto labels = dropout_labels(curr);
  std::vector<RawInstance> out;
  out.reserve(curr.size());
  for (const auto& [key, curr_seq] : curr) {
    const FootprintSequence& seq = setup == Setup::Curr ? curr_seq : tcurr.at(key);
    RawInstance r;
    r.id = {key.student_id, key.courseweek, setup};
    r.userweek = seq.week.userweek;
    r.label = labels.at(key);
    r.seq_length = sequence_length(seq.tokens);
    r.nominal = nominal_activity_type(seq.tokens);
    if (includes_baseline(family)) {
      r.ngrams = ngram_features(seq.tokens);
      r.proportions = active_passive_proportions(seq.tokens);
    }
    if (includes_graph(family)) r.graph = compute_metrics(build_graph(seq.tokens));
    out.push_back(std::move(r));
  }
  return out;
}

FeatureEncoder FeatureEncoder::fit(std::span<const RawInstance> train, ModelFamily family) {
  FeatureEncoder enc;
  enc.family_ = family;
  if (!train.empty()) {
    if (includes_baseline(family)) {
      for (std::size_t i = 0; i < 4; ++i) {
        const auto column = collect_column<double>(train, prop_at, i);
        enc.dichotomizers_.emplace(kPropNames[i], Dichotomizer::fit(column, BinningStrategy::EqualWidth));
      }
    }
    if (includes_graph(family)) {
      for (std::size_t i = 0; i < 4; ++i) {
        const auto column = collect_column<double>(train, graph_at, i);
        enc.dichotomizers_.emplace(kGraphBinned[i], Dichotomizer::fit(column, BinningStrategy::EqualFrequency));
      }
    }
  }
  for (const auto& r : train) {
    for (auto& name : categorical_names(r, family)) enc.vocabulary_.insert(std::move(name));
  }
  return enc;
}

FeatureVector FeatureEncoder::encode(const RawInstance& r) const {
  FeatureVector fv;
  fv.id = r.id;
  fv.label = r.label;
  auto& f = fv.features;

  set_nonzero(f, "ctl:courseweek", r.id.courseweek);
  set_nonzero(f, "ctl:userweek", r.userweek);
  set_nonzero(f, "ctl:seq_length", static_cast<double>(r.seq_length));
  for (const auto& name : categorical_names(r, family_)) {
    if (vocabulary_.contains(name)) f[name] = 1.0;
  }

  auto binned = [&](const char* name, double value) {
    auto it = dichotomizers_.find(name);
    if (it != dichotomizers_.end()) set_nonzero(f, name, it->second.apply(value));
  };
  if (includes_baseline(family_)) {
    for (const auto& [name, count] : r.ngrams) set_nonzero(f, name, count);
    const auto props = proportion_values(r.proportions);
    for (std::size_t i = 0; i < 4; ++i) binned(kPropNames[i], props[i]);
  }
  if (includes_graph(family_)) {
    const auto values = graph_binned_values(r.graph);
    for (std::size_t i = 0; i < 4; ++i) binned(kGraphBinned[i], values[i]);
    set_nonzero(f, "graph:scc", static_cast<double>(r.graph.num_scc));
  }
  return fv;
}

Dataset FeatureEncoder::encode_all(std::span<const RawInstance> instances, Setup setup) const {
  Dataset ds;
  ds.setup = setup;
  ds.family = family_;
  ds.instances.reserve(instances.size());
  for (const auto& r : instances) ds.instances.push_back(encode(r));
  ds.rebuild_index();
  return ds;
}

Dataset assemble_dataset(const SequenceMap& curr, const SequenceMap& tcurr, Setup setup, ModelFamily family) {
  const auto raw = extract_instances(curr, tcurr, setup, family);
  return FeatureEncoder::fit(raw, family).encode_all(raw, setup);
}

RareFilterResult apply_rare_threshold(const Dataset& train, std::size_t threshold) {
  std::map<std::string, std::size_t> support;
  for (const auto& inst : train.instances) {
    for (const auto& [name, value] : inst.features) {
      if (value != 0.0) ++support[name];
    }
  }
  RareFilterResult out;
  for (const auto& name : train.feature_index) {
    const auto it = support.find(name);
    const std::size_t s = it == support.end() ? 0 : it->second;
    if (is_control_feature(name) || s >= threshold) out.retained.insert(name);
  }
  out.dataset = restrict_features(train, std::vector<std::string>(out.retained.begin(), out.retained.end()));
  return out;
}

Dataset restrict_features(const Dataset& data, const std::vector<std::string>& columns) {
  const std::set<std::string> keep(columns.begin(), columns.end());
  Dataset out;
  out.setup = data.setup;
  out.family = data.family;
  out.feature_index.assign(keep.begin(), keep.end());
  out.instances.reserve(data.instances.size());
  for (const auto& inst : data.instances) {
    FeatureVector fv{inst.id, {}, inst.label};
    for (const auto& [name, value] : inst.features) {
      if (keep.contains(name)) fv.features.emplace(name, value);
    }
    out.instances.push_back(std::move(fv));
  }
  return out;
}

DatasetSplit split_by_student(const Dataset& data, std::int64_t test_id_min, std::int64_t test_id_max) {
  if (test_id_min > test_id_max) throw std::invalid_argument("split_by_student: test_id_min > test_id_max");
  DatasetSplit out;
  out.train.setup = out.test.setup = data.setup;
  out.train.family = out.test.family = data.family;
  out.train.feature_index = out.test.feature_index = data.feature_index;
  for (const auto& inst : data.instances) {
    const bool held_out = inst.id.student_id >= test_id_min && inst.id.student_id <= test_id_max;
    (held_out ? out.test : out.train).instances.push_back(inst);
  }
  if (out.train.instances.empty()) out.warnings.emplace_back("training split is empty");
  if (out.test.instances.empty()) out.warnings.emplace_back("test split is empty");
  return out;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& train, const std::vector<std::string>& names) {
  MinMaxScaler s;
  for (const auto& name : names) {
    if (!train.column_of(name) || train.instances.empty()) continue;
    Range r{0.0, 0.0};
    bool first = true;
    for (const auto& inst : train.instances) {
      const auto it = inst.features.find(name);
      const double v = it == inst.features.end() ? 0.0 : it->second;
      if (first) {
        r = {v, v};
        first = false;
      } else {
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
      }
    }
    s.ranges_.emplace(name, r);
  }
  return s;
}

void MinMaxScaler::apply(Dataset& data) const {
  for (auto& inst : data.instances) {
    for (const auto& [name, range] : ranges_) {
      const auto it = inst.features.find(name);
      const double v = it == inst.features.end() ? 0.0 : it->second;
      const double scaled = range.hi > range.lo ? (v - range.lo) / (range.hi - range.lo) : 0.0;
      if (scaled != 0.0) {
        inst.features[name] = scaled;
      } else if (it != inst.features.end()) {
        inst.features.erase(it);
      }
    }
  }
}

const std::vector<std::string>& scaled_feature_names() {
  static const std::vector<std::string> names = {"ctl:courseweek", "ctl:seq_length", "ctl:userweek", "graph:scc"};
  return names;
}

namespace {

std::pair<std::vector<RawInstance>, std::vector<RawInstance>> split_raw(const std::vector<RawInstance>& raw,
                                                                         std::int64_t lo, std::int64_t hi) {
  std::pair<std::vector<RawInstance>, std::vector<RawInstance>> out;
  for (const auto& r : raw) {
    const bool held_out = r.id.student_id >= lo && r.id.student_id <= hi;
    (held_out ? out.second : out.first).push_back(r);
  }
  return out;
}

}  // namespace

PreparedDatasets prepare_datasets(const SequenceMap& curr, const SequenceMap& tcurr, Setup setup,
                                  ModelFamily family, const FeaturizeOptions& options) {
  if (options.test_id_min > options.test_id_max) {
    throw std::invalid_argument("prepare_datasets: test_id_min > test_id_max");
  }
  const auto raw = extract_instances(curr, tcurr, setup, family);
  auto [train_raw, test_raw] = split_raw(raw, options.test_id_min, options.test_id_max);

  PreparedDatasets out;
  if (train_raw.empty()) out.warnings.emplace_back("training split is empty");
  if (test_raw.empty()) out.warnings.emplace_back("test split is empty");

  const auto encoder = FeatureEncoder::fit(train_raw, family);
  auto rare = apply_rare_threshold(encoder.encode_all(train_raw, setup), options.rare_threshold);
  out.train = std::move(rare.dataset);
  out.test = restrict_features(encoder.encode_all(test_raw, setup), out.train.feature_index);

  const auto scaler = MinMaxScaler::fit(out.train, scaled_feature_names());
  scaler.apply(out.train);
  scaler.apply(out.test);
  return out;
}

}  // namespace moocgraph
