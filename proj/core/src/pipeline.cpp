#include "moocgraph/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "moocgraph/actgraph.hpp"
#include "moocgraph/analysis.hpp"
#include "moocgraph/dataset_io.hpp"
#include "moocgraph/errors.hpp"
#include "moocgraph/events.hpp"
#include "moocgraph/footprint.hpp"
#include "moocgraph/metrics.hpp"

namespace moocgraph {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CommandError(kExitUnreadableInput, "cannot read " + path.string());
  return in;
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<Event> read_events(const fs::path& path) {
  auto in = open_input(path);
  auto parsed = parse_event_log(in);
  if (!parsed.diagnostics.empty()) {
    const auto& d = parsed.diagnostics.front();
    throw CommandError(kExitUnreadableInput,
                       path.string() + ":" + std::to_string(d.line) + ": " + d.reason);
  }
  if (parsed.events.empty()) throw CommandError(kExitEmptyEventStore, "event store is empty: " + path.string());
  return std::move(parsed.events);
}

double resolve_course_start(const PipelineConfig& config, std::span<const Event> events) {
  const double start = config.course_start.value_or(default_course_start(events));
  for (const auto& e : events) {
    if (e.timestamp < start) {
      throw ConfigError("event at " + format_double(e.timestamp) + " precedes course_start " + format_double(start));
    }
  }
  return start;
}

struct Split {
  const char* name;
  const Dataset* data;
};

Dataset load_split(const fs::path& dir, const std::string& name) {
  auto rows = open_input(dir / (name + ".svm"));
  auto index = open_input(dir / "features.idx");
  auto ids = open_input(dir / (name + ".ids"));
  return read_dataset(rows, index, ids);
}

TrainedModel load_model_file(const fs::path& path) {
  auto in = open_input(path);
  return load_model(in);
}

std::vector<int> correctness(std::span<const int> predictions, std::span<const int> labels) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = predictions[i] == labels[i] ? 1 : 0;
  return out;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::function<void(std::ostream&)>& write) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    write(out);
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string cmd_synth(const PipelineConfig& config, const SynthProfile& profile) {
  const auto logs = generate_synthetic(profile, config.seed);
  ensure_out_dir(config.out_dir);
  write_file_atomic(config.out_dir / "clickstream.jsonl",
                    [&](std::ostream& out) { write_clickstream_jsonl(logs.clickstream, out); });
  write_file_atomic(config.out_dir / "forum.jsonl", [&](std::ostream& out) { write_forum_jsonl(logs.forum, out); });
  write_file_atomic(config.out_dir / "synth.conf",
                    [&](std::ostream& out) { out << "course_start = " << format_double(profile.course_start) << '\n'; });

  json j;
  j["students"] = logs.students.size();
  j["clickstream_events"] = logs.clickstream.size();
  j["forum_events"] = logs.forum.size();
  j["student_weeks"] = logs.planned.size();
  j["seed"] = config.seed;
  return j.dump();
}

std::string cmd_ingest(const PipelineConfig& config, const fs::path& clickstream, const fs::path& forum) {
  auto click_in = open_input(clickstream);
  auto forum_in = open_input(forum);
  const auto clicks = parse_clickstream_log(click_in);
  const auto posts = parse_forum_log(forum_in);

  const auto kept = filter_valid_videos(clicks.events, config.min_unique_viewers);
  std::set<std::string> videos;
  for (const auto& e : kept) videos.insert(e.video_id);
  auto encoded = encode_all_clickstreams(kept);
  const auto forum_events = encode_forum(posts.events);

  std::vector<Event> events = std::move(encoded.events);
  events.insert(events.end(), forum_events.begin(), forum_events.end());
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.student_id != b.student_id) return a.student_id < b.student_id;
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return index_of(a.token) < index_of(b.token);
  });

  ensure_out_dir(config.out_dir);
  write_file_atomic(config.out_dir / "events.jsonl", [&](std::ostream& out) {
    for (const auto& e : events) out << to_json_line(e) << '\n';
  });
  write_file_atomic(config.out_dir / "diagnostics.jsonl", [&](std::ostream& out) {
    for (const auto& d : clicks.diagnostics) out << to_json_line(d, "clickstream") << '\n';
    for (const auto& d : posts.diagnostics) out << to_json_line(d, "forum") << '\n';
  });

  json j;
  j["clickstream_events"] = clicks.events.size();
  j["clickstream_kept"] = kept.size();
  j["videos_kept"] = videos.size();
  j["video_events"] = events.size() - forum_events.size();
  j["forum_events"] = forum_events.size();
  j["dropped_ratechanges"] = encoded.dropped_ratechanges;
  j["diagnostics"] = clicks.diagnostics.size() + posts.diagnostics.size();
  return j.dump();
}

std::string cmd_featurize(const PipelineConfig& config, const fs::path& events_path) {
  const auto events = read_events(events_path);
  const double start = resolve_course_start(config, events);
  const auto curr = build_curr_sequences(events, start);
  const auto tcurr = build_tcurr_sequences(curr);
  const auto& selected = config.setup == Setup::Curr ? curr : tcurr;

  auto prepared = prepare_datasets(curr, tcurr, config.setup, config.model_family, config.featurize_options());

  ensure_out_dir(config.out_dir);
  write_file_atomic(config.out_dir / "sequences_curr.jsonl", [&](std::ostream& out) {
    for (const auto& [key, seq] : curr) out << to_json_line(seq) << '\n';
  });
  write_file_atomic(config.out_dir / "sequences_tcurr.jsonl", [&](std::ostream& out) {
    for (const auto& [key, seq] : tcurr) out << to_json_line(seq) << '\n';
  });
  write_file_atomic(config.out_dir / "graph_metrics.csv", [&](std::ostream& out) {
    out << metrics_csv_header() << '\n';
    for (const auto& [key, seq] : selected) {
      out << metrics_csv_row(key, config.setup, compute_metrics(build_graph(seq))) << '\n';
    }
  });
  for (const Split& s : {Split{"train", &prepared.train}, Split{"test", &prepared.test}}) {
    const std::string name = s.name;
    write_file_atomic(config.out_dir / (name + ".svm"), [&](std::ostream& out) { write_sparse(*s.data, out); });
    write_file_atomic(config.out_dir / (name + ".ids"), [&](std::ostream& out) { write_instance_ids(*s.data, out); });
  }
  write_file_atomic(config.out_dir / "features.idx",
                    [&](std::ostream& out) { write_feature_index(prepared.train.feature_index, out); });

  json j;
  j["course_start"] = start;
  j["setup"] = to_string(config.setup);
  j["model"] = to_string(config.model_family);
  j["instances"] = selected.size();
  j["train_instances"] = prepared.train.instances.size();
  j["test_instances"] = prepared.test.instances.size();
  j["features"] = prepared.train.feature_index.size();
  j["warnings"] = prepared.warnings;
  const auto summary = j.dump();
  write_file_atomic(config.out_dir / "featurize.json", [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return summary;
}

std::string cmd_train(const PipelineConfig& config) {
  const auto train = load_split(config.out_dir, "train");
  auto params = config.svm;
  params.seed = config.seed;
  TrainedModel model;
  try {
    model = train_svm(train, params);
  } catch (const TrainingError& e) {
    throw CommandError(kExitSingleClass, e.what());
  }
  write_file_atomic(config.out_dir / "model.txt", [&](std::ostream& out) { save_model(model, out); });

  json j;
  j["instances"] = train.instances.size();
  j["dimension"] = model.dimension;
  j["support_vectors"] = model.support_vectors.size();
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;
  j["gamma"] = model.params.gamma.value_or(0.0);
  j["bias"] = model.bias;
  const auto summary = j.dump();
  write_file_atomic(config.out_dir / "train.json", [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return summary;
}

std::string cmd_eval(const PipelineConfig& config, const std::optional<fs::path>& compare_dir) {
  const auto test = load_split(config.out_dir, "test");
  const auto model = load_model_file(config.out_dir / "model.txt");
  const auto labels = test.labels();
  const auto predictions = predict_all(model, test);
  const auto report = evaluate(predictions, labels);

  json j = json::parse(to_json(report));
  j["instances"] = labels.size();

  if (compare_dir) {
    const auto other_test = load_split(*compare_dir, "test");
    const auto other_model = load_model_file(*compare_dir / "model.txt");
    if (other_test.instances.size() != test.instances.size()) {
      throw ConfigError("compared test splits differ in size");
    }
    for (std::size_t i = 0; i < test.instances.size(); ++i) {
      if (other_test.instances[i].id != test.instances[i].id || other_test.instances[i].label != labels[i]) {
        throw ConfigError("compared test splits list different instances");
      }
    }
    const auto other_predictions = predict_all(other_model, other_test);
    const auto a = correctness(predictions, labels);
    const auto b = correctness(other_predictions, labels);
    const auto t = paired_ttest(a, b);
    const auto other = evaluate(other_predictions, labels);

    json cmp;
    cmp["dir"] = compare_dir->generic_string();
    cmp["accuracy"] = other.accuracy;
    cmp["kappa"] = other.kappa;
    cmp["fnr"] = other.fnr;
    cmp["paired_ttest"] = json::parse(to_json(t));
    j["comparison"] = cmp;
  }

  write_file_atomic(config.out_dir / "predictions.txt", [&](std::ostream& out) {
    for (int p : predictions) out << p << '\n';
  });
  const auto summary = j.dump();
  write_file_atomic(config.out_dir / "report.json", [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return summary;
}

std::string cmd_report(const PipelineConfig& config, const fs::path& events_path, std::optional<std::int64_t> student,
                       std::optional<int> week) {
  if (student.has_value() != week.has_value()) throw ConfigError("student and week must be given together");
  const auto events = read_events(events_path);
  const double start = resolve_course_start(config, events);
  const auto curr = build_curr_sequences(events, start);
  const auto tcurr = build_tcurr_sequences(curr);
  const auto& selected = config.setup == Setup::Curr ? curr : tcurr;

  ensure_out_dir(config.out_dir);
  json j;
  if (student) {
    const auto it = selected.find(SequenceKey{*student, *week});
    if (it == selected.end()) {
      throw CommandError(kExitUnknownInstance,
                         "no sequence for student " + std::to_string(*student) + " in week " + std::to_string(*week));
    }
    const auto& seq = it->second;
    const auto name = std::to_string(*student) + "_w" + std::to_string(*week) + "_" + std::string(to_string(config.setup));
    ensure_out_dir(config.out_dir / "dot");
    const auto dot_path = config.out_dir / "dot" / (name + ".dot");
    const auto graph = build_graph(seq);
    write_file_atomic(dot_path, [&](std::ostream& out) { out << export_dot(graph, seq.tokens, "s" + name); });
    j["dot"] = dot_path.generic_string();
    j["nodes"] = graph.num_nodes();
    j["edges"] = graph.num_edges();
  }

  const auto data = assemble_dataset(curr, tcurr, config.setup, config.model_family);
  const auto ranking = rank_interaction_gains(data);
  write_file_atomic(config.out_dir / "interaction_gain.csv",
                    [&](std::ostream& out) { write_interaction_gain_csv(ranking, out); });

  std::set<std::string> ranked;
  for (const auto& e : ranking) {
    ranked.insert(e.feature_a);
    ranked.insert(e.feature_b);
  }
  if (data.column_of("graph:density")) ranked.insert("graph:density");
  const auto labels = data.labels();
  write_file_atomic(config.out_dir / "contingency.csv", [&](std::ostream& out) {
    bool header = true;
    for (const auto& name : ranked) {
      write_contingency_csv(contingency_table(discretize_column(data, name), labels), name, out, header);
      header = false;
    }
    if (header) out << "feature,category,dropout,non_dropout\n";
  });

  j["instances"] = data.instances.size();
  j["ranked_pairs"] = ranking.size();
  j["contingency_features"] = ranked.size();
  return j.dump();
}

std::string error_json(const std::string& message, int code) {
  json j;
  j["error"] = message;
  j["code"] = code;
  return j.dump();
}

int run_command(const std::function<void()>& command, std::ostream& err) {
  int code = kExitOk;
  std::string message;
  try {
    command();
    return kExitOk;
  } catch (const CommandError& e) {
    code = e.code();
    message = e.what();
  } catch (const IoError& e) {
    code = kExitUnreadableInput;
    message = e.what();
  } catch (const TrainingError& e) {
    code = kExitSingleClass;
    message = e.what();
  } catch (const std::exception& e) {
    code = kExitFailure;
    message = e.what();
  }
  err << error_json(message, code) << '\n';
  return code;
}

}  // namespace moocgraph
