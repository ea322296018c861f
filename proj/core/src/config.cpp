#include "moocgraph/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "moocgraph/dataset_io.hpp"
#include "moocgraph/errors.hpp"

namespace moocgraph {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T v{};
  auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return v;
}

double positive(std::string_view key, double v) {
  if (!(v > 0.0)) throw ConfigError(std::string(key) + " must be positive");
  return v;
}

std::map<int, double> parse_costs(std::string_view value) {
  std::map<int, double> costs;
  if (value == "auto") return costs;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const auto comma = value.find(',', pos);
    const auto item = trim(value.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ConfigError("class_cost entries look like label:cost");
    const int label = parse_number<int>("class_cost", trim(item.substr(0, colon)));
    costs[label] = positive("class_cost", parse_number<double>("class_cost", trim(item.substr(colon + 1))));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return costs;
}

}  // namespace

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "course_start") {
    config.course_start = parse_number<double>(key, value);
  } else if (key == "min_unique_viewers") {
    config.min_unique_viewers = parse_number<std::size_t>(key, value);
    if (config.min_unique_viewers == 0) throw ConfigError("min_unique_viewers must be >= 1");
  } else if (key == "setup") {
    auto s = parse_setup(value);
    if (!s) throw ConfigError("setup must be curr or tcurr");
    config.setup = *s;
  } else if (key == "model") {
    auto f = parse_model_family(value);
    if (!f) throw ConfigError("model must be baseline, graph or combined");
    config.model_family = *f;
  } else if (key == "C") {
    config.svm.C = positive(key, parse_number<double>(key, value));
  } else if (key == "gamma") {
    if (value == "auto") {
      config.svm.gamma.reset();
    } else {
      config.svm.gamma = positive(key, parse_number<double>(key, value));
    }
  } else if (key == "class_cost") {
    config.svm.class_cost = parse_costs(value);
  } else if (key == "tolerance") {
    config.svm.tolerance = positive(key, parse_number<double>(key, value));
  } else if (key == "max_passes") {
    config.svm.max_passes = parse_number<std::size_t>(key, value);
    if (config.svm.max_passes == 0) throw ConfigError("max_passes must be >= 1");
  } else if (key == "rare_threshold") {
    config.rare_threshold = parse_number<std::size_t>(key, value);
  } else if (key == "test_id_min") {
    config.test_id_min = parse_number<std::int64_t>(key, value);
  } else if (key == "test_id_max") {
    config.test_id_max = parse_number<std::int64_t>(key, value);
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
    config.svm.seed = config.seed;
  } else if (key == "out_dir") {
    config.out_dir = std::string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

PipelineConfig parse_config(std::istream& in, PipelineConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + " is not key=value");
    }
    apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
  }
  if (base.test_id_min > base.test_id_max) throw ConfigError("test_id_min exceeds test_id_max");
  return base;
}

PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  return parse_config(in, std::move(base));
}

std::string to_config_text(const PipelineConfig& c) {
  std::ostringstream out;
  if (c.course_start) out << "course_start = " << format_double(*c.course_start) << '\n';
  out << "min_unique_viewers = " << c.min_unique_viewers << '\n';
  out << "setup = " << to_string(c.setup) << '\n';
  out << "model = " << to_string(c.model_family) << '\n';
  out << "C = " << format_double(c.svm.C) << '\n';
  out << "gamma = " << (c.svm.gamma ? format_double(*c.svm.gamma) : std::string("auto")) << '\n';
  out << "class_cost = ";
  if (c.svm.class_cost.empty()) {
    out << "auto";
  } else {
    bool first = true;
    for (const auto& [label, cost] : c.svm.class_cost) {
      out << (first ? "" : ",") << label << ':' << format_double(cost);
      first = false;
    }
  }
  out << '\n';
  out << "tolerance = " << format_double(c.svm.tolerance) << '\n';
  out << "max_passes = " << c.svm.max_passes << '\n';
  out << "rare_threshold = " << c.rare_threshold << '\n';
  out << "test_id_min = " << c.test_id_min << '\n';
  out << "test_id_max = " << c.test_id_max << '\n';
  out << "seed = " << c.seed << '\n';
  out << "out_dir = " << c.out_dir.string() << '\n';
  return out.str();
}

}  // namespace moocgraph
