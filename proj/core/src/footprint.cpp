#include "moocgraph/footprint.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace moocgraph {

std::string_view to_string(Setup setup) { return setup == Setup::Curr ? "curr" : "tcurr"; }

std::optional<Setup> parse_setup(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "curr") return Setup::Curr;
  if (lower == "tcurr") return Setup::TCurr;
  return std::nullopt;
}

std::string_view to_string(NominalActivityType type) {
  switch (type) {
    case NominalActivityType::VideoOnly: return "VideoOnly";
    case NominalActivityType::ForumOnly: return "ForumOnly";
    case NominalActivityType::Both: return "Both";
    case NominalActivityType::None: return "None";
  }
  return "None";
}

int assign_week(double timestamp, double course_start) {
  if (!(timestamp >= course_start)) {
    throw std::domain_error("event at " + std::to_string(timestamp) + " predates course start " +
                            std::to_string(course_start));
  }
  return static_cast<int>(std::floor((timestamp - course_start) / kSecondsPerWeek)) + 1;
}

double default_course_start(std::span<const Event> events) {
  if (events.empty()) return 0.0;
  double lo = events.front().timestamp;
  for (const auto& e : events) lo = std::min(lo, e.timestamp);
  return lo;
}

SequenceMap build_curr_sequences(std::span<const Event> events, double course_start) {
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = events[a];
    const auto& eb = events[b];
    if (ea.timestamp != eb.timestamp) return ea.timestamp < eb.timestamp;
    return index_of(ea.token) < index_of(eb.token);
  });

  SequenceMap out;
  std::map<std::int64_t, int> first_week;
  for (std::size_t idx : order) {
    const auto& e = events[idx];
    const int week = assign_week(e.timestamp, course_start);
    auto [it, inserted] = out.try_emplace(SequenceKey{e.student_id, week});
    if (inserted) {
      it->second.student_id = e.student_id;
      it->second.setup = Setup::Curr;
      it->second.week.course_start = course_start;
      it->second.week.courseweek = week;
    }
    it->second.tokens.push_back(e.token);
    auto [fw, fresh] = first_week.try_emplace(e.student_id, week);
    if (!fresh) fw->second = std::min(fw->second, week);
  }
  for (auto& [key, seq] : out) {
    seq.week.userweek = key.courseweek - first_week.at(key.student_id) + 1;
  }
  return out;
}

SequenceMap build_tcurr_sequences(const SequenceMap& curr) {
  SequenceMap out;
  std::vector<Token> running;
  std::int64_t current_student = 0;
  bool first = true;
  // SequenceMap iterates week-ascending within each student.
  for (const auto& [key, seq] : curr) {
    if (first || key.student_id != current_student) {
      running.clear();
      current_student = key.student_id;
      first = false;
    }
    running.insert(running.end(), seq.tokens.begin(), seq.tokens.end());
    FootprintSequence cumulative = seq;
    cumulative.setup = Setup::TCurr;
    cumulative.tokens = running;
    out.emplace(key, std::move(cumulative));
  }
  return out;
}

NominalActivityType nominal_activity_type(std::span<const Token> tokens) {
  const bool video = std::any_of(tokens.begin(), tokens.end(), is_video);
  const bool forum = std::any_of(tokens.begin(), tokens.end(), is_forum);
  if (video && forum) return NominalActivityType::Both;
  if (video) return NominalActivityType::VideoOnly;
  if (forum) return NominalActivityType::ForumOnly;
  return NominalActivityType::None;
}

NominalActivityType nominal_activity_type(const FootprintSequence& seq) {
  return nominal_activity_type(seq.tokens);
}

std::string to_json_line(const FootprintSequence& seq) {
  nlohmann::json tokens = nlohmann::json::array();
  for (Token t : seq.tokens) tokens.push_back(to_string(t));
  nlohmann::json doc = {{"sid", seq.student_id},
                        {"courseweek", seq.week.courseweek},
                        {"userweek", seq.week.userweek},
                        {"setup", to_string(seq.setup)},
                        {"tokens", std::move(tokens)}};
  return doc.dump();
}

}  // namespace moocgraph
