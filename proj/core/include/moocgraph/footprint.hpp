#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moocgraph/events.hpp"
#include "moocgraph/token.hpp"

namespace moocgraph {

inline constexpr double kSecondsPerWeek = 604800.0;

enum class Setup : std::uint8_t { Curr, TCurr };

std::string_view to_string(Setup setup);
std::optional<Setup> parse_setup(std::string_view s);  // "curr" / "tcurr", case-insensitive

struct WeekContext {
  double course_start = 0.0;
  int courseweek = 1;  // 1-based week since course_start
  int userweek = 1;    // 1-based week since the student's first observed active week

  bool operator==(const WeekContext&) const = default;
};

struct FootprintSequence {
  std::int64_t student_id = 0;
  WeekContext week;
  Setup setup = Setup::Curr;
  std::vector<Token> tokens;

  bool operator==(const FootprintSequence&) const = default;
};

struct SequenceKey {
  std::int64_t student_id = 0;
  int courseweek = 0;

  auto operator<=>(const SequenceKey&) const = default;
};

using SequenceMap = std::map<SequenceKey, FootprintSequence>;

// None is only reachable for an empty sequence; generated instances always
// hold at least one event.
enum class NominalActivityType : std::uint8_t { VideoOnly, ForumOnly, Both, None };

std::string_view to_string(NominalActivityType type);

// floor((timestamp - course_start) / 604800) + 1. Throws std::domain_error if
// the timestamp predates the course.
int assign_week(double timestamp, double course_start);

// Minimum event timestamp; 0.0 for an empty list.
double default_course_start(std::span<const Event> events);

// One Curr sequence per (student, courseweek) with at least one event.
// Events are ordered by timestamp; ties fall back to token enum order (which
// puts video before forum) and then to input order.
SequenceMap build_curr_sequences(std::span<const Event> events, double course_start);

// Cumulative sequences over the same keys: for week w, the concatenation of
// the student's Curr sequences for all weeks <= w.
SequenceMap build_tcurr_sequences(const SequenceMap& curr);

NominalActivityType nominal_activity_type(std::span<const Token> tokens);
NominalActivityType nominal_activity_type(const FootprintSequence& seq);

// {"courseweek":..,"setup":..,"sid":..,"tokens":[..],"userweek":..}
std::string to_json_line(const FootprintSequence& seq);

}  // namespace moocgraph
