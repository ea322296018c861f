#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string_view>
#include <vector>

#include "moocgraph/events.hpp"
#include "moocgraph/footprint.hpp"

namespace moocgraph {

enum class Archetype : std::uint8_t { Lurker, Editor, Creator };

std::string_view to_string(Archetype a);

// Seeded stand-in for real course logs.
//
// Every student is active in each week from a join week until a last week
// drawn with a constant weekly hazard, so with no planted signal the dropout
// label is independent of week counters and sequence content. With
// probability dropout_signal_strength a student "fades": the week before the
// last is shortened and the last week collapses to one or two distinct
// tokens (few nodes, no self-loops).
struct SynthProfile {
  std::size_t n_students = 1000;
  int weeks = 10;
  std::array<double, 3> archetype_mix = {0.90, 0.09, 0.01};  // lurker, editor, creator
  double dropout_signal_strength = 0.8;
  double weekly_hazard = 0.3;
  double course_start = 1'400'000'000.0;
  std::size_t valid_videos = 12;
  std::size_t invalid_videos = 4;  // each seen by fewer than 10 students
};

// Throws std::invalid_argument on an inconsistent profile.
void validate(const SynthProfile& profile);

struct SynthStudent {
  std::int64_t student_id = 0;
  Archetype archetype = Archetype::Lurker;
  int first_week = 1;
  int last_week = 1;
  bool fades = false;
};

struct SyntheticLogs {
  std::vector<RawClickEvent> clickstream;  // time-ordered per student
  std::vector<RawForumEvent> forum;
  std::vector<SynthStudent> students;
  // Token sequence each (student, courseweek) should encode back to, once
  // invalid-video events are filtered out.
  std::map<SequenceKey, std::vector<Token>> planned;
};

SyntheticLogs generate_synthetic(const SynthProfile& profile, std::uint64_t seed);

void write_clickstream_jsonl(const std::vector<RawClickEvent>& events, std::ostream& out);
void write_forum_jsonl(const std::vector<RawForumEvent>& events, std::ostream& out);

}  // namespace moocgraph
