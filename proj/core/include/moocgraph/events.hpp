#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moocgraph/token.hpp"

namespace moocgraph {

enum class ClickKind : std::uint8_t { Play, Pause, Seek, RateChange };
enum class SeekDirection : std::uint8_t { Forward, Backward };
enum class ForumKind : std::uint8_t { Post, Comment, Thread, Upvote, Downvote, ViewForum, ViewThread };

// One raw video-player interaction. seek_direction is set iff kind == Seek,
// playrate iff kind == RateChange.
struct RawClickEvent {
  std::int64_t student_id = 0;
  std::string video_id;
  double timestamp = 0.0;
  ClickKind kind = ClickKind::Play;
  std::optional<SeekDirection> seek_direction;
  std::optional<double> playrate;

  bool operator==(const RawClickEvent&) const = default;
};

struct RawForumEvent {
  std::int64_t student_id = 0;
  double timestamp = 0.0;
  ForumKind kind = ForumKind::ViewForum;

  bool operator==(const RawForumEvent&) const = default;
};

// Canonical encoded event.
struct Event {
  std::int64_t student_id = 0;
  double timestamp = 0.0;
  Token token = Token::PL;

  bool operator==(const Event&) const = default;
};

struct Diagnostic {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

template <class T>
struct ParseResult {
  std::vector<T> events;
  std::vector<Diagnostic> diagnostics;
};

inline constexpr std::size_t kDefaultMinUniqueViewers = 10;

// Maximum gap (exclusive, seconds) between consecutive same-direction seeks
// that still belong to one scroll.
inline constexpr double kScrollGapSeconds = 1.0;

inline constexpr double kInitialPlayrate = 1.0;

std::string_view to_string(ClickKind kind);
std::string_view to_string(SeekDirection dir);
std::string_view to_string(ForumKind kind);
std::optional<ClickKind> parse_click_kind(std::string_view s);
std::optional<ForumKind> parse_forum_kind(std::string_view s);

// JSON-lines readers. Malformed lines become diagnostics; only an unreadable
// stream throws (IoError). Blank lines are skipped silently.
ParseResult<RawClickEvent> parse_clickstream_log(std::istream& in);
ParseResult<RawForumEvent> parse_forum_log(std::istream& in);
ParseResult<Event> parse_event_log(std::istream& in);

// Keeps events of videos watched by at least min_unique_viewers distinct
// students. Throws std::invalid_argument if min_unique_viewers == 0.
std::vector<RawClickEvent> filter_valid_videos(std::span<const RawClickEvent> events,
                                               std::size_t min_unique_viewers = kDefaultMinUniqueViewers);

struct ClickEncoding {
  std::vector<Event> events;
  std::size_t dropped_ratechanges = 0;  // ratechanges equal to the previous rate
};

// Encodes one student's time-sorted clickstream.
//
// play/pause map to PL/PA. A maximal run of >= 2 seeks in one direction on
// the same video, each less than kScrollGapSeconds after the previous one,
// collapses into FS/BS stamped with the run's first timestamp; a lone seek
// becomes FW/BW. A ratechange is RCI/RCD relative to the last known rate of
// the current video session (a new video_id starts a session at 1.0).
//
// Throws std::invalid_argument if events mix students or are unsorted.
ClickEncoding encode_clickstream(std::span<const RawClickEvent> events);

// Groups by student, stably sorts each group by timestamp and encodes it.
// Output is ordered by student id, then encoding order.
ClickEncoding encode_all_clickstreams(std::span<const RawClickEvent> events);

Token token_for(ForumKind kind);
std::vector<Event> encode_forum(std::span<const RawForumEvent> events);

std::string to_json_line(const RawClickEvent& e);
std::string to_json_line(const RawForumEvent& e);
std::string to_json_line(const Event& e);
std::string to_json_line(const Diagnostic& d, std::string_view source);

}  // namespace moocgraph
