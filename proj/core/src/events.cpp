#include "moocgraph/events.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <variant>

#include <nlohmann/json.hpp>

#include "moocgraph/errors.hpp"

namespace moocgraph {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kClickKinds = {"play", "pause", "seek", "ratechange"};
constexpr std::array<std::string_view, 7> kForumKinds = {
    "post", "comment", "thread", "upvote", "downvote", "viewforum", "viewthread"};

template <class T>
using LineResult = std::variant<T, std::string>;

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

template <class T, class Convert>
ParseResult<T> parse_lines(std::istream& in, Convert convert) {
  if (!in.good()) throw IoError("input stream is not readable");
  ParseResult<T> result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
      result.diagnostics.push_back({line_no, "invalid json"});
      continue;
    }
    if (!doc.is_object()) {
      result.diagnostics.push_back({line_no, "not a json object"});
      continue;
    }
    LineResult<T> parsed = convert(doc);
    if (auto* value = std::get_if<T>(&parsed)) {
      result.events.push_back(std::move(*value));
    } else {
      result.diagnostics.push_back({line_no, std::get<std::string>(std::move(parsed))});
    }
  }
  if (in.bad()) throw IoError("read error on input stream");
  return result;
}

// Shared sid/t validation. Returns an error reason or empty string.
std::string read_common(const json& doc, std::int64_t& sid, double& t) {
  auto sid_it = doc.find("sid");
  if (sid_it == doc.end()) return "missing sid";
  if (!sid_it->is_number_integer()) return "sid is not an integer";
  sid = sid_it->get<std::int64_t>();
  auto t_it = doc.find("t");
  if (t_it == doc.end()) return "missing timestamp";
  if (!t_it->is_number()) return "timestamp is not a number";
  t = t_it->get<double>();
  if (!std::isfinite(t) || t < 0.0) return "invalid timestamp";
  return {};
}

std::optional<std::string> read_kind(const json& doc, std::string& kind) {
  auto it = doc.find("kind");
  if (it == doc.end()) return "missing kind";
  if (!it->is_string()) return "kind is not a string";
  kind = it->get<std::string>();
  return std::nullopt;
}

LineResult<RawClickEvent> convert_click(const json& doc) {
  RawClickEvent e;
  if (auto err = read_common(doc, e.student_id, e.timestamp); !err.empty()) return err;
  std::string kind_name;
  if (auto err = read_kind(doc, kind_name)) return *err;
  auto kind = parse_click_kind(kind_name);
  if (!kind) return std::string("unknown kind");
  e.kind = *kind;

  auto vid = doc.find("vid");
  if (vid == doc.end()) return std::string("missing video id");
  if (!vid->is_string()) return std::string("video id is not a string");
  e.video_id = vid->get<std::string>();

  if (e.kind == ClickKind::Seek) {
    auto dir = doc.find("dir");
    if (dir == doc.end()) return std::string("seek missing direction");
    if (!dir->is_string()) return std::string("invalid seek direction");
    const auto d = dir->get<std::string>();
    if (d == "forward") {
      e.seek_direction = SeekDirection::Forward;
    } else if (d == "backward") {
      e.seek_direction = SeekDirection::Backward;
    } else {
      return std::string("invalid seek direction");
    }
  } else if (doc.contains("dir")) {
    return std::string("direction on non-seek event");
  }

  if (e.kind == ClickKind::RateChange) {
    auto rate = doc.find("rate");
    if (rate == doc.end()) return std::string("ratechange missing rate");
    if (!rate->is_number()) return std::string("invalid playrate");
    const double r = rate->get<double>();
    if (!std::isfinite(r) || r <= 0.0) return std::string("invalid playrate");
    e.playrate = r;
  } else if (doc.contains("rate")) {
    return std::string("rate on non-ratechange event");
  }
  return e;
}

LineResult<RawForumEvent> convert_forum(const json& doc) {
  RawForumEvent e;
  if (auto err = read_common(doc, e.student_id, e.timestamp); !err.empty()) return err;
  std::string kind_name;
  if (auto err = read_kind(doc, kind_name)) return *err;
  auto kind = parse_forum_kind(kind_name);
  if (!kind) return std::string("unknown kind");
  e.kind = *kind;
  return e;
}

LineResult<Event> convert_event(const json& doc) {
  Event e;
  if (auto err = read_common(doc, e.student_id, e.timestamp); !err.empty()) return err;
  auto tok = doc.find("tok");
  if (tok == doc.end() || !tok->is_string()) return std::string("missing token");
  auto token = parse_token(tok->get<std::string>());
  if (!token) return std::string("unknown token");
  e.token = *token;
  return e;
}

}  // namespace

std::string_view to_string(ClickKind kind) { return kClickKinds[static_cast<std::size_t>(kind)]; }

std::string_view to_string(SeekDirection dir) {
  return dir == SeekDirection::Forward ? "forward" : "backward";
}

std::string_view to_string(ForumKind kind) { return kForumKinds[static_cast<std::size_t>(kind)]; }

std::optional<ClickKind> parse_click_kind(std::string_view s) {
  for (std::size_t i = 0; i < kClickKinds.size(); ++i) {
    if (kClickKinds[i] == s) return static_cast<ClickKind>(i);
  }
  return std::nullopt;
}

std::optional<ForumKind> parse_forum_kind(std::string_view s) {
  for (std::size_t i = 0; i < kForumKinds.size(); ++i) {
    if (kForumKinds[i] == s) return static_cast<ForumKind>(i);
  }
  return std::nullopt;
}

ParseResult<RawClickEvent> parse_clickstream_log(std::istream& in) {
  return parse_lines<RawClickEvent>(in, convert_click);
}

ParseResult<RawForumEvent> parse_forum_log(std::istream& in) {
  return parse_lines<RawForumEvent>(in, convert_forum);
}

ParseResult<Event> parse_event_log(std::istream& in) { return parse_lines<Event>(in, convert_event); }

std::vector<RawClickEvent> filter_valid_videos(std::span<const RawClickEvent> events,
                                               std::size_t min_unique_viewers) {
  if (min_unique_viewers == 0) throw std::invalid_argument("min_unique_viewers must be >= 1");
  std::map<std::string, std::set<std::int64_t>> viewers;
  for (const auto& e : events) viewers[e.video_id].insert(e.student_id);

  std::vector<RawClickEvent> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    if (viewers[e.video_id].size() >= min_unique_viewers) out.push_back(e);
  }
  return out;
}

ClickEncoding encode_clickstream(std::span<const RawClickEvent> events) {
  ClickEncoding out;
  if (events.empty()) return out;

  const auto student = events.front().student_id;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].student_id != student) {
      throw std::invalid_argument("encode_clickstream: events of more than one student");
    }
    if (i > 0 && events[i].timestamp < events[i - 1].timestamp) {
      throw std::invalid_argument("encode_clickstream: events not sorted by timestamp");
    }
  }

  const std::string* session_video = nullptr;
  double rate = kInitialPlayrate;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (session_video == nullptr || *session_video != e.video_id) {
      session_video = &e.video_id;
      rate = kInitialPlayrate;
    }
    switch (e.kind) {
      case ClickKind::Play:
        out.events.push_back({student, e.timestamp, Token::PL});
        break;
      case ClickKind::Pause:
        out.events.push_back({student, e.timestamp, Token::PA});
        break;
      case ClickKind::RateChange: {
        const double next = e.playrate.value_or(rate);
        if (next > rate) {
          out.events.push_back({student, e.timestamp, Token::RCI});
        } else if (next < rate) {
          out.events.push_back({student, e.timestamp, Token::RCD});
        } else {
          ++out.dropped_ratechanges;
        }
        rate = next;
        break;
      }
      case ClickKind::Seek: {
        const auto dir = e.seek_direction.value_or(SeekDirection::Forward);
        std::size_t last = i;
        while (last + 1 < events.size()) {
          const auto& next = events[last + 1];
          if (next.kind != ClickKind::Seek || next.seek_direction != e.seek_direction ||
              next.video_id != e.video_id ||
              !(next.timestamp - events[last].timestamp < kScrollGapSeconds)) {
            break;
          }
          ++last;
        }
        const bool forward = dir == SeekDirection::Forward;
        const Token token = last > i ? (forward ? Token::FS : Token::BS)
                                     : (forward ? Token::FW : Token::BW);
        out.events.push_back({student, e.timestamp, token});
        i = last;
        break;
      }
    }
  }
  return out;
}

ClickEncoding encode_all_clickstreams(std::span<const RawClickEvent> events) {
  std::map<std::int64_t, std::vector<RawClickEvent>> by_student;
  for (const auto& e : events) by_student[e.student_id].push_back(e);

  ClickEncoding out;
  for (auto& [sid, group] : by_student) {
    std::stable_sort(group.begin(), group.end(),
                     [](const RawClickEvent& a, const RawClickEvent& b) { return a.timestamp < b.timestamp; });
    auto encoded = encode_clickstream(group);
    out.events.insert(out.events.end(), encoded.events.begin(), encoded.events.end());
    out.dropped_ratechanges += encoded.dropped_ratechanges;
  }
  return out;
}

Token token_for(ForumKind kind) {
  switch (kind) {
    case ForumKind::Post: return Token::Po;
    case ForumKind::Comment: return Token::Co;
    case ForumKind::Thread: return Token::Th;
    case ForumKind::Upvote: return Token::Uv;
    case ForumKind::Downvote: return Token::Dv;
    case ForumKind::ViewForum: return Token::Vf;
    case ForumKind::ViewThread: return Token::Vt;
  }
  throw std::logic_error("unreachable forum kind");
}

std::vector<Event> encode_forum(std::span<const RawForumEvent> events) {
  std::vector<Event> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back({e.student_id, e.timestamp, token_for(e.kind)});
  return out;
}

std::string to_json_line(const RawClickEvent& e) {
  json doc = {{"sid", e.student_id}, {"t", e.timestamp}, {"vid", e.video_id}, {"kind", to_string(e.kind)}};
  if (e.seek_direction) doc["dir"] = to_string(*e.seek_direction);
  if (e.playrate) doc["rate"] = *e.playrate;
  return doc.dump();
}

std::string to_json_line(const RawForumEvent& e) {
  json doc = {{"sid", e.student_id}, {"t", e.timestamp}, {"kind", to_string(e.kind)}};
  return doc.dump();
}

std::string to_json_line(const Event& e) {
  json doc = {{"sid", e.student_id}, {"t", e.timestamp}, {"tok", to_string(e.token)}};
  return doc.dump();
}

std::string to_json_line(const Diagnostic& d, std::string_view source) {
  json doc = {{"source", source}, {"line", d.line}, {"reason", d.reason}};
  return doc.dump();
}

}  // namespace moocgraph
