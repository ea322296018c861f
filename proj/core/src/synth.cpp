#include "moocgraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace moocgraph {

namespace {

constexpr std::array<double, 7> kRateLadder = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
constexpr int kNormalRate = 2;  // index of 1.0
constexpr double kSecondsPerDay = 86400.0;

// Platform-independent draws on top of mt19937_64.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(std::floor(uniform() * static_cast<double>(hi - lo + 1)));
  }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 rng_;
};

std::string video_name(char prefix, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%03zu", prefix, index + 1);
  return buf;
}

struct Action {
  Token token;
  std::string video;  // video actions only
};

// Playback state that the encoder reconstructs: current video and its rate.
struct PlayerState {
  std::string video;
  int rate = kNormalRate;

  void enter(const std::string& v) {
    if (v != video) {
      video = v;
      rate = kNormalRate;
    }
  }
};

enum class WeekShape { Normal, Shrinking, Sparse };

class WeekPlanner {
 public:
  WeekPlanner(Draw& draw, const SynthProfile& profile) : draw_(draw), profile_(profile) {}

  std::vector<Action> plan(Archetype type, bool force_post, WeekShape shape, PlayerState state) {
    if (shape == WeekShape::Sparse) return sparse_week(state);

    std::vector<std::vector<Action>> chunks;
    const int sessions = 1 + (draw_.chance(0.5) ? 1 : 0) + (draw_.chance(0.2) ? 1 : 0);
    for (int s = 0; s < sessions; ++s) chunks.push_back({});
    const double forum_rate = type == Archetype::Lurker ? 0.4 : type == Archetype::Editor ? 0.7 : 0.9;
    if (force_post || draw_.chance(forum_rate)) chunks.push_back(forum_visit(type, force_post));
    shuffle(chunks);

    // Video chunks are filled in timeline order so the simulated player state
    // matches what the encoder will replay.
    std::vector<Action> actions;
    for (auto& chunk : chunks) {
      if (chunk.empty()) chunk = video_session(state);
      actions.insert(actions.end(), chunk.begin(), chunk.end());
    }
    if (shape == WeekShape::Shrinking) {
      const auto keep = std::max<std::size_t>(2, static_cast<std::size_t>(0.4 * static_cast<double>(actions.size())));
      if (actions.size() > keep) actions.resize(keep);
    }
    return actions;
  }

 private:
  std::vector<Action> sparse_week(const PlayerState& state) {
    const std::string video = state.video.empty() ? video_name('v', 0) : state.video;
    const double u = draw_.uniform();
    if (u < 0.5) return {{Token::PL, video}};
    if (u < 0.7) return {{Token::PL, video}, {Token::PA, video}};
    if (u < 0.9) return {{Token::Vf, {}}};
    return {{Token::Vt, {}}};
  }

  std::vector<Action> video_session(PlayerState& state) {
    const auto index = static_cast<std::size_t>(draw_.integer(0, static_cast<int>(profile_.valid_videos) - 1));
    const std::string video = video_name('v', index);
    state.enter(video);

    std::vector<Action> out;
    auto emit = [&](Token t) { out.push_back({t, video}); };
    emit(Token::PL);
    const int steps = draw_.integer(2, 8);
    for (int s = 0; s < steps; ++s) {
      if (draw_.chance(active_share_)) {
        const double u = draw_.uniform();
        if (u < 0.3) {
          emit(Token::FW);
        } else if (u < 0.6) {
          emit(Token::BW);
        } else if (u < 0.75) {
          emit(Token::FS);
        } else if (u < 0.85) {
          emit(Token::BS);
        } else {
          const int top = static_cast<int>(kRateLadder.size()) - 1;
          const bool up = state.rate == 0 || (state.rate < top && draw_.chance(0.5));
          state.rate += up ? 1 : -1;
          emit(up ? Token::RCI : Token::RCD);
        }
      } else if (draw_.chance(0.7)) {
        emit(Token::PA);
        emit(Token::PL);
      } else {
        emit(Token::PL);
      }
    }
    emit(Token::PA);
    return out;
  }

  std::vector<Action> forum_visit(Archetype type, bool force_post) {
    std::vector<Action> out;
    out.push_back({Token::Vf, {}});
    const int threads = draw_.integer(1, 4);
    for (int k = 0; k < threads; ++k) out.push_back({Token::Vt, {}});
    if (type != Archetype::Lurker && draw_.chance(0.5)) {
      out.push_back({draw_.chance(0.7) ? Token::Uv : Token::Dv, {}});
    }
    if (type == Archetype::Creator && (force_post || draw_.chance(0.6))) {
      const double u = draw_.uniform();
      out.push_back({force_post || u < 0.5 ? Token::Po : u < 0.8 ? Token::Co : Token::Th, {}});
    }
    if (draw_.chance(0.3)) out.push_back({Token::Vf, {}});
    return out;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(draw_.integer(0, static_cast<int>(i) - 1))]);
    }
  }

 public:
  double active_share_ = 0.3;

 private:
  Draw& draw_;
  const SynthProfile& profile_;
};

ForumKind forum_kind_for(Token t) {
  switch (t) {
    case Token::Po: return ForumKind::Post;
    case Token::Co: return ForumKind::Comment;
    case Token::Th: return ForumKind::Thread;
    case Token::Uv: return ForumKind::Upvote;
    case Token::Dv: return ForumKind::Downvote;
    case Token::Vf: return ForumKind::ViewForum;
    case Token::Vt: return ForumKind::ViewThread;
    default: throw std::logic_error("not a forum token");
  }
}

// Turns planned actions into raw events on the student's timeline.
void render(const std::vector<Action>& actions, std::int64_t sid, double start, PlayerState& state, Draw& draw,
            SyntheticLogs& logs) {
  double clock = start;
  for (const auto& a : actions) {
    clock += draw.uniform(2.0, 300.0);
    if (is_forum(a.token)) {
      logs.forum.push_back({sid, clock, forum_kind_for(a.token)});
      continue;
    }
    state.enter(a.video);
    RawClickEvent e{sid, a.video, clock, ClickKind::Play, std::nullopt, std::nullopt};
    switch (a.token) {
      case Token::PL: break;
      case Token::PA: e.kind = ClickKind::Pause; break;
      case Token::FW:
      case Token::BW:
      case Token::FS:
      case Token::BS: {
        e.kind = ClickKind::Seek;
        const bool forward = a.token == Token::FW || a.token == Token::FS;
        e.seek_direction = forward ? SeekDirection::Forward : SeekDirection::Backward;
        if (a.token == Token::FS || a.token == Token::BS) {
          logs.clickstream.push_back(e);
          clock += draw.uniform(0.1, 0.8);
          e.timestamp = clock;
        }
        break;
      }
      case Token::RCI:
      case Token::RCD:
        state.rate += a.token == Token::RCI ? 1 : -1;
        e.kind = ClickKind::RateChange;
        e.playrate = kRateLadder[static_cast<std::size_t>(state.rate)];
        break;
      default: throw std::logic_error("unexpected token in video action");
    }
    logs.clickstream.push_back(e);
  }
}

}  // namespace

std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::Lurker: return "lurker";
    case Archetype::Editor: return "editor";
    case Archetype::Creator: return "creator";
  }
  return "lurker";
}

void validate(const SynthProfile& p) {
  if (p.n_students == 0) throw std::invalid_argument("n_students must be >= 1");
  if (p.weeks < 1) throw std::invalid_argument("weeks must be >= 1");
  if (p.valid_videos == 0) throw std::invalid_argument("valid_videos must be >= 1");
  if (!(p.dropout_signal_strength >= 0.0 && p.dropout_signal_strength <= 1.0)) {
    throw std::invalid_argument("dropout_signal_strength must lie in [0, 1]");
  }
  if (!(p.weekly_hazard > 0.0 && p.weekly_hazard <= 1.0)) {
    throw std::invalid_argument("weekly_hazard must lie in (0, 1]");
  }
  double sum = 0.0;
  for (double share : p.archetype_mix) {
    if (!(share >= 0.0)) throw std::invalid_argument("archetype shares must be non-negative");
    sum += share;
  }
  if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("archetype shares must sum to 1");
}

SyntheticLogs generate_synthetic(const SynthProfile& profile, std::uint64_t seed) {
  validate(profile);
  Draw draw(seed);
  WeekPlanner planner(draw, profile);
  SyntheticLogs logs;

  const std::int64_t step = std::max<std::int64_t>(1, 2'600'000 / static_cast<std::int64_t>(profile.n_students));
  for (std::size_t k = 0; k < profile.n_students; ++k) {
    SynthStudent s;
    s.student_id = 1 + static_cast<std::int64_t>(k) * step + draw.integer(0, static_cast<int>(step - 1));
    const double u = draw.uniform();
    s.archetype = u < profile.archetype_mix[0]                               ? Archetype::Lurker
                  : u < profile.archetype_mix[0] + profile.archetype_mix[1] ? Archetype::Editor
                                                                             : Archetype::Creator;
    s.first_week = profile.weeks == 1 || draw.chance(0.8) ? 1 : draw.integer(2, std::min(4, profile.weeks));
    s.last_week = s.first_week;
    while (s.last_week < profile.weeks && !draw.chance(profile.weekly_hazard)) ++s.last_week;
    s.fades = draw.chance(profile.dropout_signal_strength);
    logs.students.push_back(s);

    planner.active_share_ = s.archetype == Archetype::Lurker ? 0.15 : 0.3;
    PlayerState state;
    for (int w = s.first_week; w <= s.last_week; ++w) {
      WeekShape shape = WeekShape::Normal;
      if (s.fades && w == s.last_week) {
        shape = WeekShape::Sparse;
      } else if (s.fades && w == s.last_week - 1) {
        shape = WeekShape::Shrinking;
      }
      const bool force_post = s.archetype == Archetype::Creator && w == s.first_week;
      const auto actions = planner.plan(s.archetype, force_post, shape, state);

      const double week_start = profile.course_start + static_cast<double>(w - 1) * kSecondsPerWeek;
      render(actions, s.student_id, week_start + draw.uniform(0.0, 4.0 * kSecondsPerDay), state, draw, logs);

      auto& planned = logs.planned[SequenceKey{s.student_id, w}];
      for (const auto& a : actions) planned.push_back(a.token);
    }
  }

  // Logging noise: videos seen by only a handful of students.
  const double span = static_cast<double>(profile.weeks) * kSecondsPerWeek;
  for (std::size_t v = 0; v < profile.invalid_videos; ++v) {
    const int viewers = draw.integer(1, 3);
    for (int k = 0; k < viewers; ++k) {
      const auto& s = logs.students[static_cast<std::size_t>(
          draw.integer(0, static_cast<int>(logs.students.size()) - 1))];
      logs.clickstream.push_back({s.student_id, video_name('x', v), profile.course_start + draw.uniform(0.0, span),
                                  ClickKind::Play, std::nullopt, std::nullopt});
    }
  }
  return logs;
}

void write_clickstream_jsonl(const std::vector<RawClickEvent>& events, std::ostream& out) {
  for (const auto& e : events) out << to_json_line(e) << '\n';
}

void write_forum_jsonl(const std::vector<RawForumEvent>& events, std::ostream& out) {
  for (const auto& e : events) out << to_json_line(e) << '\n';
}

}  // namespace moocgraph
