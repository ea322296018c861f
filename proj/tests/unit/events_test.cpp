#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "moocgraph/errors.hpp"
#include "moocgraph/events.hpp"

using namespace moocgraph;

namespace {

RawClickEvent play(double t, std::string vid = "v1", std::int64_t sid = 7) {
  return {sid, std::move(vid), t, ClickKind::Play, std::nullopt, std::nullopt};
}
RawClickEvent pause(double t, std::string vid = "v1") {
  return {7, std::move(vid), t, ClickKind::Pause, std::nullopt, std::nullopt};
}
RawClickEvent seek(double t, SeekDirection d, std::string vid = "v1") {
  return {7, std::move(vid), t, ClickKind::Seek, d, std::nullopt};
}
RawClickEvent rate(double t, double r, std::string vid = "v1") {
  return {7, std::move(vid), t, ClickKind::RateChange, std::nullopt, r};
}

std::vector<Token> tokens_of(const std::vector<Event>& events) {
  std::vector<Token> out;
  for (const auto& e : events) out.push_back(e.token);
  return out;
}

constexpr auto F = SeekDirection::Forward;
constexpr auto B = SeekDirection::Backward;

}  // namespace

TEST(ParseClickstream, MapsFieldsDirectly) {
  std::istringstream in(R"({"sid":7,"t":100.0,"vid":"v1","kind":"play"})");
  const auto r = parse_clickstream_log(in);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_EQ(r.events[0], play(100.0));
}

TEST(ParseClickstream, SeekWithoutDirectionIsDiagnosed) {
  std::istringstream in(R"({"sid":7,"t":100.0,"vid":"v1","kind":"seek"})");
  const auto r = parse_clickstream_log(in);
  EXPECT_TRUE(r.events.empty());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].line, 1u);
  EXPECT_EQ(r.diagnostics[0].reason, "seek missing direction");
}

TEST(ParseClickstream, KeepsOrderAndCollectsMalformedLines) {
  std::istringstream in(
      "{\"sid\":1,\"t\":1,\"vid\":\"a\",\"kind\":\"play\"}\n"
      "{\"sid\":1,\"t\":2,\"vid\":\"a\",\"kind\":\"seek\",\"dir\":\"forward\"}\n"
      "not json\n"
      "\n"
      "{\"sid\":1,\"t\":3,\"vid\":\"a\",\"kind\":\"ratechange\",\"rate\":1.5}\n");
  const auto r = parse_clickstream_log(in);
  ASSERT_EQ(r.events.size(), 3u);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].line, 3u);
  EXPECT_EQ(r.events[0].timestamp, 1.0);
  EXPECT_EQ(r.events[1].seek_direction, F);
  EXPECT_EQ(r.events[2].playrate, 1.5);
}

TEST(ParseClickstream, ConditionalFieldsAreEnforced) {
  const char* bad[] = {
      R"({"sid":1,"t":1,"vid":"a","kind":"ratechange"})",
      R"({"sid":1,"t":1,"vid":"a","kind":"ratechange","rate":0})",
      R"({"sid":1,"t":1,"vid":"a","kind":"play","dir":"forward"})",
      R"({"sid":1,"t":1,"vid":"a","kind":"pause","rate":2})",
      R"({"sid":1,"t":-1,"vid":"a","kind":"play"})",
      R"({"sid":1,"t":1,"kind":"play"})",
      R"({"t":1,"vid":"a","kind":"play"})",
      R"({"sid":1,"t":1,"vid":"a","kind":"rewind"})",
      R"({"sid":1,"t":1,"vid":"a","kind":"seek","dir":"sideways"})",
      R"([1,2,3])",
  };
  for (const char* line : bad) {
    std::istringstream in(line);
    const auto r = parse_clickstream_log(in);
    EXPECT_TRUE(r.events.empty()) << line;
    EXPECT_EQ(r.diagnostics.size(), 1u) << line;
  }
}

TEST(ParseClickstream, UnreadableStreamThrows) {
  std::istringstream in("x");
  in.setstate(std::ios::badbit);
  EXPECT_THROW(parse_clickstream_log(in), IoError);
}

TEST(ParseForum, MapsKindsAndDiagnosesUnknown) {
  std::istringstream ok(R"({"sid":7,"t":50,"kind":"viewthread"})");
  const auto r = parse_forum_log(ok);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0], (RawForumEvent{7, 50.0, ForumKind::ViewThread}));

  std::istringstream flag(R"({"sid":7,"t":50,"kind":"flag"})");
  const auto f = parse_forum_log(flag);
  EXPECT_TRUE(f.events.empty());
  ASSERT_EQ(f.diagnostics.size(), 1u);
  EXPECT_EQ(f.diagnostics[0].reason, "unknown kind");

  std::istringstream empty("");
  const auto e = parse_forum_log(empty);
  EXPECT_TRUE(e.events.empty());
  EXPECT_TRUE(e.diagnostics.empty());
}

TEST(ParseEvents, RoundTripsEncodedEvents) {
  const std::vector<Event> events{{3, 1.25, Token::RCI}, {4, 1e9 + 0.5, Token::Vt}};
  std::ostringstream out;
  for (const auto& e : events) out << to_json_line(e) << '\n';
  std::istringstream in(out.str());
  const auto r = parse_event_log(in);
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_EQ(r.events, events);
}

TEST(RawJson, RoundTripsThroughParsers) {
  const std::vector<RawClickEvent> clicks{play(1.5), seek(2.0, B), rate(3.0, 0.75), pause(4.0, "v2")};
  std::ostringstream out;
  for (const auto& e : clicks) out << to_json_line(e) << '\n';
  std::istringstream in(out.str());
  EXPECT_EQ(parse_clickstream_log(in).events, clicks);
}

TEST(FilterValidVideos, DropsVideosBelowThreshold) {
  const std::vector<RawClickEvent> events{play(1, "lonely"), pause(2, "lonely")};
  EXPECT_TRUE(filter_valid_videos(events, 10).empty());
  EXPECT_EQ(filter_valid_videos(events, 1), events);
  EXPECT_THROW(filter_valid_videos(events, 0), std::invalid_argument);
}

TEST(FilterValidVideos, KeepsExactlyTheVideosMeetingThreshold) {
  // 82 videos: the first 45 watched by 10..14 students, the rest by 1..9.
  std::vector<RawClickEvent> events;
  std::size_t expected = 0;
  for (int v = 0; v < 82; ++v) {
    const int viewers = v < 45 ? 10 + v % 5 : 1 + v % 9;
    for (int s = 0; s < viewers; ++s) {
      // Repeat views by the same student do not count twice.
      for (int k = 0; k < 2; ++k) events.push_back(play(s + k, "vid" + std::to_string(v), 100 + s));
      if (v < 45) expected += 2;
    }
  }
  const auto kept = filter_valid_videos(events, 10);
  EXPECT_EQ(kept.size(), expected);
  std::set<std::string> ids;
  for (const auto& e : kept) ids.insert(e.video_id);
  EXPECT_EQ(ids.size(), 45u);
}

TEST(EncodeClickstream, TwoCloseForwardSeeksFormOneScroll) {
  const std::vector<RawClickEvent> raw{seek(10.0, F), seek(10.5, F)};
  const auto enc = encode_clickstream(raw);
  ASSERT_EQ(enc.events.size(), 1u);
  EXPECT_EQ(enc.events[0], (Event{7, 10.0, Token::FS}));
}

TEST(EncodeClickstream, IsolatedSeekKeepsDirection) {
  const std::vector<RawClickEvent> bw{seek(10.0, B)};
  EXPECT_EQ(tokens_of(encode_clickstream(bw).events), std::vector<Token>{Token::BW});
  const std::vector<RawClickEvent> fw{seek(10.0, F)};
  EXPECT_EQ(tokens_of(encode_clickstream(fw).events), std::vector<Token>{Token::FW});
}

TEST(EncodeClickstream, RatechangeComparesWithPreviousRate) {
  const std::vector<RawClickEvent> raw{play(1), rate(2, 1.5), rate(3, 1.25)};
  EXPECT_EQ(tokens_of(encode_clickstream(raw).events), (std::vector<Token>{Token::PL, Token::RCI, Token::RCD}));
}

TEST(EncodeClickstream, UnchangedRateIsDroppedAndCounted) {
  const std::vector<RawClickEvent> raw{rate(1, 1.0), rate(2, 2.0), rate(3, 2.0)};
  const auto enc = encode_clickstream(raw);
  EXPECT_EQ(tokens_of(enc.events), std::vector<Token>{Token::RCI});
  EXPECT_EQ(enc.dropped_ratechanges, 2u);
}

TEST(EncodeClickstream, NewVideoResetsPlayrate) {
  const std::vector<RawClickEvent> raw{rate(1, 2.0, "a"), rate(2, 1.5, "b"), rate(3, 1.25, "a")};
  // a: 1.0 -> 2.0 up; b: 1.0 -> 1.5 up; back on a is a new session: 1.0 -> 1.25 up.
  EXPECT_EQ(tokens_of(encode_clickstream(raw).events), (std::vector<Token>{Token::RCI, Token::RCI, Token::RCI}));
}

TEST(EncodeClickstream, LongRunCollapsesToOneScroll) {
  const std::vector<RawClickEvent> raw{seek(10.0, B), seek(10.4, B), seek(11.2, B), seek(12.1, B), play(20)};
  const auto enc = encode_clickstream(raw);
  ASSERT_EQ(enc.events.size(), 2u);
  EXPECT_EQ(enc.events[0], (Event{7, 10.0, Token::BS}));
  EXPECT_EQ(enc.events[1].token, Token::PL);
}

TEST(EncodeClickstream, RunBreakers) {
  // Direction change.
  const std::vector<RawClickEvent> mixed{seek(10.0, F), seek(10.3, B)};
  EXPECT_EQ(tokens_of(encode_clickstream(mixed).events), (std::vector<Token>{Token::FW, Token::BW}));
  // Gap of exactly one second.
  const std::vector<RawClickEvent> gap{seek(10.0, F), seek(11.0, F)};
  EXPECT_EQ(tokens_of(encode_clickstream(gap).events), (std::vector<Token>{Token::FW, Token::FW}));
  // Another event in between.
  const std::vector<RawClickEvent> between{seek(10.0, F), pause(10.2), seek(10.4, F)};
  EXPECT_EQ(tokens_of(encode_clickstream(between).events), (std::vector<Token>{Token::FW, Token::PA, Token::FW}));
  // Different video.
  const std::vector<RawClickEvent> videos{seek(10.0, F, "a"), seek(10.2, F, "b")};
  EXPECT_EQ(tokens_of(encode_clickstream(videos).events), (std::vector<Token>{Token::FW, Token::FW}));
}

TEST(EncodeClickstream, RejectsUnsortedOrMixedInput) {
  const std::vector<RawClickEvent> unsorted{play(2), play(1)};
  EXPECT_THROW(encode_clickstream(unsorted), std::invalid_argument);
  const std::vector<RawClickEvent> mixed{play(1, "v1", 1), play(2, "v1", 2)};
  EXPECT_THROW(encode_clickstream(mixed), std::invalid_argument);
}

TEST(EncodeAllClickstreams, GroupsAndSortsPerStudent) {
  const std::vector<RawClickEvent> raw{play(5, "v1", 2), pause(3), play(1, "v1", 2), play(2)};
  const auto enc = encode_all_clickstreams(raw);
  ASSERT_EQ(enc.events.size(), 4u);
  EXPECT_EQ(enc.events[0], (Event{2, 1.0, Token::PL}));
  EXPECT_EQ(enc.events[1], (Event{2, 5.0, Token::PL}));
  EXPECT_EQ(enc.events[2], (Event{7, 2.0, Token::PL}));
  EXPECT_EQ(enc.events[3], (Event{7, 3.0, Token::PA}));
}

TEST(EncodeForum, OneToOneMapping) {
  EXPECT_EQ(encode_forum(std::vector<RawForumEvent>{{1, 5, ForumKind::Post}}),
            (std::vector<Event>{{1, 5.0, Token::Po}}));
  EXPECT_EQ(encode_forum(std::vector<RawForumEvent>{{1, 1, ForumKind::ViewForum}, {1, 2, ForumKind::Upvote}}),
            (std::vector<Event>{{1, 1.0, Token::Vf}, {1, 2.0, Token::Uv}}));
  EXPECT_TRUE(encode_forum(std::vector<RawForumEvent>{}).empty());
  EXPECT_EQ(token_for(ForumKind::Comment), Token::Co);
  EXPECT_EQ(token_for(ForumKind::Thread), Token::Th);
  EXPECT_EQ(token_for(ForumKind::Downvote), Token::Dv);
  EXPECT_EQ(token_for(ForumKind::ViewThread), Token::Vt);
}
