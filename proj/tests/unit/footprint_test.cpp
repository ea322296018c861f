#include <gtest/gtest.h>

#include <stdexcept>

#include "moocgraph/footprint.hpp"
#include "test_util.hpp"

using namespace moocgraph;
using testutil::toks;

namespace {
constexpr double kStart = 1'000'000.0;
}

TEST(AssignWeek, FloorsFromCourseStart) {
  EXPECT_EQ(assign_week(kStart, kStart), 1);
  EXPECT_EQ(assign_week(kStart + 604800.0, kStart), 2);
  EXPECT_EQ(assign_week(kStart + 604799.999, kStart), 1);
  EXPECT_EQ(assign_week(kStart + 1'000'000.0, kStart), 2);
  EXPECT_THROW(assign_week(kStart - 1.0, kStart), std::domain_error);
}

TEST(CurrSequences, ReproducesWorkedExample) {
  const auto expected = toks("PL PA FW RCI PA Vf Po");
  std::vector<Event> events;
  for (std::size_t i = 0; i < expected.size(); ++i) events.push_back({9, kStart + 10.0 * static_cast<double>(i), expected[i]});
  // Input order must not matter.
  std::swap(events[0], events[6]);
  std::swap(events[2], events[4]);
  const auto curr = build_curr_sequences(events, kStart);
  ASSERT_EQ(curr.size(), 1u);
  const auto& seq = curr.begin()->second;
  EXPECT_EQ(join_tokens(seq.tokens), "PL PA FW RCI PA Vf Po");
  EXPECT_EQ(seq.week.courseweek, 1);
  EXPECT_EQ(seq.week.userweek, 1);
  EXPECT_EQ(seq.setup, Setup::Curr);
}

TEST(CurrSequences, EmptyInputAndGapWeeks) {
  EXPECT_TRUE(build_curr_sequences(std::vector<Event>{}, kStart).empty());
  const std::vector<Event> events{{1, kStart + 5, Token::PL}, {1, kStart + 2 * 604800.0 + 5, Token::Vf}};
  const auto curr = build_curr_sequences(events, kStart);
  ASSERT_EQ(curr.size(), 2u);
  EXPECT_TRUE(curr.contains({1, 1}));
  EXPECT_TRUE(curr.contains({1, 3}));
  EXPECT_FALSE(curr.contains({1, 2}));
}

TEST(CurrSequences, UserweekCountsFromFirstObservedWeek) {
  const std::vector<Event> events{{4, kStart + 3 * 604800.0, Token::PL}, {4, kStart + 5 * 604800.0, Token::PA}};
  const auto curr = build_curr_sequences(events, kStart);
  EXPECT_EQ(curr.at({4, 4}).week.userweek, 1);
  EXPECT_EQ(curr.at({4, 6}).week.userweek, 3);
  EXPECT_EQ(curr.at({4, 6}).week.courseweek, 6);
}

TEST(CurrSequences, TiesFollowTokenOrderThenInputOrder) {
  const std::vector<Event> events{{1, kStart + 1, Token::Vt}, {1, kStart + 1, Token::PA}, {1, kStart + 1, Token::Po},
                                  {1, kStart + 1, Token::PA}, {1, kStart + 0.5, Token::Vf}};
  const auto curr = build_curr_sequences(events, kStart);
  EXPECT_EQ(join_tokens(curr.begin()->second.tokens), "Vf PA PA Po Vt");
}

TEST(TcurrSequences, ConcatenatesEarlierWeeks) {
  const std::vector<Event> events{{1, kStart + 1, Token::PL}, {1, kStart + 604801, Token::PA},
                                  {2, kStart + 1, Token::Vf},
                                  {3, kStart + 1, Token::PL}, {3, kStart + 2 * 604800.0 + 1, Token::Vf}};
  const auto curr = build_curr_sequences(events, kStart);
  const auto tcurr = build_tcurr_sequences(curr);
  EXPECT_EQ(join_tokens(tcurr.at({1, 2}).tokens), "PL PA");
  EXPECT_EQ(tcurr.at({2, 1}).tokens, curr.at({2, 1}).tokens);
  EXPECT_EQ(join_tokens(tcurr.at({3, 3}).tokens), "PL Vf");
  EXPECT_EQ(tcurr.at({3, 3}).setup, Setup::TCurr);
  EXPECT_EQ(tcurr.at({3, 3}).week, curr.at({3, 3}).week);
  ASSERT_EQ(tcurr.size(), curr.size());
  for (const auto& [key, seq] : curr) EXPECT_TRUE(tcurr.contains(key));
}

TEST(NominalActivity, ClassifiesBySourcesPresent) {
  EXPECT_EQ(nominal_activity_type(toks("PL PA")), NominalActivityType::VideoOnly);
  EXPECT_EQ(nominal_activity_type(toks("PL Vf")), NominalActivityType::Both);
  EXPECT_EQ(nominal_activity_type(toks("Po Vt")), NominalActivityType::ForumOnly);
  EXPECT_EQ(nominal_activity_type(toks("")), NominalActivityType::None);
}

TEST(Setup, ParsesCaseInsensitively) {
  EXPECT_EQ(parse_setup("TCurr"), Setup::TCurr);
  EXPECT_EQ(parse_setup("curr"), Setup::Curr);
  EXPECT_FALSE(parse_setup("weekly").has_value());
  EXPECT_EQ(to_string(Setup::TCurr), "tcurr");
}

TEST(CourseStart, DefaultsToEarliestEvent) {
  EXPECT_EQ(default_course_start(std::vector<Event>{{1, 50, Token::PL}, {2, 20, Token::Vf}}), 20.0);
  EXPECT_EQ(default_course_start(std::vector<Event>{}), 0.0);
}

TEST(SequenceJson, HasDocumentedKeys) {
  FootprintSequence seq{5, {kStart, 2, 1}, Setup::Curr, toks("PL Vf")};
  EXPECT_EQ(to_json_line(seq), R"({"courseweek":2,"setup":"curr","sid":5,"tokens":["PL","Vf"],"userweek":1})");
}
