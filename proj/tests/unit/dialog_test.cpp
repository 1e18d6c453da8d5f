// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/dialog.hpp"

#include <gtest/gtest.h>

#include "dialeval/error.hpp"
#include "fixtures.hpp"

namespace dialeval {
namespace {

using testing::make_dialog;

Dialog four_turns() {
  return make_dialog("d1", {{'u', "hi"}, {'s', "hello", 1.0}, {'u', "thanks"}, {'s', "bye", 0.0}},
                     4.0, {3.0, 5.0});
}

TEST(Dialog, ValidDialogHasNoViolations) { EXPECT_TRUE(validate_dialog(four_turns()).empty()); }

TEST(Dialog, ReportsEachViolation) {
  Dialog d = four_turns();
  d.id.clear();
  d.turns[1].index = 7;
  d.turns[2].text.clear();
  d.turns[3].quality_label = 1.5;
  d.first_party_rating = 6.0;
  const auto v = validate_dialog(d);
  EXPECT_EQ(v.size(), 5u);
}

TEST(Dialog, EmptyTurnsIsAViolation) {
  Dialog d;
  d.id = "x";
  const auto v = validate_dialog(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], kNoTurnsViolation);
  EXPECT_TRUE(system_turn_contexts(d).empty());
}

TEST(Dialog, ContextsEndAtEachSystemTurn) {
  const auto ctx = system_turn_contexts(four_turns());
  ASSERT_EQ(ctx.size(), 2u);
  EXPECT_EQ(ctx[0].target_index, 1u);
  EXPECT_EQ(ctx[0].turns.size(), 2u);
  EXPECT_EQ(ctx[1].target_index, 3u);
  EXPECT_EQ(ctx[1].turns.size(), 4u);
  EXPECT_EQ(ctx[1].turns.back().text, "bye");
}

TEST(Dialog, WindowKeepsTrailingTurns) {
  const auto ctx = system_turn_contexts(four_turns(), 2);
  EXPECT_EQ(ctx[1].turns.size(), 2u);
  EXPECT_EQ(ctx[1].turns.front().text, "thanks");
  EXPECT_THROW(system_turn_contexts(four_turns(), 0), ConfigError);
}

TEST(Dialog, NextUserTurn) {
  const Dialog d = four_turns();
  ASSERT_TRUE(next_user_turn(d, 1).has_value());
  EXPECT_EQ(next_user_turn(d, 1)->text, "thanks");
  EXPECT_FALSE(next_user_turn(d, 3).has_value());
  EXPECT_THROW(next_user_turn(d, 0), DataError);
}

TEST(Dialog, SystemTurnWithNoFollowingUser) {
  const Dialog d = make_dialog("d", {{'u', "a"}, {'s', "b"}, {'s', "c"}});
  EXPECT_FALSE(next_user_turn(d, 1).has_value());
  EXPECT_FALSE(next_user_turn(d, 2).has_value());
}

TEST(Dialog, ThirdPartyMean) {
  EXPECT_DOUBLE_EQ(*third_party_mean(four_turns()), 4.0);
  EXPECT_FALSE(third_party_mean(make_dialog("d", {{'u', "a"}})).has_value());
}

TEST(Dialog, JsonRoundTripKeepsUnknownFields) {
  Dialog d = four_turns();
  d.extra["topic"] = "weather";
  d.turns[0].extra["lang"] = "en";
  d.feedback = "great chat";
  const Dialog back = dialog_from_json(to_json(d));
  EXPECT_EQ(back, d);
}

TEST(Dialog, FromJsonNamesTheBadField) {
  auto j = to_json(four_turns());
  j["turns"][1]["speaker"] = "robot";
  try {
    dialog_from_json(j);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("speaker"), std::string::npos) << e.what();
  }
  auto k = to_json(four_turns());
  k.erase("id");
  EXPECT_THROW(dialog_from_json(k), DataError);
}

}  // namespace
}  // namespace dialeval
