#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "musim/domain.hpp"

using namespace musim;

namespace {

WorldGoal test_goal() {
  WorldGoal g;
  g.objectType = "bowl";
  g.location = "cabinet";
  g.object = TargetRef::object("bowl-small", "bowl");
  return g;
}

Move hel(HelAction action, DialogueAct da) {
  Move m;
  m.actor = Actor::Hel;
  m.helAction = action;
  m.da = da;
  return m;
}

// every distinct target reference relative to test_goal()
std::vector<TargetRef> target_variants() {
  const WorldGoal g = test_goal();
  return {
      TargetRef::location(g.location),
      TargetRef::location("drawer"),
      g.object,
      TargetRef::object("bowl-large", "bowl"),
      TargetRef::object("pot-1", "pot"),
      TargetRef::object_type("bowl"),
      TargetRef::object_type("pot"),
  };
}

// the full finite move alphabet used by the closure property
std::vector<Move> move_alphabet() {
  const auto targets = target_variants();
  std::vector<std::optional<PointingEvent>> pointings = {std::nullopt};
  for (const TargetRef& t : targets) {
    if (!t.id.empty()) pointings.push_back(PointingEvent{t});
  }
  std::vector<std::optional<HapticOstensiveEvent>> hos = {std::nullopt};
  for (const TargetRef& t : targets) {
    if (t.id.empty()) continue;
    for (int ty = 0; ty < kNumHoTypes; ++ty) {
      const HapticOstensiveEvent ev{t, static_cast<HoType>(ty)};
      if (ho_event_coherent(ev)) hos.push_back(ev);
    }
  }
  std::vector<std::vector<TargetRef>> mentions = {{}};
  for (const TargetRef& t : targets) mentions.push_back({t});

  std::vector<Move> moves;
  for (int a = 0; a < kNumHelActions; ++a) {
    for (int d = 0; d < kNumDialogueActs; ++d) {
      for (const auto& p : pointings) {
        for (const auto& h : hos) {
          for (const auto& m : mentions) {
            Move mv = hel(static_cast<HelAction>(a), static_cast<DialogueAct>(d));
            mv.pointing = p;
            mv.ho = h;
            mv.mentioned = m;
            if (move_valid(mv)) moves.push_back(std::move(mv));
          }
        }
      }
    }
  }
  return moves;
}

}  // namespace

TEST_CASE("exactly 13 of the 27 belief triples are valid") {
  int valid = 0, invalid = 0;
  for (int ot = 0; ot <= 2; ++ot) {
    for (int loc = 0; loc <= 2; ++loc) {
      for (int obj = 0; obj <= 2; ++obj) {
        if (is_valid_belief(ot, loc, obj)) {
          ++valid;
          CHECK_NOTHROW(validate_belief(ot, loc, obj));
        } else {
          ++invalid;
          CHECK_THROWS_AS(validate_belief(ot, loc, obj), InvalidBelief);
        }
      }
    }
  }
  CHECK(valid == 13);
  CHECK(invalid == 14);
}

TEST_CASE("belief index follows the canonical listing") {
  CHECK(belief_index({0, 0, 0}) == 0);
  CHECK(belief_index({1, 0, 1}) == 4);
  CHECK(belief_index({2, 2, 0}) == 12);
  for (int i = 0; i < kNumBeliefStates; ++i) {
    CHECK(belief_index(belief_from_index(i)) == i);
  }
  CHECK_THROWS_AS(belief_from_index(13), InvalidBelief);
  CHECK_THROWS_AS(belief_index(BeliefState{0, 0, 1}), InvalidBelief);
}

TEST_CASE("validate_belief names the object-type rule") {
  CHECK_NOTHROW(validate_belief(1, 0, 1));
  CHECK_THROWS_WITH_AS(validate_belief(0, 0, 1),
                       doctest::Contains("object-type"), InvalidBelief);
  CHECK_THROWS_AS(validate_belief(2, 0, 1), InvalidBelief);
  CHECK_THROWS_AS(validate_belief(1, 2, 1), InvalidBelief);
  CHECK_THROWS_AS(validate_belief(3, 0, 0), InvalidBelief);
}

TEST_CASE("correct-object evidence confirms the object") {
  const WorldGoal g = test_goal();
  Move m = hel(HelAction::VerifyO, DialogueAct::Check);
  m.pointing = PointingEvent{g.object};
  const BeliefState next = belief_update({1, 1, 0}, m, g, {true, true});
  CHECK(next == BeliefState{1, 1, 1});
}

TEST_CASE("right type but wrong instance marks the object as wrong") {
  const WorldGoal g = test_goal();
  Move m = hel(HelAction::VerifyOT, DialogueAct::QueryYn);
  m.pointing = PointingEvent{TargetRef::object("bowl-large", "bowl")};
  const BeliefState next = belief_update({1, 0, 0}, m, g, {true, false});
  CHECK(next == BeliefState{1, 0, 2});
}

TEST_CASE("components cannot leave 0 before the entity was uttered") {
  const WorldGoal g = test_goal();
  Move m = hel(HelAction::VerifyL, DialogueAct::Check);
  m.mentioned = {TargetRef::location(g.location)};
  const BeliefState next = belief_update({0, 0, 0}, m, g, {false, false});
  CHECK(next == BeliefState{0, 0, 0});
}

TEST_CASE("renewed requests reset the entity to unknown") {
  const WorldGoal g = test_goal();
  const Move m = hel(HelAction::RequestOT, DialogueAct::QueryW);
  CHECK(belief_update({1, 1, 0}, m, g, {true, true}) == BeliefState{0, 1, 0});
  // object belief cannot survive losing the type
  CHECK(belief_update({1, 1, 1}, m, g, {true, true}) == BeliefState{0, 1, 0});
}

TEST_CASE("acknowledgment confirms the uttered entities") {
  const WorldGoal g = test_goal();
  const Move m = hel(HelAction::Acknowledge, DialogueAct::Acknowledge);
  CHECK(belief_update({0, 0, 0}, m, g, {true, false}) == BeliefState{1, 0, 0});
  CHECK(belief_update({0, 0, 0}, m, g, {true, true}) == BeliefState{1, 1, 0});
  CHECK(belief_update({2, 0, 0}, m, g, {true, false}) == BeliefState{1, 0, 0});
}

TEST_CASE("wrong location evidence before the type is known reaches (0,2,0)") {
  const WorldGoal g = test_goal();
  Move m = hel(HelAction::VerifyL, DialogueAct::Check);
  m.pointing = PointingEvent{TargetRef::location("drawer")};
  CHECK(belief_update({0, 0, 0}, m, g, {false, true}) == BeliefState{0, 2, 0});
}

TEST_CASE("belief_update is closed over the valid states") {
  const WorldGoal g = test_goal();
  const auto moves = move_alphabet();
  REQUIRE(moves.size() > 1000);
  int checked = 0;
  for (const BeliefState& b : kBeliefStates) {
    for (int uo = 0; uo <= 1; ++uo) {
      for (int ul = 0; ul <= 1; ++ul) {
        for (const Move& m : moves) {
          const BeliefState next = belief_update(b, m, g, {uo == 1, ul == 1});
          if (!is_valid_belief(next.ot, next.loc, next.obj)) {
            CAPTURE(to_string(b));
            REQUIRE(is_valid_belief(next.ot, next.loc, next.obj));
          }
          ++checked;
        }
      }
    }
  }
  CHECK(checked == static_cast<int>(moves.size()) * kNumBeliefStates * 4);
}

TEST_CASE("no move changes the initial state before anything was uttered") {
  const WorldGoal g = test_goal();
  for (const Move& m : move_alphabet()) {
    const BeliefState next = belief_update({0, 0, 0}, m, g, {false, false});
    REQUIRE(next == BeliefState{0, 0, 0});
  }
}

TEST_CASE("move invariants") {
  Move m;
  m.actor = Actor::Eld;
  CHECK_FALSE(move_valid(m));  // ELD move without an ELD action
  m.eldAction = EldAction::GiveOT;
  m.da = DialogueAct::Instruct;
  CHECK(move_valid(m));
  m.uttersOT = true;
  m.da = DialogueAct::NoUtterance;
  CHECK_FALSE(move_valid(m));  // silent utterance flag

  Move h = hel(HelAction::VerifyL, DialogueAct::NoUtterance);
  h.ho = HapticOstensiveEvent{TargetRef::object("bowl-small", "bowl"), HoType::OpenLocation};
  CHECK_FALSE(move_valid(h));  // opening an object
  h.ho->target = TargetRef::location("cabinet");
  CHECK(move_valid(h));
}

TEST_CASE("ho type and target kind coherence") {
  CHECK(ho_event_coherent({TargetRef::location("x"), HoType::OpenLocation}));
  CHECK_FALSE(ho_event_coherent({TargetRef::location("x"), HoType::TakeOutObject}));
  CHECK(ho_event_coherent({TargetRef::object("a", "t"), HoType::HoldObject}));
  CHECK(ho_event_coherent({TargetRef::location("x"), HoType::Touch}));
  CHECK(ho_event_coherent({TargetRef::object("a", "t"), HoType::Touch}));
}
