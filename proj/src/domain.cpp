#include "musim/domain.hpp"

#include <algorithm>

namespace musim {

const char* to_string(Actor a) { return a == Actor::Eld ? "ELD" : "HEL"; }

const char* to_string(DialogueAct da) {
  static const char* names[kNumDialogueActs] = {
      "no-utterance", "instruct", "acknowledge", "query-w", "query-yn",
      "reply-w",      "reply-y",  "reply-n",     "check",   "explain",
      "align",        "state-y",  "state-n",     "state"};
  return names[static_cast<int>(da)];
}

const char* to_string(EldAction a) {
  static const char* names[kNumEldActions] = {
      "no-action", "give-ot", "give-l", "give-ot-l", "acknowledge", "yes", "no"};
  return names[static_cast<int>(a)];
}

const char* to_string(HelAction a) {
  static const char* names[kNumHelActions] = {
      "no-action", "request-ot", "request-l", "verify-ot", "verify-l",
      "verify-o",  "acknowledge", "yes",      "no"};
  return names[static_cast<int>(a)];
}

const char* to_string(HoType t) {
  static const char* names[kNumHoTypes] = {
      "open-location", "close-location", "touch", "take-out-object", "hold-object"};
  return names[static_cast<int>(t)];
}

bool is_valid_belief(int ot, int loc, int obj) {
  const BeliefState b{ot, loc, obj};
  return std::find(kBeliefStates.begin(), kBeliefStates.end(), b) != kBeliefStates.end();
}

BeliefState validate_belief(int ot, int loc, int obj) {
  for (int v : {ot, loc, obj}) {
    if (v < 0 || v > 2) {
      throw InvalidBelief("belief component out of range 0..2");
    }
  }
  if (obj != 0 && ot != 1) {
    throw InvalidBelief(
        "object belief requires established object-type belief (obj != 0 while ot != 1)");
  }
  if (!is_valid_belief(ot, loc, obj)) {
    throw InvalidBelief("belief triple (" + std::to_string(ot) + "," + std::to_string(loc) +
                        "," + std::to_string(obj) + ") is not one of the 13 valid states");
  }
  return BeliefState{ot, loc, obj};
}

int belief_index(const BeliefState& b) {
  for (int i = 0; i < kNumBeliefStates; ++i) {
    if (kBeliefStates[i] == b) return i;
  }
  throw InvalidBelief("belief_index on invalid state " + to_string(b));
}

BeliefState belief_from_index(int index) {
  if (index < 0 || index >= kNumBeliefStates) {
    throw InvalidBelief("belief index out of range: " + std::to_string(index));
  }
  return kBeliefStates[static_cast<std::size_t>(index)];
}

std::string to_string(const BeliefState& b) {
  return "(" + std::to_string(b.ot) + "," + std::to_string(b.loc) + "," +
         std::to_string(b.obj) + ")";
}

bool ho_event_coherent(const HapticOstensiveEvent& ev) {
  switch (ev.type) {
    case HoType::OpenLocation:
    case HoType::CloseLocation:
      return ev.target.kind == TargetKind::Location;
    case HoType::TakeOutObject:
    case HoType::HoldObject:
      return ev.target.kind == TargetKind::Object;
    case HoType::Touch:
      return true;
  }
  return false;
}

bool goal_valid(const WorldGoal& g) {
  return !g.objectType.empty() && !g.location.empty() &&
         g.object.kind == TargetKind::Object && !g.object.id.empty() &&
         g.object.objectType == g.objectType;
}

std::string move_problem(const Move& m) {
  if (m.actor == Actor::Eld) {
    if (!m.eldAction || m.helAction) return "ELD move must carry exactly an ELD action";
  } else {
    if (!m.helAction || m.eldAction) return "HEL move must carry exactly a HEL action";
  }
  if ((m.uttersOT || m.uttersL) && m.da == DialogueAct::NoUtterance) {
    return "utterance flags set on a move without utterance";
  }
  if (m.ho && !ho_event_coherent(*m.ho)) {
    return "H-O action type incompatible with its target kind";
  }
  return {};
}

namespace {

struct Evidence {
  std::optional<int> ot;
  std::optional<int> loc;
  std::optional<int> obj;

  static void merge(std::optional<int>& slot, int verdict) {
    // wrong (2) dominates correct (1) when one move carries both
    slot = slot ? std::max(*slot, verdict) : verdict;
  }

  void feed(const TargetRef& t, const WorldGoal& goal) {
    if (t.kind == TargetKind::Location) {
      if (t.id.empty()) return;  // undecidable reference carries no evidence
      merge(loc, t.id == goal.location ? 1 : 2);
      return;
    }
    if (t.id.empty()) {
      if (t.objectType.empty()) return;
      merge(ot, t.objectType == goal.objectType ? 1 : 2);  // type-level mention
      return;
    }
    if (t.id == goal.object.id) {
      merge(ot, 1);
      merge(obj, 1);
    } else if (t.objectType == goal.objectType) {
      merge(ot, 1);  // right type in mind, wrong instance
      merge(obj, 2);
    } else {
      merge(ot, 2);
      merge(obj, 2);
    }
  }
};

}  // namespace

BeliefState belief_update(const BeliefState& current, const Move& helMove,
                          const WorldGoal& goal, UtteredFlags utteredSoFar) {
  Evidence ev;
  for (const TargetRef& t : helMove.mentioned) ev.feed(t, goal);
  if (helMove.pointing) ev.feed(helMove.pointing->target, goal);
  if (helMove.ho) ev.feed(helMove.ho->target, goal);

  const HelAction action = helMove.helAction.value_or(HelAction::NoAction);
  const bool acknowledges = action == HelAction::Acknowledge || action == HelAction::Yes ||
                            helMove.da == DialogueAct::Acknowledge ||
                            helMove.da == DialogueAct::ReplyY;

  int ot = current.ot;
  if (ev.ot) {
    ot = *ev.ot;
  } else if (action == HelAction::RequestOT) {
    ot = 0;  // asking again demonstrates not knowing
  } else if (acknowledges && utteredSoFar.ot && ot != 1) {
    ot = 1;
  }

  int loc = current.loc;
  if (ev.loc) {
    loc = *ev.loc;
  } else if (action == HelAction::RequestL) {
    loc = 0;
  } else if (acknowledges && utteredSoFar.l && loc != 1) {
    loc = 1;
  }

  int obj = current.obj;
  if (ev.obj) obj = *ev.obj;

  // components cannot leave 0 before the entity was uttered
  if (current.ot == 0 && !utteredSoFar.ot) ot = 0;
  if (current.loc == 0 && !utteredSoFar.l) loc = 0;

  // keep the triple inside the 13 valid states: object belief is void
  // without established object-type belief, and while the location in
  // HEL's mind is wrong
  if (ot != 1) obj = 0;
  if (loc == 2) obj = 0;

  return BeliefState{ot, loc, obj};
}

}  // namespace musim
