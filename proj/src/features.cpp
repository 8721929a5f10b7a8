#include "musim/features.hpp"

#include <cmath>
#include <sstream>

#include "musim/util.hpp"

namespace musim {

std::string context_problem(const InteractionContext& ctx) {
  if (!ctx.prevActor) {
    if (ctx.prevEldAction != EldAction::NoAction || ctx.prevEldDa != DialogueAct::NoUtterance) {
      return "trial-start context must have no previous ELD action/DA";
    }
  }
  if (!is_valid_belief(ctx.prevBelief.ot, ctx.prevBelief.loc, ctx.prevBelief.obj)) {
    return "previous belief is not one of the 13 valid states";
  }
  if (!goal_valid(ctx.goal)) return "malformed goal";
  if (ctx.helHo && !ho_event_coherent(*ctx.helHo)) {
    return "H-O action type incompatible with its target kind";
  }
  try {
    if (ctx.helPointing) match_instance(ctx.helPointing->target, ctx.goal);
    if (ctx.helHo) match_instance(ctx.helHo->target, ctx.goal);
  } catch (const MatchUndecidable& e) {
    return e.what();
  }
  return {};
}

MatchStatus match_instance(const TargetRef& target, const WorldGoal& goal) {
  if (target.id.empty()) {
    throw MatchUndecidable("physical-event target does not name an instance");
  }
  if (target.kind == TargetKind::Location) {
    return target.id == goal.location ? MatchStatus::Correct : MatchStatus::Wrong;
  }
  if (target.id == goal.object.id) return MatchStatus::Correct;
  if (target.objectType == goal.objectType) return MatchStatus::RightTypeWrongInstance;
  return MatchStatus::Wrong;
}

std::array<double, 2> encode_prev_actor(std::optional<Actor> prevActor) {
  std::array<double, 2> v{};
  if (prevActor == Actor::Eld) v[0] = 1.0;
  if (prevActor == Actor::Hel) v[1] = 1.0;
  return v;
}

namespace {

// shared by pointing and the first half of the H-O vector
std::array<double, 5> encode_event_target(const TargetRef& target, const WorldGoal& goal) {
  std::array<double, 5> v{};
  v[target.kind == TargetKind::Location ? 0 : 1] = 1.0;
  switch (match_instance(target, goal)) {
    case MatchStatus::Correct: v[2] = 1.0; break;
    case MatchStatus::Wrong: v[3] = 1.0; break;
    case MatchStatus::RightTypeWrongInstance: v[4] = 1.0; break;
  }
  return v;
}

}  // namespace

std::array<double, 5> encode_pointing(const std::optional<PointingEvent>& event,
                                      const WorldGoal& goal) {
  if (!event) return {};
  return encode_event_target(event->target, goal);
}

std::array<double, 10> encode_ho(const std::optional<HapticOstensiveEvent>& event,
                                 const WorldGoal& goal) {
  std::array<double, 10> v{};
  if (!event) return v;
  const auto head = encode_event_target(event->target, goal);
  for (int i = 0; i < 5; ++i) v[static_cast<std::size_t>(i)] = head[static_cast<std::size_t>(i)];
  v[static_cast<std::size_t>(5 + static_cast<int>(event->type))] = 1.0;
  return v;
}

EncodedInput encode_input(const InteractionContext& ctx) {
  if (const std::string why = context_problem(ctx); !why.empty()) {
    throw InvalidContext("cannot encode context: " + why);
  }
  EncodedInput out;
  auto& v = out.values;
  const auto pa = encode_prev_actor(ctx.prevActor);
  v[feat::kPrevActor] = pa[0];
  v[feat::kPrevActor + 1] = pa[1];
  v[feat::kUtteredOT] = ctx.utteredOT ? 1.0 : 0.0;
  v[feat::kUtteredL] = ctx.utteredL ? 1.0 : 0.0;
  v[static_cast<std::size_t>(feat::kBelief + belief_index(ctx.prevBelief))] = 1.0;
  const auto pt = encode_pointing(ctx.helPointing, ctx.goal);
  for (int i = 0; i < 5; ++i) v[static_cast<std::size_t>(feat::kPointing + i)] = pt[static_cast<std::size_t>(i)];
  const auto ho = encode_ho(ctx.helHo, ctx.goal);
  for (int i = 0; i < 10; ++i) v[static_cast<std::size_t>(feat::kHo + i)] = ho[static_cast<std::size_t>(i)];
  v[static_cast<std::size_t>(feat::kHelAction + static_cast<int>(ctx.helAction))] = 1.0;
  v[static_cast<std::size_t>(feat::kHelDa + static_cast<int>(ctx.helDa))] = 1.0;
  v[static_cast<std::size_t>(feat::kPrevEldAction + static_cast<int>(ctx.prevEldAction))] = 1.0;
  v[static_cast<std::size_t>(feat::kPrevEldDa + static_cast<int>(ctx.prevEldDa))] = 1.0;
  return out;
}

namespace {

[[noreturn]] void malformed(const std::string& block, const std::string& detail) {
  throw MalformedVector("malformed feature vector, block " + block + ": " + detail);
}

int block_hot_index(std::span<const double> v, int offset, int width, const char* block,
                    bool required) {
  int hot = -1;
  int ones = 0;
  for (int i = 0; i < width; ++i) {
    const double x = v[static_cast<std::size_t>(offset + i)];
    if (x != 0.0 && x != 1.0) malformed(block, "non-binary entry");
    if (x == 1.0) {
      hot = i;
      ++ones;
    }
  }
  if (required && ones != 1) malformed(block, "expected exactly one active entry");
  if (!required && ones > 1) malformed(block, "expected at most one active entry");
  return hot;
}

}  // namespace

DecodedInput decode_input(std::span<const double> v) {
  if (v.size() != kInputSize) {
    malformed("length", "expected 76 entries, got " + std::to_string(v.size()));
  }
  DecodedInput d;

  const int pa = block_hot_index(v, feat::kPrevActor, 2, "prev-actor", false);
  if (pa == 0) d.prevActor = Actor::Eld;
  if (pa == 1) d.prevActor = Actor::Hel;

  for (int i : {feat::kUtteredOT, feat::kUtteredL}) {
    const double x = v[static_cast<std::size_t>(i)];
    if (x != 0.0 && x != 1.0) malformed("uttered-flags", "non-binary entry");
  }
  d.utteredOT = v[feat::kUtteredOT] == 1.0;
  d.utteredL = v[feat::kUtteredL] == 1.0;

  d.beliefIndex = block_hot_index(v, feat::kBelief, kNumBeliefStates, "belief", true);

  const int pKind = block_hot_index(v, feat::kPointing, 2, "pointing", false);
  const int pMatch = block_hot_index(v, feat::kPointing + 2, 3, "pointing", false);
  if ((pKind >= 0) != (pMatch >= 0)) {
    malformed("pointing", "kind and match statuses must be set together");
  }
  d.pointingPresent = pKind >= 0;
  if (d.pointingPresent) {
    d.pointingKind = pKind == 0 ? TargetKind::Location : TargetKind::Object;
    d.pointingMatch = static_cast<MatchStatus>(pMatch);
  }

  const int hKind = block_hot_index(v, feat::kHo, 2, "ho", false);
  const int hMatch = block_hot_index(v, feat::kHo + 2, 3, "ho", false);
  const int hType = block_hot_index(v, feat::kHo + 5, kNumHoTypes, "ho", false);
  if ((hKind >= 0) != (hType >= 0) || (hKind >= 0) != (hMatch >= 0)) {
    malformed("ho", "target and action-type halves must be set together");
  }
  d.hoPresent = hKind >= 0;
  if (d.hoPresent) {
    d.hoKind = hKind == 0 ? TargetKind::Location : TargetKind::Object;
    d.hoMatch = static_cast<MatchStatus>(hMatch);
    d.hoType = static_cast<HoType>(hType);
  }

  d.helAction = static_cast<HelAction>(
      block_hot_index(v, feat::kHelAction, kNumHelActions, "hel-action", true));
  d.helDa = static_cast<DialogueAct>(
      block_hot_index(v, feat::kHelDa, kNumDialogueActs, "hel-da", true));
  d.prevEldAction = static_cast<EldAction>(
      block_hot_index(v, feat::kPrevEldAction, kNumEldActions, "prev-eld-action", true));
  d.prevEldDa = static_cast<DialogueAct>(
      block_hot_index(v, feat::kPrevEldDa, kNumDialogueActs, "prev-eld-da", true));
  return d;
}

std::string targets_problem(const TargetLabels& t) {
  if (t.eldAction < 0 || t.eldAction >= kNumEldActions) return "action index out of range";
  if (t.eldDa < 0 || t.eldDa >= kNumDialogueActs) return "DA index out of range";
  if (t.nextBelief < 0 || t.nextBelief >= kNumBeliefStates) return "belief index out of range";
  if ((t.eldAction == 0) != (t.eldDa == 0)) {
    return "no-action and no-utterance must occur together";
  }
  return {};
}

TargetLabels encode_targets(const std::optional<Move>& eldMove, const BeliefState& nextBelief) {
  TargetLabels t;
  t.nextBelief = belief_index(nextBelief);
  if (!eldMove) return t;  // HEL keeps the floor
  if (eldMove->actor != Actor::Eld || !eldMove->eldAction) {
    throw std::invalid_argument("encode_targets expects an ELD move");
  }
  t.eldAction = static_cast<int>(*eldMove->eldAction);
  t.eldDa = static_cast<int>(eldMove->da);
  if (const std::string why = targets_problem(t); !why.empty()) {
    throw std::invalid_argument("invalid target labels: " + why);
  }
  return t;
}

std::string render_feature_schema() {
  std::ostringstream out;
  out << "prev-actor:" << feat::kPrevActor << ":2\n"
      << "uttered-ot:" << feat::kUtteredOT << ":1\n"
      << "uttered-l:" << feat::kUtteredL << ":1\n"
      << "belief:" << feat::kBelief << ":" << kNumBeliefStates << "\n"
      << "pointing:" << feat::kPointing << ":5\n"
      << "ho:" << feat::kHo << ":10\n"
      << "hel-action:" << feat::kHelAction << ":" << kNumHelActions << "\n"
      << "hel-da:" << feat::kHelDa << ":" << kNumDialogueActs << "\n"
      << "prev-eld-action:" << feat::kPrevEldAction << ":" << kNumEldActions << "\n"
      << "prev-eld-da:" << feat::kPrevEldDa << ":" << kNumDialogueActs << "\n"
      << "total:" << kInputSize << "\n";
  return out.str();
}

std::uint64_t feature_schema_hash() {
  static const std::uint64_t h = fnv1a64(render_feature_schema());
  return h;
}

}  // namespace musim
