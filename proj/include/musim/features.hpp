#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "musim/domain.hpp"

namespace musim {

// Everything the classifier sees when predicting the ELD's next move:
// who moved last, which entities ELD has uttered so far in the trial,
// ELD's belief before HEL's current move, HEL's current move (action, DA,
// physical events) and ELD's most recent action/DA. The goal is carried
// for resolving event match statuses only; its labels are never encoded.
struct InteractionContext {
  std::optional<Actor> prevActor;  // empty = trial not started yet
  bool utteredOT = false;
  bool utteredL = false;
  BeliefState prevBelief;
  std::optional<PointingEvent> helPointing;
  std::optional<HapticOstensiveEvent> helHo;
  HelAction helAction = HelAction::NoAction;
  DialogueAct helDa = DialogueAct::NoUtterance;
  EldAction prevEldAction = EldAction::NoAction;
  DialogueAct prevEldDa = DialogueAct::NoUtterance;
  WorldGoal goal;
};

// Returns an empty string when the context is well formed, otherwise the
// violated rule.
std::string context_problem(const InteractionContext& ctx);
inline bool context_valid(const InteractionContext& ctx) { return context_problem(ctx).empty(); }

struct InvalidContext : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MatchUndecidable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedVector : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixed feature layout. Block order and widths are the normative schema;
// they are hashed into corpus and model files for versioning.
namespace feat {
inline constexpr int kPrevActor = 0;      // 2
inline constexpr int kUtteredOT = 2;      // 1
inline constexpr int kUtteredL = 3;       // 1
inline constexpr int kBelief = 4;         // 13
inline constexpr int kPointing = 17;      // 5
inline constexpr int kHo = 22;            // 10
inline constexpr int kHelAction = 32;     // 9
inline constexpr int kHelDa = 41;         // 14
inline constexpr int kPrevEldAction = 55; // 7
inline constexpr int kPrevEldDa = 62;     // 14
}  // namespace feat

inline constexpr int kInputSize = 76;

struct EncodedInput {
  std::array<double, kInputSize> values{};
};

enum class MatchStatus { Correct, Wrong, RightTypeWrongInstance };

// Match status of a concrete physical-event target against the trial goal.
// Throws MatchUndecidable when the reference does not name an instance.
MatchStatus match_instance(const TargetRef& target, const WorldGoal& goal);

std::array<double, 2> encode_prev_actor(std::optional<Actor> prevActor);
std::array<double, 5> encode_pointing(const std::optional<PointingEvent>& event,
                                      const WorldGoal& goal);
std::array<double, 10> encode_ho(const std::optional<HapticOstensiveEvent>& event,
                                 const WorldGoal& goal);

EncodedInput encode_input(const InteractionContext& ctx);

// Categorical summary recovered from a feature vector. Goal and target
// identities are not encoded, so only kinds and match statuses come back.
struct DecodedInput {
  std::optional<Actor> prevActor;
  bool utteredOT = false;
  bool utteredL = false;
  int beliefIndex = 0;
  bool pointingPresent = false;
  TargetKind pointingKind = TargetKind::Location;
  MatchStatus pointingMatch = MatchStatus::Correct;
  bool hoPresent = false;
  TargetKind hoKind = TargetKind::Location;
  MatchStatus hoMatch = MatchStatus::Correct;
  HoType hoType = HoType::OpenLocation;
  HelAction helAction = HelAction::NoAction;
  DialogueAct helDa = DialogueAct::NoUtterance;
  EldAction prevEldAction = EldAction::NoAction;
  DialogueAct prevEldDa = DialogueAct::NoUtterance;
};

// Validates every block invariant (length, binary entries, one-hot sums)
// and throws MalformedVector naming the offending block otherwise.
DecodedInput decode_input(std::span<const double> v);

// Supervision for one example: the ELD action/DA indexes of the response
// move (0/0 when HEL keeps the floor) and the index of the belief state
// after HEL's move.
struct TargetLabels {
  int eldAction = 0;
  int eldDa = 0;
  int nextBelief = 0;
  bool operator==(const TargetLabels&) const = default;
};

inline constexpr int kActionHead = kNumEldActions;    // 7
inline constexpr int kDaHead = kNumDialogueActs;      // 14
inline constexpr int kStateHead = kNumBeliefStates;   // 13
inline constexpr int kOutputSize = kActionHead + kDaHead + kStateHead;  // 34

std::string targets_problem(const TargetLabels& t);
inline bool targets_valid(const TargetLabels& t) { return targets_problem(t).empty(); }

TargetLabels encode_targets(const std::optional<Move>& eldMove, const BeliefState& nextBelief);

std::uint64_t feature_schema_hash();
std::string render_feature_schema();

}  // namespace musim
