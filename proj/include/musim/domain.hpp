#pragma once

#include <array>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace musim {

enum class Actor { Eld, Hel };

// Utterance intent labels shared by both participants. Index order is part
// of the file-format contract and must never change.
enum class DialogueAct {
  NoUtterance = 0,
  Instruct,
  Acknowledge,
  QueryW,
  QueryYn,
  ReplyW,
  ReplyY,
  ReplyN,
  Check,
  Explain,
  Align,
  StateY,
  StateN,
  State,
};
inline constexpr int kNumDialogueActs = 14;

enum class EldAction {
  NoAction = 0,
  GiveOT,
  GiveL,
  GiveOTL,
  Acknowledge,
  Yes,
  No,
};
inline constexpr int kNumEldActions = 7;

enum class HelAction {
  NoAction = 0,
  RequestOT,
  RequestL,
  VerifyOT,
  VerifyL,
  VerifyO,
  Acknowledge,
  Yes,
  No,
};
inline constexpr int kNumHelActions = 9;

const char* to_string(Actor a);
const char* to_string(DialogueAct da);
const char* to_string(EldAction a);
const char* to_string(HelAction a);

// ELD's belief about HEL's knowledge of the object type, the location and
// the specific object. Per component: 0 = HEL does not know it, 1 = HEL
// knows it, 2 = HEL has the wrong one in mind. Only 13 of the 27 raw
// triples are meaningful; see kBeliefStates for the canonical index order.
struct BeliefState {
  int ot = 0;
  int loc = 0;
  int obj = 0;
  auto operator<=>(const BeliefState&) const = default;
};

inline constexpr int kNumBeliefStates = 13;
inline constexpr std::array<BeliefState, kNumBeliefStates> kBeliefStates = {{
    {0, 0, 0},
    {0, 1, 0},
    {0, 2, 0},
    {1, 0, 0},
    {1, 0, 1},
    {1, 0, 2},
    {1, 1, 0},
    {1, 1, 1},
    {1, 1, 2},
    {1, 2, 0},
    {2, 0, 0},
    {2, 1, 0},
    {2, 2, 0},
}};

struct InvalidBelief : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_valid_belief(int ot, int loc, int obj);
// Returns the state iff the triple is among the 13, otherwise throws
// InvalidBelief naming the violated rule.
BeliefState validate_belief(int ot, int loc, int obj);
int belief_index(const BeliefState& b);
BeliefState belief_from_index(int index);
std::string to_string(const BeliefState& b);

enum class TargetKind { Location, Object };

// Reference to an entity of the scene. Object references always carry an
// object-type label; an object reference with an empty id names the type
// only ("a bowl"), a non-empty id names a concrete instance.
struct TargetRef {
  TargetKind kind = TargetKind::Object;
  std::string id;
  std::string objectType;

  static TargetRef location(std::string id) {
    return {TargetKind::Location, std::move(id), {}};
  }
  static TargetRef object(std::string id, std::string type) {
    return {TargetKind::Object, std::move(id), std::move(type)};
  }
  static TargetRef object_type(std::string type) {
    return {TargetKind::Object, {}, std::move(type)};
  }
  bool operator==(const TargetRef&) const = default;
};

struct PointingEvent {
  TargetRef target;
  bool operator==(const PointingEvent&) const = default;
};

enum class HoType {
  OpenLocation = 0,
  CloseLocation,
  Touch,
  TakeOutObject,
  HoldObject,
};
inline constexpr int kNumHoTypes = 5;
const char* to_string(HoType t);

struct HapticOstensiveEvent {
  TargetRef target;
  HoType type = HoType::Touch;
  bool operator==(const HapticOstensiveEvent&) const = default;
};

// Open/Close act on locations, TakeOut/Hold on objects, Touch on either.
bool ho_event_coherent(const HapticOstensiveEvent& ev);

// Ground truth of one Find trial.
struct WorldGoal {
  std::string objectType;
  std::string location;
  TargetRef object;  // kind Object, objectType matching objectType above

  bool operator==(const WorldGoal&) const = default;
};

bool goal_valid(const WorldGoal& g);

// One participant turn. uttersOT/uttersL say whether this very move names
// an object type / location and may only be set for utterances.
struct Move {
  Actor actor = Actor::Eld;
  DialogueAct da = DialogueAct::NoUtterance;
  std::optional<EldAction> eldAction;
  std::optional<HelAction> helAction;
  std::optional<PointingEvent> pointing;
  std::optional<HapticOstensiveEvent> ho;
  bool uttersOT = false;
  bool uttersL = false;
  std::vector<TargetRef> mentioned;
};

// Checks the structural invariants (actor/action coupling, utterance flags,
// H-O coherence). Returns an empty string when valid, otherwise the reason.
std::string move_problem(const Move& m);
inline bool move_valid(const Move& m) { return move_problem(m).empty(); }

struct UtteredFlags {
  bool ot = false;
  bool l = false;
};

// Deterministic belief transition applied after every HEL move.
//
// Per component and in this order:
//   1. explicit evidence from named / pointed / acted-on targets
//      (correct -> 1, wrong -> 2; the worst verdict wins when a move
//      carries several references to the same component),
//   2. a renewed request for the entity resets it to 0,
//   3. an acknowledging move (Acknowledge/Yes action, Acknowledge/Reply-y
//      DA) confirms every entity ELD has already uttered (0 or 2 -> 1).
// A component cannot leave 0 before ELD has uttered the corresponding
// entity, and the object component is cleared whenever the resulting
// object-type belief is not 1 or the location belief is 2, which keeps the
// result inside the 13 valid states.
BeliefState belief_update(const BeliefState& current, const Move& helMove,
                          const WorldGoal& goal, UtteredFlags utteredSoFar);

}  // namespace musim
