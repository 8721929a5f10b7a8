#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "musim/domain.hpp"
#include "musim/features.hpp"

namespace musim {

// Finest dialogue phase; determines the set of permissible ELD responses.
// SpecifyOT serves both the object-type and the object determination
// phases (the rows are identical).
enum class PrimitiveSubtask {
  EstablishOT = 0,
  VerifyOT,
  SpecifyOT,
  EstablishL,
  VerifyL,
  SpecifyL,
  VerifyO,
  FinishL,
};
inline constexpr int kNumSubtasks = 8;
const char* to_string(PrimitiveSubtask s);

// (a, b, c) convention: a and b say whether the move itself utters an
// object type / a location, c is the move's DA; no DA means no move.
struct OracleTuple {
  int uttersOT = 0;
  int uttersL = 0;
  std::optional<DialogueAct> da;
  bool operator==(const OracleTuple&) const = default;
};

inline constexpr int kAny = 2;  // wildcard for the a/b pattern positions

struct TuplePattern {
  int a = 0;  // 0, 1 or kAny
  int b = 0;
  std::optional<DialogueAct> da;  // empty = no-move
};

bool pattern_matches(const TuplePattern& p, const OracleTuple& t);

struct TableRow {
  PrimitiveSubtask subtask;
  std::vector<TuplePattern> inputs;
  std::vector<TuplePattern> outputs;
};

// The permissible input/output tuples per primitive subtask.
std::span<const TableRow> transition_table();

// Row whose input set covers (subtask, input tuple); nullptr if none.
const TableRow* find_row(PrimitiveSubtask subtask, const OracleTuple& input);

bool output_permitted(const TableRow& row, const OracleTuple& output);

struct UnclassifiableContext : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GroundRuleViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic map from a context to the phase it belongs to, driven by
// HEL's action/DA and the uttered flags; documented in docs/oracle-tables.md.
PrimitiveSubtask classify_subtask(const InteractionContext& ctx);

// The HEL move's own utterance bits derived from its action category (a
// verification names the entity it verifies, a location-specifying query
// names a location) plus its DA; documented alongside the tables.
OracleTuple input_tuple(const InteractionContext& ctx);

// Tuple of an ELD response; no move maps to the no-move tuple.
OracleTuple output_tuple(const std::optional<Move>& move);

struct OracleResponse {
  std::optional<Move> move;  // empty = ELD passes, HEL keeps the floor
  BeliefState nextBelief;
};

// Rule-based ELD policy. Checks the ground rules (throws
// GroundRuleViolation outside the valid-input set), answers contexts that
// no phase covers with a pass, and otherwise produces the first member of
// the documented canonical response ordering for the phase. The next
// belief comes from belief_update applied to the context's HEL move.
OracleResponse oracle_respond(const InteractionContext& ctx);

// Empty when ctx satisfies the six ground rules, otherwise the violation.
std::string ground_rule_problem(const InteractionContext& ctx);

// Every meaningful mid-dialogue input: the product of the 13 belief
// states, uttered flags, previous actor and the HEL move families,
// filtered by the ground rules. Order is deterministic. The trial-opening
// context is not part of the product (no table covers it).
std::vector<InteractionContext> enumerate_valid_inputs();

// The goal all enumerated contexts are expressed against.
WorldGoal enumeration_goal();

// Equivalence classes of (DA, action) pairs that convey the same message.
struct Intent {
  enum Kind { Inform, Correct, Confirm, Deny, Pass, Other } kind = Pass;
  DialogueAct da = DialogueAct::NoUtterance;  // meaningful for Other only

  bool operator==(const Intent&) const = default;
};

Intent intent_class(DialogueAct da, std::optional<EldAction> action);
Intent intent_of(const std::optional<Move>& move);
const char* to_string(Intent::Kind k);

// Intents an output pattern can realize (Reply-n allows both a denial and
// a correction depending on the accompanying action).
std::vector<Intent> pattern_intents(const TuplePattern& p);

// Human-readable dump of the decision table, the tuple maps and the
// transition tables; docs/oracle-tables.md is this string verbatim.
std::string render_oracle_tables();

}  // namespace musim
