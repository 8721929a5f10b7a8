#include "musim/oracle.hpp"

#include <array>
#include <sstream>

namespace musim {

const char* to_string(PrimitiveSubtask s) {
  static const char* names[kNumSubtasks] = {
      "establish-ot", "verify-ot", "specify-ot", "establish-l",
      "verify-l",     "specify-l", "verify-o",   "finish-l"};
  return names[static_cast<int>(s)];
}

bool pattern_matches(const TuplePattern& p, const OracleTuple& t) {
  if (p.a != kAny && p.a != t.uttersOT) return false;
  if (p.b != kAny && p.b != t.uttersL) return false;
  return p.da == t.da;
}

namespace {

using DA = DialogueAct;
constexpr std::optional<DA> kNoMove = std::nullopt;

const std::array<TableRow, 8>& table() {
  static const std::array<TableRow, 8> rows = {{
      {PrimitiveSubtask::EstablishOT,
       {{0, 0, DA::Instruct}, {0, 0, DA::QueryW}},
       {{1, kAny, DA::Instruct}, {1, kAny, DA::ReplyW}}},
      {PrimitiveSubtask::VerifyOT,
       {{1, 0, DA::Check}, {1, 0, DA::QueryYn}},
       {{kAny, 0, DA::ReplyY}, {kAny, 0, DA::ReplyN}, {1, 0, DA::Instruct}, {1, 0, DA::ReplyW}}},
      {PrimitiveSubtask::SpecifyOT,
       {{kAny, 0, DA::QueryW}},
       {{kAny, 0, DA::Instruct}, {kAny, 0, DA::ReplyW}}},
      {PrimitiveSubtask::EstablishL,
       {{kAny, 0, DA::Instruct}, {kAny, 0, DA::QueryW}},
       {{kAny, kAny, DA::Instruct}, {kAny, kAny, DA::ReplyW}}},
      {PrimitiveSubtask::VerifyL,
       {{0, 0, kNoMove}, {0, kAny, DA::Check}, {0, kAny, DA::QueryYn}},
       {{0, kAny, DA::ReplyY},
        {0, kAny, DA::ReplyN},
        {kAny, kAny, kNoMove},
        {kAny, kAny, DA::ReplyW},
        {kAny, kAny, DA::Instruct}}},
      {PrimitiveSubtask::SpecifyL,
       {{kAny, 1, DA::QueryW}},
       {{kAny, kAny, DA::Instruct}, {kAny, kAny, DA::ReplyW}}},
      {PrimitiveSubtask::VerifyO,
       {{kAny, 0, kNoMove}, {kAny, 0, DA::Check}, {kAny, 0, DA::QueryYn}, {kAny, kAny, DA::State}},
       {{kAny, 0, DA::ReplyY}, {kAny, 0, DA::ReplyN}, {kAny, 0, DA::ReplyW}, {kAny, 0, DA::Instruct}}},
      {PrimitiveSubtask::FinishL,
       {{kAny, kAny, DA::StateY}, {kAny, kAny, DA::State}, {kAny, kAny, DA::StateN}},
       {{0, 0, DA::Acknowledge}}},
  }};
  return rows;
}

}  // namespace

std::span<const TableRow> transition_table() { return table(); }

const TableRow* find_row(PrimitiveSubtask subtask, const OracleTuple& input) {
  for (const TableRow& row : table()) {
    if (row.subtask != subtask) continue;
    for (const TuplePattern& p : row.inputs) {
      if (pattern_matches(p, input)) return &row;
    }
  }
  return nullptr;
}

bool output_permitted(const TableRow& row, const OracleTuple& output) {
  for (const TuplePattern& p : row.outputs) {
    if (pattern_matches(p, output)) return true;
  }
  return false;
}

PrimitiveSubtask classify_subtask(const InteractionContext& ctx) {
  if (!ctx.prevActor && ctx.helAction == HelAction::NoAction &&
      ctx.helDa == DialogueAct::NoUtterance) {
    return PrimitiveSubtask::EstablishOT;  // trial opening, ELD initiates
  }
  switch (ctx.helAction) {
    case HelAction::VerifyOT: return PrimitiveSubtask::VerifyOT;
    case HelAction::VerifyL: return PrimitiveSubtask::VerifyL;
    case HelAction::VerifyO: return PrimitiveSubtask::VerifyO;
    case HelAction::RequestOT:
      return ctx.utteredOT ? PrimitiveSubtask::SpecifyOT : PrimitiveSubtask::EstablishOT;
    case HelAction::RequestL:
      return ctx.utteredL ? PrimitiveSubtask::SpecifyL : PrimitiveSubtask::EstablishL;
    case HelAction::NoAction:
      if (ctx.helDa == DialogueAct::StateY || ctx.helDa == DialogueAct::StateN ||
          ctx.helDa == DialogueAct::State) {
        return PrimitiveSubtask::FinishL;
      }
      break;
    default:
      break;
  }
  throw UnclassifiableContext(std::string("no phase covers HEL move ") +
                              to_string(ctx.helAction) + "/" + to_string(ctx.helDa));
}

OracleTuple input_tuple(const InteractionContext& ctx) {
  OracleTuple t;
  const bool utters = ctx.helDa != DialogueAct::NoUtterance;
  t.uttersOT = utters && ctx.helAction == HelAction::VerifyOT;
  t.uttersL = utters && (ctx.helAction == HelAction::VerifyL ||
                         (ctx.helAction == HelAction::RequestL && ctx.utteredL));
  if (utters) t.da = ctx.helDa;
  return t;
}

OracleTuple output_tuple(const std::optional<Move>& move) {
  OracleTuple t;
  if (!move) return t;
  t.uttersOT = move->uttersOT ? 1 : 0;
  t.uttersL = move->uttersL ? 1 : 0;
  if (move->da != DialogueAct::NoUtterance) t.da = move->da;
  return t;
}

std::string ground_rule_problem(const InteractionContext& ctx) {
  if (const std::string why = context_problem(ctx); !why.empty()) return why;
  if (ctx.prevBelief.ot != 0 && !ctx.utteredOT) {
    return "object-type belief left 0 before ELD uttered the object type";
  }
  if (ctx.prevBelief.loc != 0 && !ctx.utteredL) {
    return "location belief left 0 before ELD uttered the location";
  }
  if (ctx.helAction == HelAction::VerifyOT && !ctx.utteredOT) {
    return "HEL cannot verify the object type before ELD announces it";
  }
  if (ctx.helAction == HelAction::VerifyL && !ctx.utteredL) {
    return "HEL cannot verify the location before ELD announces it";
  }
  if (ctx.helAction == HelAction::VerifyO && !ctx.utteredOT) {
    return "HEL cannot verify an object before ELD announces the object type";
  }
  const bool verifying = ctx.helAction == HelAction::VerifyOT ||
                         ctx.helAction == HelAction::VerifyL ||
                         ctx.helAction == HelAction::VerifyO;
  if ((ctx.helPointing || ctx.helHo) && !verifying) {
    return "pointing and H-O actions only accompany verifications";
  }
  return {};
}

namespace {

// worst event verdict for one belief component; empty when the move
// carries no decidable evidence for it
std::optional<bool> entity_verdict(const InteractionContext& ctx, int component) {
  std::optional<bool> ok;
  auto feed = [&](const TargetRef& target) {
    const MatchStatus match = match_instance(target, ctx.goal);
    std::optional<bool> verdict;
    if (component == 0 && target.kind == TargetKind::Object) {
      verdict = match != MatchStatus::Wrong;  // right type even for a wrong instance
    } else if (component == 1 && target.kind == TargetKind::Location) {
      verdict = match == MatchStatus::Correct;
    } else if (component == 2 && target.kind == TargetKind::Object) {
      verdict = match == MatchStatus::Correct;
    }
    if (verdict) ok = ok ? (*ok && *verdict) : *verdict;
  };
  if (ctx.helPointing) feed(ctx.helPointing->target);
  if (ctx.helHo) feed(ctx.helHo->target);
  return ok;
}

Move eld_move(DialogueAct da, EldAction action, bool uttersOT, bool uttersL,
              std::vector<TargetRef> mentioned) {
  Move m;
  m.actor = Actor::Eld;
  m.da = da;
  m.eldAction = action;
  m.uttersOT = uttersOT;
  m.uttersL = uttersL;
  m.mentioned = std::move(mentioned);
  return m;
}

Move reconstructed_hel_move(const InteractionContext& ctx) {
  Move m;
  m.actor = Actor::Hel;
  m.da = ctx.helDa;
  m.helAction = ctx.helAction;
  m.pointing = ctx.helPointing;
  m.ho = ctx.helHo;
  return m;
}

}  // namespace

OracleResponse oracle_respond(const InteractionContext& ctx) {
  if (const std::string why = ground_rule_problem(ctx); !why.empty()) {
    throw GroundRuleViolation(why);
  }
  const BeliefState nextBelief =
      belief_update(ctx.prevBelief, reconstructed_hel_move(ctx), ctx.goal,
                    UtteredFlags{ctx.utteredOT, ctx.utteredL});

  PrimitiveSubtask subtask;
  try {
    subtask = classify_subtask(ctx);
  } catch (const UnclassifiableContext&) {
    return {std::nullopt, nextBelief};  // e.g. HEL acknowledgment mid-dialogue
  }

  const WorldGoal& goal = ctx.goal;
  const auto typeMention = std::vector<TargetRef>{TargetRef::object_type(goal.objectType)};
  const auto objectMention = std::vector<TargetRef>{goal.object};
  const auto locationMention = std::vector<TargetRef>{TargetRef::location(goal.location)};
  const DialogueAct answerW =
      ctx.helDa == DialogueAct::QueryW ? DialogueAct::ReplyW : DialogueAct::Instruct;

  std::optional<Move> move;
  switch (subtask) {
    case PrimitiveSubtask::EstablishOT:
      move = eld_move(answerW, EldAction::GiveOT, true, false, typeMention);
      break;
    case PrimitiveSubtask::SpecifyOT:
      move = eld_move(answerW, EldAction::GiveOT, true, false, objectMention);
      break;
    case PrimitiveSubtask::EstablishL:
    case PrimitiveSubtask::SpecifyL:
      move = eld_move(answerW, EldAction::GiveL, false, true, locationMention);
      break;
    case PrimitiveSubtask::VerifyOT: {
      const auto verdict = entity_verdict(ctx, 0);
      if (verdict.value_or(true)) {
        move = eld_move(DialogueAct::ReplyY, EldAction::Yes, false, false, {});
      } else {
        move = eld_move(DialogueAct::Instruct, EldAction::GiveOT, true, false, typeMention);
      }
      break;
    }
    case PrimitiveSubtask::VerifyL: {
      const auto verdict = entity_verdict(ctx, 1);
      if (!verdict.value_or(true)) {
        move = eld_move(DialogueAct::Instruct, EldAction::GiveL, false, true, locationMention);
      } else if (ctx.helDa == DialogueAct::NoUtterance) {
        move.reset();  // silent confirmation of a correct location needs no reply
      } else {
        move = eld_move(DialogueAct::ReplyY, EldAction::Yes, false, false, {});
      }
      break;
    }
    case PrimitiveSubtask::VerifyO: {
      const auto verdict = entity_verdict(ctx, 2);
      if (verdict.value_or(true)) {
        move = eld_move(DialogueAct::ReplyY, EldAction::Yes, false, false, {});
      } else {
        move = eld_move(DialogueAct::Instruct, EldAction::GiveOT, true, false, objectMention);
      }
      break;
    }
    case PrimitiveSubtask::FinishL:
      move = eld_move(DialogueAct::Acknowledge, EldAction::Acknowledge, false, false, {});
      break;
  }
  return {std::move(move), nextBelief};
}

WorldGoal enumeration_goal() {
  WorldGoal g;
  g.objectType = "bowl";
  g.location = "cabinet";
  g.object = TargetRef::object("bowl-small", "bowl");
  return g;
}

namespace {

enum class EvStatus { Correct, Wrong, Rtwi };

TargetRef event_object(const WorldGoal& goal, EvStatus s) {
  switch (s) {
    case EvStatus::Correct: return goal.object;
    case EvStatus::Rtwi: return TargetRef::object("bowl-large", goal.objectType);
    case EvStatus::Wrong: return TargetRef::object("pot-red", "pot");
  }
  return goal.object;
}

TargetRef event_location(const WorldGoal& goal, EvStatus s) {
  return TargetRef::location(s == EvStatus::Correct ? goal.location : "drawer");
}

}  // namespace

std::vector<InteractionContext> enumerate_valid_inputs() {
  std::vector<InteractionContext> out;
  const WorldGoal goal = enumeration_goal();

  constexpr std::array<EvStatus, 3> kAllStatuses = {EvStatus::Correct, EvStatus::Wrong,
                                                    EvStatus::Rtwi};
  constexpr std::array<EvStatus, 2> kLocStatuses = {EvStatus::Correct, EvStatus::Wrong};

  for (int beliefIdx = 0; beliefIdx < kNumBeliefStates; ++beliefIdx) {
    const BeliefState belief = kBeliefStates[static_cast<std::size_t>(beliefIdx)];
    for (int uo = 0; uo <= 1; ++uo) {
      if (belief.ot != 0 && uo == 0) continue;
      for (int ul = 0; ul <= 1; ++ul) {
        if (belief.loc != 0 && ul == 0) continue;
        for (Actor prevActor : {Actor::Eld, Actor::Hel}) {
          InteractionContext base;
          base.prevActor = prevActor;
          base.utteredOT = uo == 1;
          base.utteredL = ul == 1;
          base.prevBelief = belief;
          base.goal = goal;
          if (prevActor == Actor::Eld) {
            if (uo && ul) {
              base.prevEldAction = EldAction::GiveOTL;
              base.prevEldDa = DialogueAct::Instruct;
            } else if (uo) {
              base.prevEldAction = EldAction::GiveOT;
              base.prevEldDa = DialogueAct::Instruct;
            } else if (ul) {
              base.prevEldAction = EldAction::GiveL;
              base.prevEldDa = DialogueAct::Instruct;
            } else {
              base.prevEldAction = EldAction::Acknowledge;
              base.prevEldDa = DialogueAct::Acknowledge;
            }
          }

          auto emit = [&](HelAction action, DialogueAct da,
                          std::optional<PointingEvent> pointing,
                          std::optional<HapticOstensiveEvent> ho) {
            InteractionContext ctx = base;
            ctx.helAction = action;
            ctx.helDa = da;
            ctx.helPointing = std::move(pointing);
            ctx.helHo = std::move(ho);
            out.push_back(std::move(ctx));
          };

          // entity requests carry no physical events; the directive form
          // only opens an establishment phase
          for (DialogueAct da : {DialogueAct::QueryW, DialogueAct::Instruct}) {
            if (da == DialogueAct::Instruct && uo) continue;
            emit(HelAction::RequestOT, da, std::nullopt, std::nullopt);
          }
          for (DialogueAct da : {DialogueAct::QueryW, DialogueAct::Instruct}) {
            if (da == DialogueAct::Instruct && ul) continue;
            emit(HelAction::RequestL, da, std::nullopt, std::nullopt);
          }

          // object-directed verifications (object type / specific object)
          auto objectEvidence = [&](HelAction action, std::span<const DialogueAct> das) {
            for (DialogueAct da : das) {
              for (int p = -1; p < 3; ++p) {
                std::optional<PointingEvent> pointing;
                if (p >= 0) {
                  pointing = PointingEvent{event_object(goal, kAllStatuses[static_cast<std::size_t>(p)])};
                }
                for (int ht = -1; ht < 3; ++ht) {
                  if (ht < 0) {
                    if (da == DialogueAct::NoUtterance && !pointing) continue;
                    emit(action, da, pointing, std::nullopt);
                    continue;
                  }
                  const HoType type = std::array{HoType::Touch, HoType::TakeOutObject,
                                                 HoType::HoldObject}[static_cast<std::size_t>(ht)];
                  for (EvStatus s : kAllStatuses) {
                    emit(action, da, pointing,
                         HapticOstensiveEvent{event_object(goal, s), type});
                  }
                }
              }
            }
          };
          if (uo) {
            constexpr std::array verifyOtDas = {DialogueAct::Check, DialogueAct::QueryYn};
            objectEvidence(HelAction::VerifyOT, verifyOtDas);
            constexpr std::array verifyODas = {DialogueAct::Check, DialogueAct::QueryYn,
                                               DialogueAct::State, DialogueAct::NoUtterance};
            objectEvidence(HelAction::VerifyO, verifyODas);
          }

          // location verifications
          if (ul) {
            constexpr std::array verifyLDas = {DialogueAct::Check, DialogueAct::QueryYn,
                                               DialogueAct::NoUtterance};
            for (DialogueAct da : verifyLDas) {
              for (int p = -1; p < 2; ++p) {
                std::optional<PointingEvent> pointing;
                if (p >= 0) {
                  pointing = PointingEvent{event_location(goal, kLocStatuses[static_cast<std::size_t>(p)])};
                }
                for (int ht = -1; ht < 3; ++ht) {
                  if (ht < 0) {
                    if (da == DialogueAct::NoUtterance && !pointing) continue;
                    emit(HelAction::VerifyL, da, pointing, std::nullopt);
                    continue;
                  }
                  const HoType type = std::array{HoType::OpenLocation, HoType::CloseLocation,
                                                 HoType::Touch}[static_cast<std::size_t>(ht)];
                  for (EvStatus s : kLocStatuses) {
                    emit(HelAction::VerifyL, da, pointing,
                         HapticOstensiveEvent{event_location(goal, s), type});
                  }
                }
              }
            }
          }

          // HEL announces the outcome of a search
          for (DialogueAct da : {DialogueAct::StateY, DialogueAct::StateN, DialogueAct::State}) {
            emit(HelAction::NoAction, da, std::nullopt, std::nullopt);
          }
        }
      }
    }
  }
  return out;
}

Intent intent_class(DialogueAct da, std::optional<EldAction> action) {
  const EldAction a = action.value_or(EldAction::NoAction);
  const bool gives = a == EldAction::GiveOT || a == EldAction::GiveL || a == EldAction::GiveOTL;
  if (a == EldAction::NoAction && da == DialogueAct::NoUtterance) return {Intent::Pass, {}};
  if ((da == DialogueAct::Instruct || da == DialogueAct::ReplyW) && gives) {
    return {Intent::Inform, {}};
  }
  if (da == DialogueAct::ReplyN && gives) return {Intent::Correct, {}};
  if ((da == DialogueAct::ReplyY || da == DialogueAct::StateY || da == DialogueAct::Acknowledge) &&
      (a == EldAction::Yes || a == EldAction::Acknowledge)) {
    return {Intent::Confirm, {}};
  }
  if ((da == DialogueAct::StateN || da == DialogueAct::ReplyN) && a == EldAction::No) {
    return {Intent::Deny, {}};
  }
  return {Intent::Other, da};
}

Intent intent_of(const std::optional<Move>& move) {
  if (!move) return {Intent::Pass, {}};
  return intent_class(move->da, move->eldAction);
}

const char* to_string(Intent::Kind k) {
  switch (k) {
    case Intent::Inform: return "inform";
    case Intent::Correct: return "correct";
    case Intent::Confirm: return "confirm";
    case Intent::Deny: return "deny";
    case Intent::Pass: return "pass";
    case Intent::Other: return "other";
  }
  return "?";
}

std::vector<Intent> pattern_intents(const TuplePattern& p) {
  if (!p.da) return {{Intent::Pass, {}}};
  switch (*p.da) {
    case DialogueAct::Instruct:
    case DialogueAct::ReplyW:
      return {{Intent::Inform, {}}};
    case DialogueAct::ReplyY:
    case DialogueAct::StateY:
    case DialogueAct::Acknowledge:
      return {{Intent::Confirm, {}}};
    case DialogueAct::ReplyN:
      return {{Intent::Deny, {}}, {Intent::Correct, {}}};
    case DialogueAct::StateN:
      return {{Intent::Deny, {}}};
    default:
      return {{Intent::Other, *p.da}};
  }
}

namespace {

std::string tuple_pattern_str(const TuplePattern& p) {
  auto flag = [](int v) { return v == kAny ? std::string("*") : std::to_string(v); };
  return "(" + flag(p.a) + "," + flag(p.b) + "," + (p.da ? to_string(*p.da) : "-") + ")";
}

std::string pattern_list(const std::vector<TuplePattern>& ps) {
  std::string s;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) s += " / ";
    s += tuple_pattern_str(ps[i]);
  }
  return s;
}

}  // namespace

std::string render_oracle_tables() {
  std::ostringstream out;
  out << "# Oracle decision and transition tables\n"
      << "\n"
      << "This file is generated by the `docs` command; edit the code, not the file.\n"
      << "\n"
      << "## Phase classification\n"
      << "\n"
      << "First matching rule wins.\n"
      << "\n"
      << "| # | condition | phase |\n"
      << "|---|-----------|-------|\n"
      << "| 1 | trial not started, no HEL move yet | establish-ot (opening) |\n"
      << "| 2 | HEL action verify-ot | verify-ot |\n"
      << "| 3 | HEL action verify-l | verify-l |\n"
      << "| 4 | HEL action verify-o | verify-o |\n"
      << "| 5 | HEL action request-ot, object type not yet uttered | establish-ot |\n"
      << "| 6 | HEL action request-ot, object type already uttered | specify-ot |\n"
      << "| 7 | HEL action request-l, location not yet uttered | establish-l |\n"
      << "| 8 | HEL action request-l, location already uttered | specify-l |\n"
      << "| 9 | HEL action no-action, DA state-y/state-n/state | finish-l |\n"
      << "\n"
      << "Anything else (acknowledgments, replies, explanations by HEL) is\n"
      << "answered with a pass and an unchanged belief.\n"
      << "\n"
      << "## Tuple convention\n"
      << "\n"
      << "A move maps to (a,b,c): a = the move itself utters an object type,\n"
      << "b = it utters a location, c = its DA (\"-\" when there is no move).\n"
      << "For HEL inputs: a = 1 exactly for spoken object-type verifications;\n"
      << "b = 1 for spoken location verifications and for location-specifying\n"
      << "queries (request-l after the location was uttered). For ELD outputs\n"
      << "the flags follow the response action (give-ot/give-l/give-ot-l).\n"
      << "\n"
      << "## Transition tables\n"
      << "\n"
      << "| phase | inputs | permissible outputs |\n"
      << "|-------|--------|---------------------|\n";
  for (const TableRow& row : transition_table()) {
    out << "| " << to_string(row.subtask) << " | " << pattern_list(row.inputs) << " | "
        << pattern_list(row.outputs) << " |\n";
  }
  out << "\n"
      << "specify-ot serves both the object-type and the object determination\n"
      << "phases; its row is listed once.\n"
      << "\n"
      << "## Canonical responses\n"
      << "\n"
      << "Where a row permits several outputs the policy always picks the\n"
      << "same one:\n"
      << "\n"
      << "| phase | situation | response |\n"
      << "|-------|-----------|----------|\n"
      << "| establish-ot | opening or directive request | instruct + give-ot |\n"
      << "| establish-ot | query-w request | reply-w + give-ot |\n"
      << "| specify-ot | query-w request | reply-w + give-ot (names the instance) |\n"
      << "| establish-l / specify-l | query-w request | reply-w + give-l |\n"
      << "| establish-l | directive request | instruct + give-l |\n"
      << "| verify-ot | evidence correct or absent | reply-y + yes |\n"
      << "| verify-ot | evidence wrong | instruct + give-ot |\n"
      << "| verify-l | evidence wrong | instruct + give-l |\n"
      << "| verify-l | silent correct verification | pass |\n"
      << "| verify-l | spoken correct verification | reply-y + yes |\n"
      << "| verify-o | instance correct or no evidence | reply-y + yes |\n"
      << "| verify-o | wrong instance or type | instruct + give-ot |\n"
      << "| finish-l | any outcome statement | acknowledge + acknowledge |\n"
      << "\n"
      << "A verification with no decidable physical evidence is answered as\n"
      << "correct; generated data always attaches evidence to verifications,\n"
      << "so the default never masks a mistake there.\n";
  return out.str();
}

}  // namespace musim
