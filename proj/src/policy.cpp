#include "musim/policy.hpp"

#include "musim/oracle.hpp"

namespace musim {

EldDecision OraclePolicy::respond(const InteractionContext& ctx) {
  try {
    OracleResponse r = oracle_respond(ctx);
    return {std::move(r.move), r.nextBelief};
  } catch (const GroundRuleViolation&) {
    return {std::nullopt, ctx.prevBelief};
  }
}

std::optional<Move> realize_eld_move(const TargetLabels& labels, const WorldGoal& goal) {
  if (labels.eldAction == 0 && labels.eldDa == 0) return std::nullopt;
  Move m;
  m.actor = Actor::Eld;
  m.eldAction = static_cast<EldAction>(labels.eldAction);
  m.da = static_cast<DialogueAct>(labels.eldDa);
  switch (*m.eldAction) {
    case EldAction::GiveOT:
      m.uttersOT = true;
      m.mentioned = {TargetRef::object_type(goal.objectType)};
      break;
    case EldAction::GiveL:
      m.uttersL = true;
      m.mentioned = {TargetRef::location(goal.location)};
      break;
    case EldAction::GiveOTL:
      m.uttersOT = true;
      m.uttersL = true;
      m.mentioned = {TargetRef::object_type(goal.objectType), TargetRef::location(goal.location)};
      break;
    default:
      break;
  }
  return m;
}

EldDecision ModelPolicy::respond(const InteractionContext& ctx) {
  const TargetLabels labels = predict_coherent(model_, encode_input(ctx));
  return {realize_eld_move(labels, ctx.goal), belief_from_index(labels.nextBelief)};
}

}  // namespace musim
