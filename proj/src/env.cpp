#include "musim/env.hpp"

#include <array>

#include "musim/oracle.hpp"

namespace musim {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Timeout: return "timeout";
    case Outcome::Aborted: return "aborted";
  }
  return "?";
}

std::optional<Outcome> outcome_from_string(const std::string& s) {
  if (s == "success") return Outcome::Success;
  if (s == "timeout") return Outcome::Timeout;
  if (s == "aborted") return Outcome::Aborted;
  return std::nullopt;
}

WorldGoal sample_goal(Rng& rng) {
  static const std::vector<std::string> types = {"bowl", "pot",   "cup",  "plate",
                                                 "spoon", "knife", "pan"};
  static const std::vector<std::string> locations = {"cabinet", "drawer", "shelf",
                                                     "counter", "fridge", "pantry"};
  static const std::vector<std::string> variants = {"small", "large", "red", "blue"};
  WorldGoal g;
  g.objectType = rng.pick(types);
  g.location = rng.pick(locations);
  g.object = TargetRef::object(g.objectType + "-" + rng.pick(variants), g.objectType);
  return g;
}

InteractionContext Env::build_context(const std::optional<Move>& helMove) const {
  InteractionContext ctx;
  ctx.prevActor = session_.prevActor;
  ctx.utteredOT = session_.utteredOT;
  ctx.utteredL = session_.utteredL;
  ctx.prevBelief = session_.belief;
  if (helMove) {
    ctx.helPointing = helMove->pointing;
    ctx.helHo = helMove->ho;
    ctx.helAction = helMove->helAction.value_or(HelAction::NoAction);
    ctx.helDa = helMove->da;
  }
  if (session_.prevEldMove) {
    ctx.prevEldAction = session_.prevEldMove->eldAction.value_or(EldAction::NoAction);
    ctx.prevEldDa = session_.prevEldMove->da;
  }
  ctx.goal = session_.goal;
  return ctx;
}

void Env::apply_eld_move(const Move& m) {
  session_.utteredOT = session_.utteredOT || m.uttersOT;
  session_.utteredL = session_.utteredL || m.uttersL;
  session_.prevEldMove = m;
  session_.prevActor = Actor::Eld;
  session_.turn += 1;
}

Env::ResetResult Env::reset(std::optional<WorldGoal> goal, std::optional<std::uint64_t> seed) {
  if (session_.started && !session_.done) {
    session_.done = true;
    session_.outcome = Outcome::Aborted;
  }
  session_ = Session{};
  session_.started = true;
  if (goal) {
    if (!goal_valid(*goal)) throw BadGoalSpec("goal labels are inconsistent or empty");
    session_.goal = *goal;
  } else {
    Rng rng(seed.value_or(cfg_.seed));
    session_.goal = sample_goal(rng);
  }

  ResetResult out;
  out.ctx = build_context(std::nullopt);
  EldDecision d = policy_->respond(out.ctx);
  out.declaredBelief = d.declaredBelief;
  if (d.move) {
    apply_eld_move(*d.move);
    out.openingMove = std::move(d.move);
  }
  return out;
}

Env::StepResult Env::step(const Move& helMove) {
  if (!session_.started || session_.done) {
    throw SessionDoneError("episode is not active");
  }
  if (helMove.actor != Actor::Hel) throw MalformedMove("expected a HEL move");
  if (const std::string why = move_problem(helMove); !why.empty()) {
    throw MalformedMove(why);
  }

  session_.steps += 1;
  session_.turn += 1;

  StepResult out;
  out.ctx = build_context(helMove);
  out.beliefAfterHel =
      belief_update(session_.belief, helMove, session_.goal,
                    UtteredFlags{session_.utteredOT, session_.utteredL});

  EldDecision d = policy_->respond(out.ctx);
  session_.belief = out.beliefAfterHel;
  out.declaredBelief = d.declaredBelief;

  double reward = cfg_.rewardPerTurn;
  if (d.move) {
    apply_eld_move(*d.move);
    const BeliefState resolved{1, 1, 1};
    if (session_.belief == resolved && intent_of(d.move).kind == Intent::Confirm) {
      session_.done = true;
      session_.outcome = Outcome::Success;
      reward += cfg_.rewardSuccess;
    }
    out.eldMove = std::move(d.move);
  } else {
    session_.prevActor = Actor::Hel;
  }

  if (!session_.done && session_.steps >= cfg_.maxTurns) {
    session_.done = true;
    session_.outcome = Outcome::Timeout;
    reward += cfg_.rewardFailure;
  }

  const double bonus = session_.outcome == Outcome::Success  ? cfg_.rewardSuccess
                       : session_.outcome == Outcome::Timeout ? cfg_.rewardFailure
                                                              : 0.0;
  session_.totalReward = cfg_.rewardPerTurn * session_.steps + bonus;

  out.reward = reward;
  out.done = session_.done;
  out.outcome = session_.outcome;
  return out;
}

void Env::abort() {
  if (session_.started && !session_.done) {
    session_.done = true;
    session_.outcome = Outcome::Aborted;
  }
}

}  // namespace musim
