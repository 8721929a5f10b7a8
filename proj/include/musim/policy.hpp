#pragma once

#include <optional>

#include "musim/domain.hpp"
#include "musim/features.hpp"
#include "musim/mlp.hpp"

namespace musim {

struct EldDecision {
  std::optional<Move> move;   // empty = pass, HEL keeps the floor
  BeliefState declaredBelief; // the policy's own estimate of the next state
};

class EldPolicy {
 public:
  virtual ~EldPolicy() = default;
  virtual EldDecision respond(const InteractionContext& ctx) = 0;
};

// Rule-based policy; contexts outside the ground rules are answered with a
// pass instead of an error so live partners cannot crash an episode.
class OraclePolicy final : public EldPolicy {
 public:
  EldDecision respond(const InteractionContext& ctx) override;
};

// Trained-classifier policy: encodes the context, predicts with coupled
// heads and realizes the predicted action as a move naming the goal
// entities it gives.
class ModelPolicy final : public EldPolicy {
 public:
  explicit ModelPolicy(Mlp model) : model_(std::move(model)) {}
  EldDecision respond(const InteractionContext& ctx) override;
  const Mlp& model() const { return model_; }

 private:
  Mlp model_;
};

// The move a predicted (action, DA) pair realizes against a goal; empty
// for the pass pair.
std::optional<Move> realize_eld_move(const TargetLabels& labels, const WorldGoal& goal);

}  // namespace musim
