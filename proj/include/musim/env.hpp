#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "musim/domain.hpp"
#include "musim/features.hpp"
#include "musim/policy.hpp"
#include "musim/util.hpp"

namespace musim {

struct EnvConfig {
  int maxTurns = 40;  // HEL moves per episode
  double rewardSuccess = 1.0;
  double rewardPerTurn = -0.01;
  double rewardFailure = -1.0;
  std::uint64_t seed = 0;
};

enum class Outcome { Success, Timeout, Aborted };
const char* to_string(Outcome o);
std::optional<Outcome> outcome_from_string(const std::string& s);

struct Session {
  WorldGoal goal;
  BeliefState belief;
  bool utteredOT = false;
  bool utteredL = false;
  int steps = 0;  // HEL moves processed
  int turn = 0;   // moves of either actor so far
  std::optional<Actor> prevActor;
  std::optional<Move> prevEldMove;
  bool done = false;
  bool started = false;
  std::optional<Outcome> outcome;
  double totalReward = 0.0;
};

struct SessionDoneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedMove : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadGoalSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};

WorldGoal sample_goal(Rng& rng);

// One episode of the Find task with the configured policy playing ELD.
// The session belief always evolves through belief_update over the real
// HEL moves; a model policy's own state estimate is reported alongside.
class Env {
 public:
  Env(EnvConfig cfg, EldPolicy& policy) : cfg_(cfg), policy_(&policy) {}

  struct ResetResult {
    InteractionContext ctx;
    std::optional<Move> openingMove;
    BeliefState declaredBelief;
  };

  struct StepResult {
    InteractionContext ctx;        // what the policy saw
    std::optional<Move> eldMove;   // empty = pass
    BeliefState beliefAfterHel;    // session belief after the HEL move
    BeliefState declaredBelief;    // the policy's declared next state
    double reward = 0.0;           // this step's increment
    bool done = false;
    std::optional<Outcome> outcome;
  };

  // Starts a fresh episode (aborting any active one) and lets ELD open.
  ResetResult reset(std::optional<WorldGoal> goal = std::nullopt,
                    std::optional<std::uint64_t> seed = std::nullopt);
  StepResult step(const Move& helMove);
  void abort();

  const Session& session() const { return session_; }
  const EnvConfig& config() const { return cfg_; }

 private:
  InteractionContext build_context(const std::optional<Move>& helMove) const;
  void apply_eld_move(const Move& m);

  EnvConfig cfg_;
  EldPolicy* policy_;
  Session session_;
};

}  // namespace musim
