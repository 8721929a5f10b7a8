#pragma once

#include <optional>

#include "musim/domain.hpp"
#include "musim/util.hpp"

namespace musim {

// What a scripted partner is told about the episode between its moves.
struct HelView {
  BeliefState belief;
  bool utteredOT = false;
  bool utteredL = false;
  WorldGoal goal;
  std::optional<Move> lastEldMove;
};

class HelAgent {
 public:
  virtual ~HelAgent() = default;
  virtual void start_episode() {}
  virtual Move next(const HelView& view, Rng& rng) = 0;
};

// Follows the cooperative script (confirm the object type, ask for and
// confirm the location, open it, verify the object, announce the find) and
// with probability `noise` per turn injects a mistake instead: a wrong or
// redundant verification/request. Every mistake carries physical evidence,
// so it is visible in the encoded features. Seeded variation picks between
// spoken and gesture-backed verifications.
class CooperativeHel : public HelAgent {
 public:
  explicit CooperativeHel(double noise = 0.0) : noise_(noise) {}
  void start_episode() override { opened_ = false; }
  Move next(const HelView& view, Rng& rng) override;

 private:
  Move scripted(const HelView& view, Rng& rng);
  Move mistake(const HelView& view, Rng& rng);

  double noise_ = 0.0;
  bool opened_ = false;
};

// Never confirms anything: keeps requesting the object type over and over,
// so an episode can only end by the turn limit.
class AdversarialHel : public HelAgent {
 public:
  Move next(const HelView& view, Rng& rng) override;
};

}  // namespace musim
