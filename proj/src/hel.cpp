#include "musim/hel.hpp"

namespace musim {

namespace {

Move hel_move(HelAction action, DialogueAct da) {
  Move m;
  m.actor = Actor::Hel;
  m.helAction = action;
  m.da = da;
  return m;
}

DialogueAct verify_da(Rng& rng) {
  return rng.bernoulli(0.5) ? DialogueAct::Check : DialogueAct::QueryYn;
}

TargetRef wrong_object(const WorldGoal& g) {
  return TargetRef::object(g.objectType + "x-1", g.objectType + "x");
}
TargetRef rtwi_object(const WorldGoal& g) {
  return TargetRef::object(g.objectType + "-other", g.objectType);
}
TargetRef wrong_location(const WorldGoal& g) { return TargetRef::location(g.location + "x"); }

}  // namespace

Move CooperativeHel::scripted(const HelView& v, Rng& rng) {
  const WorldGoal& g = v.goal;

  if (!v.utteredOT) return hel_move(HelAction::RequestOT, DialogueAct::QueryW);

  if (v.belief.ot != 1) {
    const int variant = rng.range(0, 3);
    if (variant == 0) return hel_move(HelAction::Acknowledge, DialogueAct::Acknowledge);
    Move m = hel_move(HelAction::VerifyOT, verify_da(rng));
    if (variant == 1) {
      m.mentioned = {TargetRef::object_type(g.objectType)};
    } else {
      m.pointing = PointingEvent{g.object};
    }
    return m;
  }

  if (!v.utteredL) {
    return hel_move(HelAction::RequestL,
                    rng.bernoulli(0.75) ? DialogueAct::QueryW : DialogueAct::Instruct);
  }

  if (v.belief.loc != 1) {
    const int variant = rng.range(0, 3);
    if (variant == 0) return hel_move(HelAction::Acknowledge, DialogueAct::Acknowledge);
    Move m = hel_move(HelAction::VerifyL, verify_da(rng));
    if (variant == 1) {
      m.mentioned = {TargetRef::location(g.location)};
    } else {
      m.pointing = PointingEvent{TargetRef::location(g.location)};
    }
    return m;
  }

  if (v.belief.obj != 1) {
    if (!opened_) {
      opened_ = true;
      Move m = hel_move(HelAction::VerifyL, DialogueAct::NoUtterance);
      m.ho = HapticOstensiveEvent{TargetRef::location(g.location), HoType::OpenLocation};
      return m;
    }
    Move m = hel_move(HelAction::VerifyO,
                      rng.bernoulli(0.3) ? DialogueAct::State : verify_da(rng));
    m.ho = HapticOstensiveEvent{
        g.object, rng.bernoulli(0.5) ? HoType::TakeOutObject : HoType::HoldObject};
    if (rng.bernoulli(0.25)) m.pointing = PointingEvent{g.object};
    return m;
  }

  return hel_move(HelAction::NoAction,
                  rng.bernoulli(0.8) ? DialogueAct::StateY : DialogueAct::State);
}

Move CooperativeHel::mistake(const HelView& v, Rng& rng) {
  const WorldGoal& g = v.goal;
  enum Kind { WrongOt, RedundantOt, RtwiO, WrongTypeO, Premature, WrongL, WrongOpen, RedundantL };
  std::vector<Kind> menu = {WrongOt, RedundantOt, RtwiO, WrongTypeO, Premature};
  if (v.utteredL) {
    menu.push_back(WrongL);
    menu.push_back(WrongOpen);
    menu.push_back(RedundantL);
  }
  switch (rng.pick(menu)) {
    case WrongOt: {
      Move m = hel_move(HelAction::VerifyOT, verify_da(rng));
      m.pointing = PointingEvent{wrong_object(g)};
      return m;
    }
    case RedundantOt:
      return hel_move(HelAction::RequestOT, DialogueAct::QueryW);
    case Premature:
      // declares the search over while it is not
      return hel_move(HelAction::NoAction,
                      rng.bernoulli(0.5) ? DialogueAct::StateN : DialogueAct::State);
    case RtwiO: {
      Move m = hel_move(HelAction::VerifyO, verify_da(rng));
      m.ho = HapticOstensiveEvent{rtwi_object(g), HoType::TakeOutObject};
      return m;
    }
    case WrongTypeO: {
      Move m = hel_move(HelAction::VerifyO, verify_da(rng));
      m.ho = HapticOstensiveEvent{wrong_object(g), HoType::HoldObject};
      return m;
    }
    case WrongL: {
      Move m = hel_move(HelAction::VerifyL, verify_da(rng));
      m.pointing = PointingEvent{wrong_location(g)};
      return m;
    }
    case WrongOpen: {
      Move m = hel_move(HelAction::VerifyL, DialogueAct::NoUtterance);
      m.ho = HapticOstensiveEvent{wrong_location(g), HoType::OpenLocation};
      return m;
    }
    case RedundantL:
      return hel_move(HelAction::RequestL, DialogueAct::QueryW);
  }
  return scripted(v, rng);
}

Move CooperativeHel::next(const HelView& view, Rng& rng) {
  if (view.utteredOT && rng.bernoulli(noise_)) return mistake(view, rng);
  return scripted(view, rng);
}

Move AdversarialHel::next(const HelView&, Rng&) {
  return hel_move(HelAction::RequestOT, DialogueAct::QueryW);
}

}  // namespace musim
