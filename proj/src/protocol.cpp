#include "musim/protocol.hpp"

#include <json.hpp>

namespace musim {

using nlohmann::json;

namespace {

void check_fields(const json& j, std::initializer_list<const char*> allowed,
                  const char* what) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw MalformedMove(std::string("unknown field '") + key + "' in " + what);
  }
}

TargetRef parse_target(const json& j, const char* what) {
  if (!j.is_object()) throw MalformedMove(std::string(what) + " must be an object");
  check_fields(j, {"kind", "id", "objectType", "hoType"}, what);
  TargetRef t;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "location") {
    t.kind = TargetKind::Location;
  } else if (kind == "object") {
    t.kind = TargetKind::Object;
  } else {
    throw MalformedMove("unknown target kind: " + kind);
  }
  if (j.contains("id")) t.id = j.at("id").get<std::string>();
  if (j.contains("objectType")) t.objectType = j.at("objectType").get<std::string>();
  return t;
}

template <class E>
E parse_enum(const json& j, int count, const char* what) {
  if (!j.is_number_integer()) throw MalformedMove(std::string(what) + " must be an index");
  const int v = j.get<int>();
  if (v < 0 || v >= count) {
    throw MalformedMove(std::string(what) + " index out of range: " + std::to_string(v));
  }
  return static_cast<E>(v);
}

Move parse_hel_move(const json& j) {
  check_fields(j, {"type", "da", "action", "pointing", "ho", "mentioned"}, "hel_move");
  Move m;
  m.actor = Actor::Hel;
  m.da = parse_enum<DialogueAct>(j.at("da"), kNumDialogueActs, "da");
  m.helAction = parse_enum<HelAction>(j.at("action"), kNumHelActions, "action");
  if (j.contains("pointing")) {
    m.pointing = PointingEvent{parse_target(j.at("pointing"), "pointing")};
  }
  if (j.contains("ho")) {
    HapticOstensiveEvent ev;
    ev.target = parse_target(j.at("ho"), "ho");
    if (!j.at("ho").contains("hoType")) throw MalformedMove("ho event needs hoType");
    ev.type = parse_enum<HoType>(j.at("ho").at("hoType"), kNumHoTypes, "hoType");
    m.ho = ev;
  }
  if (j.contains("mentioned")) {
    if (!j.at("mentioned").is_array()) throw MalformedMove("mentioned must be an array");
    for (const json& t : j.at("mentioned")) {
      m.mentioned.push_back(parse_target(t, "mentioned"));
    }
  }
  if (const std::string why = move_problem(m); !why.empty()) throw MalformedMove(why);
  return m;
}

json belief_json(const BeliefState& b) { return json::array({b.ot, b.loc, b.obj}); }

}  // namespace

Move parse_hel_move_json(const std::string& text) { return parse_hel_move(json::parse(text)); }

std::string eld_move_message(const std::optional<Move>& move, const BeliefState& belief) {
  json j;
  j["type"] = "eld_move";
  j["da"] = move ? static_cast<int>(move->da) : 0;
  j["action"] = move ? static_cast<int>(move->eldAction.value_or(EldAction::NoAction)) : 0;
  j["utteredOT"] = move ? move->uttersOT : false;
  j["utteredL"] = move ? move->uttersL : false;
  j["belief"] = belief_json(belief);
  return j.dump();
}

std::string episode_end_message(Outcome outcome, double totalReward) {
  json j;
  j["type"] = "episode_end";
  j["outcome"] = to_string(outcome);
  j["totalReward"] = totalReward;
  return j.dump();
}

std::string error_message(const std::string& code, const std::string& detail) {
  json j;
  j["type"] = "error";
  j["code"] = code;
  j["detail"] = detail;
  return j.dump();
}

std::string process_line(Env& env, const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    return error_message("parse", e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    return error_message("parse", "message must be an object with a type");
  }
  const std::string type = j.at("type").get<std::string>();

  try {
    if (type == "reset") {
      check_fields(j, {"type", "seed", "goal"}, "reset");
      std::optional<std::uint64_t> seed;
      if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
      std::optional<WorldGoal> goal;
      if (j.contains("goal")) {
        const json& g = j.at("goal");
        check_fields(g, {"objectType", "location", "objectId"}, "goal");
        WorldGoal w;
        w.objectType = g.at("objectType").get<std::string>();
        w.location = g.at("location").get<std::string>();
        w.object = TargetRef::object(g.at("objectId").get<std::string>(), w.objectType);
        goal = w;
      }
      const auto rr = env.reset(goal, seed);
      return eld_move_message(rr.openingMove, env.session().belief);
    }
    if (type == "hel_move") {
      const Move m = parse_hel_move(j);
      const auto sr = env.step(m);
      if (sr.done) {
        return episode_end_message(*sr.outcome, env.session().totalReward);
      }
      return eld_move_message(sr.eldMove, env.session().belief);
    }
    return error_message("bad_type", "unsupported message type: " + type);
  } catch (const SessionDoneError& e) {
    return error_message("session_done", e.what());
  } catch (const MalformedMove& e) {
    return error_message("malformed_move", e.what());
  } catch (const BadGoalSpec& e) {
    return error_message("bad_goal", e.what());
  } catch (const json::exception& e) {
    return error_message("parse", e.what());
  }
}

}  // namespace musim
