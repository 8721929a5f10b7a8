#pragma once

#include <optional>
#include <string>

#include "musim/env.hpp"

namespace musim {

// Line protocol: one JSON object per line, one response per request.
//   -> {"type":"reset","seed":7,"goal":{...}}        (seed, goal optional)
//   <- {"type":"eld_move","da":1,"action":1,"utteredOT":true,
//       "utteredL":false,"belief":[0,0,0]}
//   -> {"type":"hel_move","da":8,"action":3,"pointing":{...},"ho":{...},
//       "mentioned":[...]}
//   <- eld_move (action 0 / da 0 = ELD passes) or, on a terminal step,
//      {"type":"episode_end","outcome":"success","totalReward":0.94}
// Anything unparseable or with unknown fields gets
//   {"type":"error","code":"...","detail":"..."} and the session lives on.
// Field names and enum indexes are documented in docs/protocol.md.

// Processes one request line against one session; always returns exactly
// one response line (without the trailing newline).
std::string process_line(Env& env, const std::string& line);

std::string eld_move_message(const std::optional<Move>& move, const BeliefState& belief);
std::string episode_end_message(Outcome outcome, double totalReward);
std::string error_message(const std::string& code, const std::string& detail);

// Strict hel_move parser (throws MalformedMove on unknown fields, bad
// indexes or malformed events); exposed for tests.
Move parse_hel_move_json(const std::string& text);

}  // namespace musim
