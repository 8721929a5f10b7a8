#include "musim/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "musim/env.hpp"
#include "musim/hel.hpp"
#include "musim/oracle.hpp"
#include "musim/policy.hpp"
#include "musim/util.hpp"

namespace musim {

using nlohmann::json;

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Original: return "original";
    case Provenance::AugOutEstabOT: return "aug-out-estab-ot";
    case Provenance::AugOutWrongOT: return "aug-out-wrong-ot";
    case Provenance::AugOutWrongLO: return "aug-out-wrong-lo";
    case Provenance::AugIn112: return "aug-in-112";
    case Provenance::AugIn120: return "aug-in-120";
    case Provenance::AugIn210: return "aug-in-210";
    case Provenance::AugIn220: return "aug-in-220";
    case Provenance::AugIn200: return "aug-in-200";
    case Provenance::Synthetic: return "synthetic";
  }
  return "?";
}

std::optional<Provenance> provenance_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(Provenance::Synthetic); ++i) {
    const auto p = static_cast<Provenance>(i);
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

namespace {

json target_to_json(const TargetRef& t) {
  return json{{"kind", t.kind == TargetKind::Location ? "location" : "object"},
              {"id", t.id},
              {"objectType", t.objectType}};
}

TargetRef target_from_json(const json& j) {
  TargetRef t;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "location") {
    t.kind = TargetKind::Location;
  } else if (kind == "object") {
    t.kind = TargetKind::Object;
  } else {
    throw std::runtime_error("unknown target kind: " + kind);
  }
  t.id = j.at("id").get<std::string>();
  t.objectType = j.at("objectType").get<std::string>();
  return t;
}

json ctx_to_json(const InteractionContext& ctx) {
  json j;
  j["prevActor"] = ctx.prevActor ? json(std::string(to_string(*ctx.prevActor))) : json(nullptr);
  j["utteredOT"] = ctx.utteredOT;
  j["utteredL"] = ctx.utteredL;
  j["belief"] = {ctx.prevBelief.ot, ctx.prevBelief.loc, ctx.prevBelief.obj};
  if (ctx.helPointing) j["pointing"] = target_to_json(ctx.helPointing->target);
  if (ctx.helHo) {
    j["ho"] = target_to_json(ctx.helHo->target);
    j["ho"]["hoType"] = static_cast<int>(ctx.helHo->type);
  }
  j["helAction"] = static_cast<int>(ctx.helAction);
  j["helDa"] = static_cast<int>(ctx.helDa);
  j["prevEldAction"] = static_cast<int>(ctx.prevEldAction);
  j["prevEldDa"] = static_cast<int>(ctx.prevEldDa);
  j["goal"] = {{"objectType", ctx.goal.objectType},
               {"location", ctx.goal.location},
               {"objectId", ctx.goal.object.id}};
  return j;
}

template <class E>
E enum_from_index(const json& j, int count, const char* what) {
  const int v = j.get<int>();
  if (v < 0 || v >= count) {
    throw std::runtime_error(std::string(what) + " index out of range: " + std::to_string(v));
  }
  return static_cast<E>(v);
}

InteractionContext ctx_from_json(const json& j) {
  InteractionContext ctx;
  const json& pa = j.at("prevActor");
  if (!pa.is_null()) {
    const std::string s = pa.get<std::string>();
    if (s == "ELD") {
      ctx.prevActor = Actor::Eld;
    } else if (s == "HEL") {
      ctx.prevActor = Actor::Hel;
    } else {
      throw std::runtime_error("unknown actor: " + s);
    }
  }
  ctx.utteredOT = j.at("utteredOT").get<bool>();
  ctx.utteredL = j.at("utteredL").get<bool>();
  const json& b = j.at("belief");
  ctx.prevBelief = BeliefState{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>()};
  if (j.contains("pointing")) ctx.helPointing = PointingEvent{target_from_json(j.at("pointing"))};
  if (j.contains("ho")) {
    HapticOstensiveEvent ev;
    ev.target = target_from_json(j.at("ho"));
    ev.type = enum_from_index<HoType>(j.at("ho").at("hoType"), kNumHoTypes, "hoType");
    ctx.helHo = ev;
  }
  ctx.helAction = enum_from_index<HelAction>(j.at("helAction"), kNumHelActions, "helAction");
  ctx.helDa = enum_from_index<DialogueAct>(j.at("helDa"), kNumDialogueActs, "helDa");
  ctx.prevEldAction =
      enum_from_index<EldAction>(j.at("prevEldAction"), kNumEldActions, "prevEldAction");
  ctx.prevEldDa = enum_from_index<DialogueAct>(j.at("prevEldDa"), kNumDialogueActs, "prevEldDa");
  const json& g = j.at("goal");
  ctx.goal.objectType = g.at("objectType").get<std::string>();
  ctx.goal.location = g.at("location").get<std::string>();
  ctx.goal.object = TargetRef::object(g.at("objectId").get<std::string>(), ctx.goal.objectType);
  return ctx;
}

json record_to_json(const Record& r) {
  json j;
  j["dialogue"] = r.dialogueId;
  j["turn"] = r.turnIndex;
  j["prov"] = to_string(r.prov);
  j["ctx"] = ctx_to_json(r.input);
  j["targets"] = {{"action", r.targets.eldAction},
                  {"da", r.targets.eldDa},
                  {"belief", r.targets.nextBelief}};
  return j;
}

Record record_from_json(const json& j) {
  Record r;
  r.dialogueId = j.at("dialogue").get<std::string>();
  r.turnIndex = j.at("turn").get<int>();
  const auto prov = provenance_from_string(j.at("prov").get<std::string>());
  if (!prov) throw std::runtime_error("unknown provenance: " + j.at("prov").get<std::string>());
  r.prov = *prov;
  r.input = ctx_from_json(j.at("ctx"));
  const json& t = j.at("targets");
  r.targets = TargetLabels{t.at("action").get<int>(), t.at("da").get<int>(),
                           t.at("belief").get<int>()};
  return r;
}

}  // namespace

std::string record_problem(const Record& r) {
  if (r.turnIndex < 0) return "negative turn index";
  if (r.dialogueId.empty()) return "empty dialogue id";
  if (const std::string why = context_problem(r.input); !why.empty()) return why;
  if (const std::string why = targets_problem(r.targets); !why.empty()) return why;
  return {};
}

void validate_corpus(const Corpus& c) {
  std::unordered_set<std::string> finished;
  std::string current;
  int lastTurn = -1;
  for (const Record& r : c.records) {
    if (const std::string why = record_problem(r); !why.empty()) {
      throw InvalidRecord("record " + r.dialogueId + ":" + std::to_string(r.turnIndex) + ": " +
                          why);
    }
    if (r.dialogueId != current) {
      if (finished.contains(r.dialogueId)) {
        throw InvalidRecord("dialogue " + r.dialogueId + " is not contiguous");
      }
      if (!current.empty()) finished.insert(current);
      current = r.dialogueId;
      lastTurn = -1;
    }
    if (r.turnIndex <= lastTurn) {
      throw InvalidRecord("dialogue " + r.dialogueId + " has non-increasing turn " +
                          std::to_string(r.turnIndex));
    }
    lastTurn = r.turnIndex;
  }
}

std::string serialize_corpus(const Corpus& c) {
  json header;
  header["format"] = "musim-corpus";
  header["schemaVersion"] = c.schemaVersion;
  header["featureSchema"] = hex_u64(feature_schema_hash());
  std::string out = header.dump();
  out.push_back('\n');
  for (const Record& r : c.records) {
    out += record_to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

Corpus parse_corpus(const std::string& text) {
  Corpus c;
  if (text.empty()) return c;  // empty file = empty corpus

  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(lineNo) + ": " + e.what());
    }
    if (lineNo == 1) {
      try {
        if (j.at("format").get<std::string>() != "musim-corpus") {
          throw SchemaMismatch("not a corpus file");
        }
        if (j.at("schemaVersion").get<std::string>() != kCorpusSchemaVersion) {
          throw SchemaMismatch("unsupported corpus schema version");
        }
        if (j.at("featureSchema").get<std::string>() != hex_u64(feature_schema_hash())) {
          throw SchemaMismatch("corpus was built against a different feature schema");
        }
      } catch (const json::exception& e) {
        throw ParseError(std::string("header: ") + e.what());
      }
      continue;
    }
    try {
      c.records.push_back(record_from_json(j));
    } catch (const std::exception& e) {
      throw ParseError("line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
  validate_corpus(c);
  return c;
}

Corpus load_corpus(const std::string& path) { return parse_corpus(read_text_file(path)); }

void save_corpus(const Corpus& c, const std::string& path) {
  atomic_write_file(path, serialize_corpus(c));
}

namespace {

Move ctx_hel_move(const InteractionContext& ctx) {
  Move m;
  m.actor = Actor::Hel;
  m.da = ctx.helDa;
  m.helAction = ctx.helAction;
  m.pointing = ctx.helPointing;
  m.ho = ctx.helHo;
  return m;
}

BeliefState next_belief_of(const InteractionContext& ctx) {
  return belief_update(ctx.prevBelief, ctx_hel_move(ctx), ctx.goal,
                       UtteredFlags{ctx.utteredOT, ctx.utteredL});
}

TargetRef alt_wrong_object(const WorldGoal& g) {
  return TargetRef::object(g.objectType + "~alt-1", g.objectType + "~alt");
}
TargetRef alt_rtwi_object(const WorldGoal& g) {
  return TargetRef::object(g.object.id + "~alt", g.objectType);
}
TargetRef alt_wrong_location(const WorldGoal& g) {
  return TargetRef::location(g.location + "~alt");
}

bool event_is(const InteractionContext& ctx, const std::optional<PointingEvent>& ev,
              TargetKind kind, bool correctish) {
  if (!ev) return false;
  if (ev->target.kind != kind) return false;
  const MatchStatus m = match_instance(ev->target, ctx.goal);
  return correctish ? m != MatchStatus::Wrong : true;
}

bool ho_is(const InteractionContext& ctx, TargetKind kind, bool correctish) {
  if (!ctx.helHo) return false;
  if (ctx.helHo->target.kind != kind) return false;
  const MatchStatus m = match_instance(ctx.helHo->target, ctx.goal);
  return correctish ? m != MatchStatus::Wrong : true;
}

struct Rule {
  std::string name;
  Provenance prov;
  std::function<bool(const Record&)> eligible;
  std::function<Record(const Record&, Rng&)> make;
};

Record with_targets(Record r, EldAction action, DialogueAct da) {
  r.targets.eldAction = static_cast<int>(action);
  r.targets.eldDa = static_cast<int>(da);
  r.targets.nextBelief = belief_index(next_belief_of(r.input));
  return r;
}

const std::vector<Rule>& output_rules() {
  static const std::vector<Rule> rules = {
      // renewed object-type requests after ELD thought HEL knew the type
      {"out-estab-ot", Provenance::AugOutEstabOT,
       [](const Record& r) {
         return r.input.prevBelief.ot == 1 && r.input.prevBelief.loc != 2;
       },
       [](const Record& src, Rng&) {
         Record r = src;
         r.input.helAction = HelAction::RequestOT;
         r.input.helDa = DialogueAct::QueryW;
         r.input.helPointing.reset();
         r.input.helHo.reset();
         return with_targets(std::move(r), EldAction::GiveOT, DialogueAct::Instruct);
       }},
      // a correct object-type verification flipped to a wrong type
      {"out-wrong-ot", Provenance::AugOutWrongOT,
       [](const Record& r) {
         return r.input.helAction == HelAction::VerifyOT && r.input.prevBelief.loc != 2 &&
                (event_is(r.input, r.input.helPointing, TargetKind::Object, true) ||
                 ho_is(r.input, TargetKind::Object, true));
       },
       [](const Record& src, Rng&) {
         Record r = src;
         if (event_is(r.input, r.input.helPointing, TargetKind::Object, true)) {
           r.input.helPointing->target = alt_wrong_object(r.input.goal);
         }
         if (ho_is(r.input, TargetKind::Object, true)) {
           r.input.helHo->target = alt_wrong_object(r.input.goal);
         }
         return with_targets(std::move(r), EldAction::GiveOT, DialogueAct::Instruct);
       }},
      // a correct location / object reference flipped to a wrong one
      {"out-wrong-lo", Provenance::AugOutWrongLO,
       [](const Record& r) {
         const bool locFlip = r.input.prevBelief.ot == 1 && r.input.utteredL &&
                              (event_is(r.input, r.input.helPointing, TargetKind::Location, true) ||
                               ho_is(r.input, TargetKind::Location, true));
         const bool objFlip =
             r.input.prevBelief.ot == 1 && r.input.prevBelief.loc == 1 &&
             ((r.input.helPointing &&
               r.input.helPointing->target.kind == TargetKind::Object &&
               match_instance(r.input.helPointing->target, r.input.goal) == MatchStatus::Correct) ||
              (r.input.helHo && r.input.helHo->target.kind == TargetKind::Object &&
               match_instance(r.input.helHo->target, r.input.goal) == MatchStatus::Correct));
         return locFlip || objFlip;
       },
       [](const Record& src, Rng& rng) {
         Record r = src;
         const bool locFlip =
             r.input.prevBelief.ot == 1 && r.input.utteredL &&
             (event_is(r.input, r.input.helPointing, TargetKind::Location, true) ||
              ho_is(r.input, TargetKind::Location, true));
         const bool objFlip =
             r.input.prevBelief.ot == 1 && r.input.prevBelief.loc == 1 &&
             ((r.input.helPointing &&
               r.input.helPointing->target.kind == TargetKind::Object &&
               match_instance(r.input.helPointing->target, r.input.goal) == MatchStatus::Correct) ||
              (r.input.helHo && r.input.helHo->target.kind == TargetKind::Object &&
               match_instance(r.input.helHo->target, r.input.goal) == MatchStatus::Correct));
         const bool useLoc = locFlip && (!objFlip || rng.bernoulli(0.5));
         if (useLoc) {
           if (r.input.helPointing && r.input.helPointing->target.kind == TargetKind::Location) {
             r.input.helPointing->target = alt_wrong_location(r.input.goal);
           }
           if (r.input.helHo && r.input.helHo->target.kind == TargetKind::Location) {
             r.input.helHo->target = alt_wrong_location(r.input.goal);
           }
           return with_targets(std::move(r), EldAction::GiveL, DialogueAct::Instruct);
         }
         if (r.input.helPointing && r.input.helPointing->target.kind == TargetKind::Object) {
           r.input.helPointing->target = alt_rtwi_object(r.input.goal);
         }
         if (r.input.helHo && r.input.helHo->target.kind == TargetKind::Object) {
           r.input.helHo->target = alt_rtwi_object(r.input.goal);
         }
         return with_targets(std::move(r), EldAction::GiveOT, DialogueAct::Instruct);
       }},
  };
  return rules;
}

Record reframe_input(Record r, const BeliefState& prevBelief, EldAction prevAction) {
  r.input.prevBelief = prevBelief;
  r.input.prevEldAction = prevAction;
  r.input.prevEldDa = DialogueAct::Instruct;
  r.input.prevActor = Actor::Eld;
  if (prevBelief.ot != 0) r.input.utteredOT = true;
  if (prevBelief.loc != 0) r.input.utteredL = true;
  r.targets.nextBelief = belief_index(next_belief_of(r.input));
  return r;
}

const std::vector<Rule>& input_rules() {
  static const std::vector<Rule> rules = {
      {"in-112", Provenance::AugIn112,
       [](const Record& r) { return r.input.prevBelief == BeliefState{1, 1, 1}; },
       [](const Record& src, Rng&) {
         return reframe_input(src, BeliefState{1, 1, 2}, EldAction::GiveOT);
       }},
      {"in-120", Provenance::AugIn120,
       [](const Record& r) {
         return r.input.prevBelief.ot == 1 && r.input.prevBelief.loc == 1;
       },
       [](const Record& src, Rng&) {
         return reframe_input(src, BeliefState{1, 2, 0}, EldAction::GiveL);
       }},
      {"in-210", Provenance::AugIn210,
       [](const Record& r) {
         return r.input.prevBelief.ot == 1 && r.input.prevBelief.loc == 1;
       },
       [](const Record& src, Rng&) {
         return reframe_input(src, BeliefState{2, 1, 0}, EldAction::GiveOT);
       }},
      {"in-220", Provenance::AugIn220,
       [](const Record& r) {
         return r.input.prevBelief.ot == 1 && r.input.prevBelief.loc == 1;
       },
       [](const Record& src, Rng&) {
         return reframe_input(src, BeliefState{2, 2, 0}, EldAction::GiveOTL);
       }},
      {"in-200", Provenance::AugIn200,
       [](const Record& r) {
         return r.input.prevBelief.ot == 1 && r.input.prevBelief.loc == 0;
       },
       [](const Record& src, Rng&) {
         return reframe_input(src, BeliefState{2, 0, 0}, EldAction::GiveOT);
       }},
  };
  return rules;
}

Corpus apply_rules(const Corpus& c, const AugmentConfig& cfg, const std::vector<Rule>& rules) {
  if (c.records.empty()) throw InsufficientSource("cannot augment an empty corpus");
  Corpus out = c;
  for (const Rule& rule : rules) {
    const auto it = cfg.perRuleCounts.find(rule.name);
    const int count = it == cfg.perRuleCounts.end() ? 0 : it->second;
    if (count <= 0) continue;

    std::vector<const Record*> pool;
    for (const Record& r : c.records) {
      if (rule.eligible(r)) pool.push_back(&r);
    }
    if (pool.empty()) {
      throw InsufficientSource("no source records match rule " + rule.name);
    }
    Rng rng(cfg.seed ^ fnv1a64(rule.name));
    for (int i = 0; i < count; ++i) {
      Record rec = rule.make(*pool[rng.below(pool.size())], rng);  // with replacement
      rec.prov = rule.prov;
      rec.dialogueId = "aug:" + rule.name + ":" + std::to_string(out.records.size());
      rec.turnIndex = 0;
      if (const std::string why = record_problem(rec); !why.empty()) {
        throw InvalidRecord("rule " + rule.name + " produced an invalid record: " + why);
      }
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace

int rule_pool_size(const Corpus& c, const std::string& rule) {
  for (const auto& rules : {output_rules(), input_rules()}) {
    for (const Rule& r : rules) {
      if (r.name == rule) {
        int n = 0;
        for (const Record& rec : c.records) n += r.eligible(rec) ? 1 : 0;
        return n;
      }
    }
  }
  throw std::invalid_argument("unknown augmentation rule: " + rule);
}

AugmentConfig paper_profile(const Corpus& c, std::uint64_t seed) {
  std::vector<std::string> names;
  for (const char* n : kOutputRules) names.emplace_back(n);
  for (const char* n : kInputRules) names.emplace_back(n);

  std::vector<long long> pools;
  long long total = 0;
  for (const std::string& n : names) {
    pools.push_back(rule_pool_size(c, n));
    total += pools.back();
  }
  if (total == 0) {
    throw InsufficientSource("no records are eligible for any augmentation rule");
  }

  AugmentConfig cfg;
  cfg.seed = seed;
  std::vector<double> fractional(names.size());
  int assigned = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double share =
        static_cast<double>(kPaperProfileTotal) * static_cast<double>(pools[i]) /
        static_cast<double>(total);
    const int base = static_cast<int>(share);
    cfg.perRuleCounts[names[i]] = base;
    fractional[i] = share - base;
    assigned += base;
  }
  // largest remainder, ties to the earlier rule
  std::vector<std::size_t> order(names.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fractional[a] > fractional[b]; });
  for (int r = 0; r < kPaperProfileTotal - assigned; ++r) {
    cfg.perRuleCounts[names[order[static_cast<std::size_t>(r) % order.size()]]] += 1;
  }
  return cfg;
}

Corpus augment_output_states(const Corpus& c, const AugmentConfig& cfg) {
  return apply_rules(c, cfg, output_rules());
}

Corpus augment_input_states(const Corpus& c, const AugmentConfig& cfg) {
  return apply_rules(c, cfg, input_rules());
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
  const double parts[3] = {ratios.train, ratios.val, ratios.test};
  double sum = 0.0;
  for (double p : parts) {
    if (p <= 0.0) throw std::invalid_argument("split ratios must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");

  if (n == 1932 && std::abs(ratios.train - 0.8) < 1e-12 && std::abs(ratios.val - 0.1) < 1e-12 &&
      std::abs(ratios.test - 0.1) < 1e-12) {
    return {1548, 183, 201};  // pinned published partition
  }

  std::array<std::size_t, 3> sizes{};
  double fractional[3];
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double share = parts[i] * static_cast<double>(n);
    sizes[static_cast<std::size_t>(i)] = static_cast<std::size_t>(share);
    fractional[i] = share - static_cast<double>(sizes[static_cast<std::size_t>(i)]);
    assigned += sizes[static_cast<std::size_t>(i)];
  }
  int order[3] = {0, 1, 2};
  std::stable_sort(std::begin(order), std::end(order),
                   [&](int a, int b) { return fractional[a] > fractional[b]; });
  for (std::size_t r = 0; r < n - assigned; ++r) {
    sizes[static_cast<std::size_t>(order[r % 3])] += 1;
  }
  return sizes;
}

std::array<Corpus, 3> split(const Corpus& c, const SplitRatios& ratios, std::uint64_t seed,
                            bool byDialogue) {
  const auto sizes = split_sizes(c.records.size(), ratios);
  std::array<std::vector<std::size_t>, 3> parts;
  Rng rng(seed);

  if (!byDialogue) {
    std::vector<std::size_t> idx(c.records.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    std::size_t at = 0;
    for (int p = 0; p < 3; ++p) {
      for (std::size_t i = 0; i < sizes[static_cast<std::size_t>(p)]; ++i) {
        parts[static_cast<std::size_t>(p)].push_back(idx[at++]);
      }
    }
  } else {
    // whole dialogues, greedy fill: approximate sizes, no dialogue leakage
    std::vector<std::pair<std::size_t, std::size_t>> spans;  // [first, last)
    for (std::size_t i = 0; i < c.records.size();) {
      std::size_t j = i + 1;
      while (j < c.records.size() && c.records[j].dialogueId == c.records[i].dialogueId) ++j;
      spans.emplace_back(i, j);
      i = j;
    }
    rng.shuffle(spans);
    int part = 0;
    for (const auto& [first, last] : spans) {
      while (part < 2 && parts[static_cast<std::size_t>(part)].size() >=
                             sizes[static_cast<std::size_t>(part)]) {
        ++part;
      }
      for (std::size_t i = first; i < last; ++i) {
        parts[static_cast<std::size_t>(part)].push_back(i);
      }
    }
  }

  std::array<Corpus, 3> out;
  for (int p = 0; p < 3; ++p) {
    auto& indices = parts[static_cast<std::size_t>(p)];
    std::sort(indices.begin(), indices.end());  // keep dialogues contiguous
    out[static_cast<std::size_t>(p)].schemaVersion = c.schemaVersion;
    for (std::size_t i : indices) {
      out[static_cast<std::size_t>(p)].records.push_back(c.records[i]);
    }
  }
  return out;
}

Corpus synthesize_corpus(const SynthConfig& cfg) {
  if (cfg.noise < 0.0 || cfg.noise > 1.0) {
    throw std::invalid_argument("noise must be a probability");
  }
  Corpus out;
  Rng root(cfg.seed);
  OraclePolicy policy;
  CooperativeHel hel(cfg.noise);

  for (int d = 0; d < cfg.dialogues; ++d) {
    Rng episodeRng = root.fork();
    char idBuf[32];
    std::snprintf(idBuf, sizeof(idBuf), "syn-%06d", d);
    const std::string dialogueId = idBuf;

    EnvConfig envCfg;
    envCfg.maxTurns = cfg.maxTurns;
    Env env(envCfg, policy);
    const WorldGoal goal = sample_goal(episodeRng);
    const auto opening = env.reset(goal);
    hel.start_episode();

    int turn = 0;
    Record first;
    first.input = opening.ctx;
    first.targets = encode_targets(opening.openingMove, env.session().belief);
    first.prov = Provenance::Synthetic;
    first.dialogueId = dialogueId;
    first.turnIndex = turn++;
    out.records.push_back(std::move(first));

    while (!env.session().done) {
      const Session& s = env.session();
      const HelView view{s.belief, s.utteredOT, s.utteredL, goal, s.prevEldMove};
      const Move helMove = hel.next(view, episodeRng);
      const auto sr = env.step(helMove);

      Record rec;
      rec.input = sr.ctx;
      rec.targets = encode_targets(sr.eldMove, sr.beliefAfterHel);
      rec.prov = Provenance::Synthetic;
      rec.dialogueId = dialogueId;
      rec.turnIndex = turn++;
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

Corpus synthesize_records(SynthConfig cfg, std::size_t records) {
  cfg.dialogues = std::max(cfg.dialogues, 1);
  for (;;) {
    Corpus c = synthesize_corpus(cfg);
    if (c.records.size() >= records) {
      c.records.resize(records);
      return c;
    }
    cfg.dialogues *= 2;
  }
}

std::vector<Example> corpus_examples(const Corpus& c) {
  std::vector<Example> out;
  out.reserve(c.records.size());
  for (const Record& r : c.records) {
    out.push_back(Example{encode_input(r.input), r.targets});
  }
  return out;
}

}  // namespace musim
