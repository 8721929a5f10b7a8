// Acceptance suite: runs every shipped-quality gate end to end and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <json.hpp>

#include "musim/corpus.hpp"
#include "musim/env.hpp"
#include "musim/eval.hpp"
#include "musim/hel.hpp"
#include "musim/mlp.hpp"
#include "musim/oracle.hpp"
#include "musim/policy.hpp"
#include "musim/protocol.hpp"
#include "musim/server.hpp"
#include "musim/util.hpp"

using namespace musim;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.str().empty()) detail << "; ";
      detail << what;
    }
  }
  void note(const std::string& s) {
    if (!detail.str().empty()) detail << "; ";
    detail << s;
  }
};

WorldGoal accept_goal() {
  WorldGoal g;
  g.objectType = "bowl";
  g.location = "cabinet";
  g.object = TargetRef::object("bowl-small", "bowl");
  return g;
}

std::vector<Move> closure_move_alphabet() {
  const WorldGoal g = accept_goal();
  std::vector<TargetRef> targets = {
      TargetRef::location(g.location),       TargetRef::location("drawer"),
      g.object,                              TargetRef::object("bowl-large", "bowl"),
      TargetRef::object("pot-1", "pot"),     TargetRef::object_type("bowl"),
      TargetRef::object_type("pot"),
  };
  std::vector<std::optional<PointingEvent>> pointings = {std::nullopt};
  for (const TargetRef& t : targets) {
    if (!t.id.empty()) pointings.push_back(PointingEvent{t});
  }
  std::vector<std::optional<HapticOstensiveEvent>> hos = {std::nullopt};
  for (const TargetRef& t : targets) {
    if (t.id.empty()) continue;
    for (int ty = 0; ty < kNumHoTypes; ++ty) {
      const HapticOstensiveEvent ev{t, static_cast<HoType>(ty)};
      if (ho_event_coherent(ev)) hos.push_back(ev);
    }
  }
  std::vector<std::vector<TargetRef>> mentions = {{}};
  for (const TargetRef& t : targets) mentions.push_back({t});

  std::vector<Move> moves;
  for (int a = 0; a < kNumHelActions; ++a) {
    for (int d = 0; d < kNumDialogueActs; ++d) {
      for (const auto& p : pointings) {
        for (const auto& h : hos) {
          for (const auto& m : mentions) {
            Move mv;
            mv.actor = Actor::Hel;
            mv.helAction = static_cast<HelAction>(a);
            mv.da = static_cast<DialogueAct>(d);
            mv.pointing = p;
            mv.ho = h;
            mv.mentioned = m;
            if (move_valid(mv)) moves.push_back(std::move(mv));
          }
        }
      }
    }
  }
  return moves;
}

// ---- criterion implementations -------------------------------------------

void c1_pipeline_counts(Check& c) {
  SynthConfig sc;
  sc.noise = 0.2;
  sc.dialogues = 96;
  sc.seed = 41;
  const Corpus base = synthesize_records(sc, 693);
  c.require(base.records.size() == 693, "base corpus size");

  const AugmentConfig cfg = paper_profile(base, 17);
  Corpus augmented = augment_output_states(base, cfg);
  augmented = augment_input_states(augmented, cfg);
  c.require(augmented.records.size() == 1932,
            "augmented size " + std::to_string(augmented.records.size()) + " != 1932");

  const auto parts = split(augmented, SplitRatios{0.8, 0.1, 0.1}, 5);
  c.require(parts[0].records.size() == 1548,
            "train " + std::to_string(parts[0].records.size()));
  c.require(parts[1].records.size() == 183, "val " + std::to_string(parts[1].records.size()));
  c.require(parts[2].records.size() == 201, "test " + std::to_string(parts[2].records.size()));
}

void c2_belief_algebra(Check& c) {
  int valid = 0;
  for (int ot = 0; ot <= 2; ++ot) {
    for (int loc = 0; loc <= 2; ++loc) {
      for (int obj = 0; obj <= 2; ++obj) {
        bool threw = false;
        try {
          validate_belief(ot, loc, obj);
        } catch (const InvalidBelief&) {
          threw = true;
        }
        valid += threw ? 0 : 1;
      }
    }
  }
  c.require(valid == 13, "accepted " + std::to_string(valid) + " of 27 triples");

  const WorldGoal g = accept_goal();
  const auto moves = closure_move_alphabet();
  long long checked = 0;
  for (const BeliefState& b : kBeliefStates) {
    for (int uo = 0; uo <= 1; ++uo) {
      for (int ul = 0; ul <= 1; ++ul) {
        for (const Move& m : moves) {
          const BeliefState next = belief_update(b, m, g, {uo == 1, ul == 1});
          if (!is_valid_belief(next.ot, next.loc, next.obj)) {
            c.require(false, "closure violated at " + to_string(b) + " -> " + to_string(next));
            return;
          }
          ++checked;
        }
      }
    }
  }
  c.note(std::to_string(checked) + " transitions closed");
}

void c3_feature_schema(Check& c) {
  const WorldGoal g = accept_goal();
  // golden vectors, including the published wrong-instance pointing case
  const auto rtwi = encode_pointing(PointingEvent{TargetRef::object("bowl-large", "bowl")}, g);
  c.require(rtwi == std::array<double, 5>{0, 1, 0, 0, 1}, "(0,1,0,0,1) pointing case");

  struct GoldenCtx {
    InteractionContext ctx;
    std::set<int> ones;
  };
  std::vector<GoldenCtx> golden;
  {
    InteractionContext ctx;
    ctx.goal = g;
    ctx.helAction = HelAction::RequestOT;
    ctx.helDa = DialogueAct::QueryW;
    golden.push_back({ctx, {4, 33, 44, 55, 62}});
  }
  {
    InteractionContext ctx;
    ctx.goal = g;
    ctx.prevActor = Actor::Eld;
    ctx.utteredOT = true;
    ctx.prevBelief = {1, 0, 0};
    ctx.helPointing = PointingEvent{TargetRef::object("bowl-large", "bowl")};
    ctx.helAction = HelAction::VerifyOT;
    ctx.helDa = DialogueAct::QueryYn;
    ctx.prevEldAction = EldAction::GiveOT;
    ctx.prevEldDa = DialogueAct::Instruct;
    golden.push_back({ctx, {0, 2, 7, 18, 21, 35, 45, 56, 63}});
  }
  {
    InteractionContext ctx;
    ctx.goal = g;
    ctx.prevActor = Actor::Hel;
    ctx.utteredOT = true;
    ctx.utteredL = true;
    ctx.prevBelief = {1, 1, 0};
    ctx.helHo = HapticOstensiveEvent{TargetRef::location(g.location), HoType::OpenLocation};
    ctx.helAction = HelAction::VerifyL;
    ctx.helDa = DialogueAct::NoUtterance;
    golden.push_back({ctx, {1, 2, 3, 10, 22, 24, 27, 36, 41, 55, 62}});
  }
  for (std::size_t i = 0; i < golden.size(); ++i) {
    const EncodedInput x = encode_input(golden[i].ctx);
    std::set<int> ones;
    for (int j = 0; j < kInputSize; ++j) {
      if (x.values[static_cast<std::size_t>(j)] == 1.0) ones.insert(j);
    }
    c.require(ones == golden[i].ones, "golden vector " + std::to_string(i));
  }

  Rng rng(20260809);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    InteractionContext ctx;
    ctx.goal = g;
    const int pa = rng.range(0, 2);
    if (pa > 0) {
      ctx.prevActor = pa == 1 ? Actor::Eld : Actor::Hel;
      ctx.prevEldAction = static_cast<EldAction>(rng.range(0, kNumEldActions - 1));
      ctx.prevEldDa = static_cast<DialogueAct>(rng.range(0, kNumDialogueActs - 1));
    }
    ctx.utteredOT = rng.bernoulli(0.5);
    ctx.utteredL = rng.bernoulli(0.5);
    ctx.prevBelief = kBeliefStates[static_cast<std::size_t>(rng.range(0, 12))];
    ctx.helAction = static_cast<HelAction>(rng.range(0, kNumHelActions - 1));
    ctx.helDa = static_cast<DialogueAct>(rng.range(0, kNumDialogueActs - 1));
    auto random_target = [&] {
      switch (rng.range(0, 3)) {
        case 0: return TargetRef::location(rng.bernoulli(0.5) ? g.location : "x");
        case 1: return g.object;
        case 2: return TargetRef::object("bowl-large", "bowl");
        default: return TargetRef::object("pot-1", "pot");
      }
    };
    if (rng.bernoulli(0.5)) ctx.helPointing = PointingEvent{random_target()};
    if (rng.bernoulli(0.5)) {
      const TargetRef t = random_target();
      const HoType type =
          t.kind == TargetKind::Location
              ? std::array{HoType::OpenLocation, HoType::CloseLocation,
                           HoType::Touch}[static_cast<std::size_t>(rng.range(0, 2))]
              : std::array{HoType::Touch, HoType::TakeOutObject,
                           HoType::HoldObject}[static_cast<std::size_t>(rng.range(0, 2))];
      ctx.helHo = HapticOstensiveEvent{t, type};
    }
    try {
      const EncodedInput x = encode_input(ctx);
      const DecodedInput d = decode_input(x.values);
      if (d.helAction != ctx.helAction || d.beliefIndex != belief_index(ctx.prevBelief) ||
          d.prevActor != ctx.prevActor) {
        ++failures;
      }
    } catch (const std::exception&) {
      ++failures;
    }
  }
  c.require(failures == 0, std::to_string(failures) + " fuzz failures");
}

void c4_oracle_conformance(Check& c) {
  const auto inputs = enumerate_valid_inputs();
  int member = 0;
  for (const InteractionContext& ctx : inputs) {
    const TableRow* row = find_row(classify_subtask(ctx), input_tuple(ctx));
    if (row == nullptr) continue;
    const OracleResponse r = oracle_respond(ctx);
    member += output_permitted(*row, output_tuple(r.move)) ? 1 : 0;
  }
  c.require(member == static_cast<int>(inputs.size()),
            std::to_string(member) + "/" + std::to_string(inputs.size()) + " conformant");

  OraclePolicy oracle;
  const AgreementReport rep = compare_to_oracle(oracle, inputs);
  c.require(rep.exactAgreement == 1.0, "oracle self-agreement below 100%");
  c.note(std::to_string(inputs.size()) + " inputs");
}

void c5_gradient_check(Check& c) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.hidden1 = 8;
    cfg.hidden2 = 8;
    cfg.activation = seed % 2 == 0 ? Activation::Tanh : Activation::Identity;
    Mlp m = init(cfg);
    m.dropoutRate = 0.0;

    Rng rng(seed * 977);
    EncodedInput x;
    for (double& v : x.values) v = rng.bernoulli(0.2) ? 1.0 : 0.0;
    TargetLabels t{static_cast<int>(1 + seed % 6), static_cast<int>(1 + seed % 13),
                   static_cast<int>(seed % 13)};

    Gradients grads;
    batch_loss_and_gradients(m, std::span(&x, 1), std::span(&t, 1), false, nullptr, grads);
    std::vector<double> flat;
    for (const auto* v : {&grads.w1, &grads.b1, &grads.w2, &grads.b2, &grads.w3, &grads.b3}) {
      flat.insert(flat.end(), v->begin(), v->end());
    }
    std::vector<double*> ptrs;
    for (auto* v : {&m.l1.w, &m.l1.b, &m.l2.w, &m.l2.b, &m.l3.w, &m.l3.b}) {
      for (double& p : *v) ptrs.push_back(&p);
    }
    const double eps = 1e-5;
    for (std::size_t i = 0; i < ptrs.size(); ++i) {
      const double orig = *ptrs[i];
      *ptrs[i] = orig + eps;
      const double up = loss(forward(m, x), t);
      *ptrs[i] = orig - eps;
      const double down = loss(forward(m, x), t);
      *ptrs[i] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      worst = std::max(worst,
                       std::abs(numeric - flat[i]) / std::max(1.0, std::abs(numeric)));
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max relative error %.2e", worst);
  c.note(buf);
  c.require(worst < 1e-4, "gradient error above 1e-4");
}

struct TrainedOutcome {
  double action = 0, da = 0, state = 0, intent = 0;
};

TrainedOutcome train_and_score(Activation act, const Corpus& trainC, const Corpus& valC,
                               const Corpus& testC) {
  TrainConfig cfg;
  cfg.activation = act;
  cfg.seed = 7;
  const auto trainSet = corpus_examples(trainC);
  const auto valSet = corpus_examples(valC);
  const TrainResult result = train(trainSet, valSet, cfg);

  TrainedOutcome out;
  const EvalReport rep = evaluate(result.model, testC);
  out.action = rep.actionAccuracy;
  out.da = rep.daAccuracy;
  out.state = rep.stateAccuracy;

  ModelPolicy policy(result.model);
  const auto inputs = enumerate_valid_inputs();
  out.intent = compare_to_oracle(policy, inputs).intentAgreement;
  return out;
}

void c6_training_soundness(Check& c) {
  SynthConfig sc;
  sc.noise = 0.2;
  sc.dialogues = 256;
  sc.seed = 20260809;
  const Corpus corpus = synthesize_records(sc, 2000);
  const auto parts = split(corpus, SplitRatios{0.8, 0.1, 0.1}, 3);

  // the shipped default training profile (documented in the README)
  const TrainedOutcome identity =
      train_and_score(Activation::Identity, parts[0], parts[1], parts[2]);
  const TrainedOutcome tanhOut =
      train_and_score(Activation::Tanh, parts[0], parts[1], parts[2]);

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "identity acc %.3f/%.3f/%.3f intent %.3f | tanh acc %.3f/%.3f/%.3f intent %.3f",
                identity.action, identity.da, identity.state, identity.intent, tanhOut.action,
                tanhOut.da, tanhOut.state, tanhOut.intent);
  c.note(buf);

  c.require(identity.action >= 0.85, "default action accuracy below 0.85");
  c.require(identity.da >= 0.85, "default DA accuracy below 0.85");
  c.require(identity.state >= 0.85, "default state accuracy below 0.85");
  c.require(identity.intent >= 0.90, "default intent agreement below 0.90");
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MUSIM_CLI_PATH) + " --quiet " + args;
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void c7_determinism(Check& c) {
  const fs::path root = fs::temp_directory_path() / "musim-acceptance";
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    const std::string d = dir.string() + "/";
    int rc = run_cli("generate --out " + d + "c.jsonl --records 693 --dialogues 96 "
                     "--noise 0.2 --seed 41");
    rc |= run_cli("augment --in " + d + "c.jsonl --out " + d +
                  "aug.jsonl --preset paper-profile --seed 17");
    rc |= run_cli("split --in " + d + "aug.jsonl --train-out " + d + "train.jsonl --val-out " +
                  d + "val.jsonl --test-out " + d + "test.jsonl --seed 5");
    rc |= run_cli("train --train " + d + "train.jsonl --val " + d + "val.jsonl --out " + d +
                  "model.bin --report " + d + "train.csv --seed 7");
    rc |= run_cli("eval --model " + d + "model.bin --test " + d + "test.jsonl --format csv "
                  "--out " + d + "eval.csv");
    c.require(rc == 0, "quickstart run failed");
    if (rc != 0) return;
  }
  c.require(slurp(root / "a" / "model.bin") == slurp(root / "b" / "model.bin"),
            "model files differ");
  c.require(slurp(root / "a" / "eval.csv") == slurp(root / "b" / "eval.csv"),
            "eval reports differ");
  c.require(slurp(root / "a" / "train.csv") == slurp(root / "b" / "train.csv"),
            "train reports differ");
  c.require(!slurp(root / "a" / "model.bin").empty(), "empty model file");
  fs::remove_all(root);
}

void c8_kappa(Check& c) {
  const std::vector<int> same = {1, 2, 3, 4};
  c.require(cohens_kappa(same, same) == 1.0, "identical lists");
  const std::vector<int> a = {1, 1, 0, 0};
  const std::vector<int> b = {1, 0, 0, 1};
  c.require(std::abs(cohens_kappa(a, b)) < 1e-15, "hand-computed zero case");
  const std::vector<int> x = {0, 1, 0, 1};
  const std::vector<int> y = {1, 0, 1, 0};
  c.require(std::abs(cohens_kappa(x, y) + 1.0) < 1e-15, "perfect disagreement");
}

void c9_environment(Check& c) {
  OraclePolicy policy;

  int successes = 0;
  bool rewardsExact = true;
  for (int e = 0; e < 1000; ++e) {
    EnvConfig cfg;
    Env env(cfg, policy);
    Rng rng(static_cast<std::uint64_t>(e) + 1);
    CooperativeHel hel(0.0);
    hel.start_episode();
    env.reset(sample_goal(rng));
    while (!env.session().done && env.session().steps < 25) {
      const Session& s = env.session();
      const HelView view{s.belief, s.utteredOT, s.utteredL, s.goal, s.prevEldMove};
      env.step(hel.next(view, rng));
    }
    const Session& s = env.session();
    if (s.outcome == Outcome::Success && s.steps <= 20) ++successes;
    rewardsExact = rewardsExact && s.totalReward == 1.0 + (-0.01) * s.steps;
  }
  c.require(successes == 1000, std::to_string(successes) + "/1000 cooperative successes");
  c.require(rewardsExact, "cooperative rewards not exact");

  int timeouts = 0;
  for (int e = 0; e < 1000; ++e) {
    EnvConfig cfg;
    Env env(cfg, policy);
    Rng rng(static_cast<std::uint64_t>(e) + 5000);
    AdversarialHel hel;
    env.reset(sample_goal(rng));
    while (!env.session().done) {
      const Session& s = env.session();
      const HelView view{s.belief, s.utteredOT, s.utteredL, s.goal, s.prevEldMove};
      env.step(hel.next(view, rng));
    }
    if (env.session().outcome == Outcome::Timeout && env.session().steps == 40) ++timeouts;
  }
  c.require(timeouts == 1000, std::to_string(timeouts) + "/1000 adversarial timeouts");

  // ten concurrent protocol sessions
  EnvConfig cfg;
  Server server(cfg, policy);
  server.bind("127.0.0.1", 0);
  std::thread serverThread([&server] { server.run(); });
  std::vector<int> ok(10, 0);
  std::vector<std::thread> clients;
  for (int ci = 0; ci < 10; ++ci) {
    clients.emplace_back([ci, &ok, port = server.port()] {
      const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
      if (fd < 0) return;
      sockaddr_in addr{};
      addr.sin_family = AF_INET;
      addr.sin_port = htons(static_cast<std::uint16_t>(port));
      ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
      if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        return;
      }
      std::string buffer;
      auto request = [&](const std::string& line) {
        const std::string out = line + "\n";
        if (::send(fd, out.data(), out.size(), 0) != static_cast<ssize_t>(out.size())) {
          return nlohmann::json();
        }
        for (;;) {
          const auto nl = buffer.find('\n');
          if (nl != std::string::npos) {
            const std::string reply = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            return nlohmann::json::parse(reply, nullptr, false);
          }
          char chunk[2048];
          const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
          if (n <= 0) return nlohmann::json();
          buffer.append(chunk, static_cast<std::size_t>(n));
        }
      };
      const std::string type = "cup" + std::to_string(ci);
      const std::string id = type + "-a";
      const std::string loc = "shelf" + std::to_string(ci);
      auto r = request(R"({"type":"reset","goal":{"objectType":")" + type +
                       R"(","location":")" + loc + R"(","objectId":")" + id + R"("}})");
      r = request(
          R"({"type":"hel_move","da":8,"action":3,"pointing":{"kind":"object","id":")" + id +
          R"(","objectType":")" + type + R"("}})");
      if (r.value("da", -1) != 6) return;
      r = request(R"({"type":"hel_move","da":3,"action":2})");
      r = request(
          R"({"type":"hel_move","da":8,"action":4,"pointing":{"kind":"location","id":")" +
          loc + R"("}})");
      if (r.value("da", -1) != 6) return;
      r = request(R"({"type":"hel_move","da":0,"action":4,"ho":{"kind":"location","id":")" +
                  loc + R"(","hoType":0}})");
      r = request(R"({"type":"hel_move","da":8,"action":5,"ho":{"kind":"object","id":")" + id +
                  R"(","objectType":")" + type + R"(","hoType":3}})");
      r = request(R"({"type":"hel_move","da":11,"action":0})");
      if (r.value("type", "") == "episode_end" && r.value("outcome", "") == "success") {
        ok[static_cast<std::size_t>(ci)] = 1;
      }
      ::close(fd);
    });
  }
  for (auto& t : clients) t.join();
  server.stop();
  serverThread.join();
  int okCount = 0;
  for (int v : ok) okCount += v;
  c.require(okCount == 10, std::to_string(okCount) + "/10 concurrent sessions succeeded");
}

void c10_loss_analytics(Check& c) {
  TrainConfig cfg;
  cfg.hidden1 = 4;
  cfg.hidden2 = 4;
  Mlp m = init(cfg);
  for (auto* v : {&m.l1.w, &m.l2.w, &m.l3.w, &m.l1.b, &m.l2.b, &m.l3.b}) {
    std::fill(v->begin(), v->end(), 0.0);
  }
  EncodedInput x;
  const double uniform = loss(forward(m, x), TargetLabels{1, 2, 3});
  const double expected = std::log(7.0) + std::log(14.0) + std::log(13.0);
  c.require(std::abs(uniform - expected) < 1e-9, "uniform-head loss");

  Mlp scalar = init(cfg);
  const double before = scalar.l1.w[0];
  Gradients g;
  g.w1.assign(scalar.l1.w.size(), 0.0);
  g.b1.assign(scalar.l1.b.size(), 0.0);
  g.w2.assign(scalar.l2.w.size(), 0.0);
  g.b2.assign(scalar.l2.b.size(), 0.0);
  g.w3.assign(scalar.l3.w.size(), 0.0);
  g.b3.assign(scalar.l3.b.size(), 0.0);
  g.w1[0] = -1.25;
  AdamState state;
  adam_step(scalar, g, state, cfg);
  const double closedForm =
      before - cfg.learningRate * (-1.25) / (std::abs(-1.25) + cfg.adamEpsilon);
  c.require(std::abs(scalar.l1.w[0] - closedForm) < 1e-12, "first Adam step");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {"pipeline counts (693 -> 1932 -> 1548/183/201)", c1_pipeline_counts},
      {"belief-state algebra (13/27 + transition closure)", c2_belief_algebra},
      {"feature schema (golden vectors + fuzz)", c3_feature_schema},
      {"oracle conformance over all valid inputs", c4_oracle_conformance},
      {"analytic gradients vs finite differences", c5_gradient_check},
      {"training soundness (accuracy + intent agreement)", c6_training_soundness},
      {"quickstart determinism (byte-identical artifacts)", c7_determinism},
      {"Cohen's kappa unit values", c8_kappa},
      {"environment liveness (episodes + concurrent sessions)", c9_environment},
      {"loss analytics (uniform loss + Adam closed form)", c10_loss_analytics},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].fn(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    failures += check.pass ? 0 : 1;
    std::printf("[%s] %2zu. %s%s%s\n", check.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                check.detail.str().empty() ? "" : " -- ", check.detail.str().c_str());
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
