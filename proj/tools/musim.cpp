#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "musim/corpus.hpp"
#include "musim/eval.hpp"
#include "musim/mlp.hpp"
#include "musim/oracle.hpp"
#include "musim/policy.hpp"
#include "musim/protocol.hpp"
#include "musim/server.hpp"
#include "musim/util.hpp"

namespace {

using namespace musim;

bool g_quiet = false;

void log_line(const std::string& s) {
  if (!g_quiet) std::cerr << s << "\n";
}

// every run logs the fully resolved configuration for reproducibility
void log_config(const CLI::App* cmd) {
  if (g_quiet) return;
  std::ostringstream out;
  out << "config: " << cmd->get_name();
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->get_name().rfind("--", 0) != 0) continue;
    const auto& results = opt->results();
    if (results.empty()) continue;
    out << " " << opt->get_name() << "=";
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (i) out << ",";
      out << results[i];
    }
  }
  std::cerr << out.str() << "\n";
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  atomic_write_file(path, content);
}

SplitRatios parse_ratios(const std::string& s) {
  SplitRatios r;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &r.train, &r.val, &r.test) != 3) {
    throw CLI::ValidationError("--ratios", "expected three comma-separated numbers");
  }
  return r;
}

std::map<std::string, int> parse_rule_counts(const std::string& s) {
  std::map<std::string, int> counts;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--rule-counts", "expected rule=count pairs");
    }
    const std::string name = item.substr(0, eq);
    bool known = false;
    for (const char* n : kOutputRules) known = known || name == n;
    for (const char* n : kInputRules) known = known || name == n;
    if (!known) throw CLI::ValidationError("--rule-counts", "unknown rule: " + name);
    counts[name] = std::stoi(item.substr(eq + 1));
  }
  return counts;
}

struct PolicyChoice {
  std::string modelPath;
  bool oracle = false;

  std::unique_ptr<EldPolicy> make() const {
    if (oracle) return std::make_unique<OraclePolicy>();
    return std::make_unique<ModelPolicy>(load_model(modelPath));
  }
};

void add_policy_flags(CLI::App* cmd, PolicyChoice& choice) {
  auto* model = cmd->add_option("--model", choice.modelPath, "trained model file to play ELD");
  auto* oracle = cmd->add_flag("--oracle", choice.oracle, "let the rule-based policy play ELD");
  model->excludes(oracle);
  oracle->excludes(model);
  const std::string name = cmd->get_name();
  cmd->callback([&choice, name]() {
    if (!choice.oracle && choice.modelPath.empty()) {
      throw CLI::RequiredError(name + " needs --model or --oracle");
    }
  });
}

int cmd_generate(const std::string& out, int dialogues, int records, double noise,
                 std::uint64_t seed, int maxTurns) {
  SynthConfig cfg;
  cfg.dialogues = dialogues;
  cfg.noise = noise;
  cfg.seed = seed;
  cfg.maxTurns = maxTurns;
  const Corpus c =
      records > 0 ? synthesize_records(cfg, static_cast<std::size_t>(records))
                  : synthesize_corpus(cfg);
  save_corpus(c, out);
  log_line("generated " + std::to_string(c.records.size()) + " records -> " + out);
  return 0;
}

int cmd_augment(const std::string& in, const std::string& out, bool preset,
                const std::string& ruleCounts, std::uint64_t seed) {
  const Corpus c = load_corpus(in);
  AugmentConfig cfg;
  cfg.seed = seed;
  if (preset) {
    cfg = paper_profile(c, seed);
    std::ostringstream resolved;
    resolved << "paper-profile counts:";
    for (const auto& [name, count] : cfg.perRuleCounts) resolved << " " << name << "=" << count;
    log_line(resolved.str());
  } else {
    cfg.perRuleCounts = parse_rule_counts(ruleCounts);
  }
  Corpus result = augment_output_states(c, cfg);
  result = augment_input_states(result, cfg);
  save_corpus(result, out);
  log_line("augmented " + std::to_string(c.records.size()) + " -> " +
           std::to_string(result.records.size()) + " records -> " + out);
  return 0;
}

int cmd_split(const std::string& in, const std::string& trainOut, const std::string& valOut,
              const std::string& testOut, const std::string& ratios, std::uint64_t seed,
              bool byDialogue) {
  const Corpus c = load_corpus(in);
  const auto parts = split(c, parse_ratios(ratios), seed, byDialogue);
  save_corpus(parts[0], trainOut);
  save_corpus(parts[1], valOut);
  save_corpus(parts[2], testOut);
  log_line("split " + std::to_string(c.records.size()) + " -> " +
           std::to_string(parts[0].records.size()) + "/" +
           std::to_string(parts[1].records.size()) + "/" +
           std::to_string(parts[2].records.size()));
  return 0;
}

std::string train_report_csv(const TrainReport& report) {
  std::ostringstream out;
  out << "epoch,trainLoss,valLoss,valActionAcc,valDaAcc,valStateAcc\n";
  char buf[160];
  for (const EpochStats& e : report.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", e.epoch, e.trainLoss,
                  e.valLoss, e.valActionAcc, e.valDaAcc, e.valStateAcc);
    out << buf;
  }
  out << "bestEpoch," << report.bestEpoch << "\n";
  out << "stoppedAtEpoch," << report.stoppedAtEpoch << "\n";
  return out.str();
}

int cmd_train(const std::string& trainPath, const std::string& valPath,
              const std::string& modelOut, const std::string& reportOut,
              const std::string& activation, const std::string& hidden, int epochs,
              int patience, double lr, int batch, double dropout, std::uint64_t seed) {
  TrainConfig cfg;
  const auto act = activation_from_string(activation);
  if (!act) throw CLI::ValidationError("--activation", "expected identity, tanh or relu");
  cfg.activation = *act;
  if (std::sscanf(hidden.c_str(), "%d,%d", &cfg.hidden1, &cfg.hidden2) != 2 ||
      cfg.hidden1 <= 0 || cfg.hidden2 <= 0) {
    throw CLI::ValidationError("--hidden", "expected two comma-separated widths");
  }
  cfg.maxEpochs = epochs;
  cfg.patience = patience;
  cfg.learningRate = lr;
  cfg.batchSize = batch;
  cfg.dropoutRate = dropout;
  cfg.seed = seed;

  const auto trainSet = corpus_examples(load_corpus(trainPath));
  const auto valSet = corpus_examples(load_corpus(valPath));
  TrainResult result = train(trainSet, valSet, cfg);
  for (const EpochStats& e : result.report.epochs) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "epoch %3d  train %.4f  val %.4f  acc %.3f/%.3f/%.3f",
                  e.epoch, e.trainLoss, e.valLoss, e.valActionAcc, e.valDaAcc, e.valStateAcc);
    log_line(buf);
  }
  log_line("best epoch " + std::to_string(result.report.bestEpoch) + ", stopped at " +
           std::to_string(result.report.stoppedAtEpoch));
  save_model(result.model, modelOut);
  if (!reportOut.empty()) write_output(reportOut, train_report_csv(result.report));
  return 0;
}

int cmd_eval(const std::string& modelPath, const std::string& testPath,
             const std::string& format, const std::string& out, double minAccuracy) {
  const Mlp model = load_model(modelPath);
  const Corpus test = load_corpus(testPath);
  const EvalReport report = evaluate(model, test);
  write_output(out, render_report(report, report_format_from_string(format)));
  if (report.overallAccuracy < minAccuracy) {
    std::cerr << "overall accuracy " << report.overallAccuracy << " below threshold "
              << minAccuracy << "\n";
    return 1;
  }
  return 0;
}

int cmd_compare(const PolicyChoice& choice, const std::string& format, const std::string& out) {
  const auto policy = choice.make();
  const auto inputs = enumerate_valid_inputs();
  const AgreementReport report = compare_to_oracle(*policy, inputs);
  write_output(out, render_agreement(report, report_format_from_string(format)));
  return 0;
}

Server* g_server = nullptr;
void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int cmd_serve(const PolicyChoice& choice, const std::string& addr, bool stdio, int maxTurns,
              std::uint64_t seed) {
  EnvConfig cfg;
  cfg.maxTurns = maxTurns;
  cfg.seed = seed;
  const auto policy = choice.make();
  Server server(cfg, *policy);
  if (stdio) {
    server.run_stdio();
    return 0;
  }
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--addr", "expected host:port");
  const std::string host = addr.substr(0, colon);
  const int port = std::stoi(addr.substr(colon + 1));
  server.bind(host, port);
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  log_line("listening on " + host + ":" + std::to_string(server.port()));
  server.run();
  g_server = nullptr;
  return 0;
}

void print_eld_move(const Env& env, const std::optional<Move>& move) {
  const Session& s = env.session();
  std::ostringstream out;
  if (move) {
    out << "ELD: " << to_string(move->da) << " / "
        << to_string(move->eldAction.value_or(EldAction::NoAction));
    if (move->uttersOT) out << " [utters object type]";
    if (move->uttersL) out << " [utters location]";
  } else {
    out << "ELD passes";
  }
  out << "   belief=" << to_string(s.belief) << " turn=" << s.turn;
  std::cout << out.str() << "\n";
}

int cmd_play(const PolicyChoice& choice, std::uint64_t seed, int maxTurns) {
  EnvConfig cfg;
  cfg.maxTurns = maxTurns;
  cfg.seed = seed;
  const auto policy = choice.make();
  Env env(cfg, *policy);

  auto goalRef = [&env](const std::string& status, bool object) {
    const WorldGoal& g = env.session().goal;
    if (object) {
      if (status == "wrong") return TargetRef::object(g.objectType + "x-1", g.objectType + "x");
      if (status == "rtwi") return TargetRef::object(g.object.id + "-other", g.objectType);
      return g.object;
    }
    return TargetRef::location(status == "wrong" ? g.location + "x" : g.location);
  };

  std::cout << "interactive Find episode; you are HEL. commands:\n"
               "  request-ot | request-l | ack | found | not-found\n"
               "  verify-ot correct|wrong|rtwi     (pointing gesture)\n"
               "  verify-l correct|wrong | open correct|wrong\n"
               "  verify-o correct|wrong|rtwi      (takes object out)\n"
               "  goal | reset | quit\n";
  auto rr = env.reset();
  print_eld_move(env, rr.openingMove);

  std::string line;
  while (std::cout << "hel> " << std::flush, std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::string cmd, arg;
    in >> cmd >> arg;
    if (cmd.empty()) continue;
    if (cmd == "quit") break;
    if (cmd == "goal") {
      const WorldGoal& g = env.session().goal;
      std::cout << "goal: " << g.object.id << " (" << g.objectType << ") in " << g.location
                << "\n";
      continue;
    }
    if (cmd == "reset") {
      rr = env.reset();
      print_eld_move(env, rr.openingMove);
      continue;
    }

    Move m;
    m.actor = Actor::Hel;
    if (cmd == "request-ot") {
      m.helAction = HelAction::RequestOT;
      m.da = DialogueAct::QueryW;
    } else if (cmd == "request-l") {
      m.helAction = HelAction::RequestL;
      m.da = DialogueAct::QueryW;
    } else if (cmd == "ack") {
      m.helAction = HelAction::Acknowledge;
      m.da = DialogueAct::Acknowledge;
    } else if (cmd == "found") {
      m.helAction = HelAction::NoAction;
      m.da = DialogueAct::StateY;
    } else if (cmd == "not-found") {
      m.helAction = HelAction::NoAction;
      m.da = DialogueAct::StateN;
    } else if (cmd == "verify-ot") {
      m.helAction = HelAction::VerifyOT;
      m.da = DialogueAct::Check;
      m.pointing = PointingEvent{goalRef(arg, true)};
    } else if (cmd == "verify-l") {
      m.helAction = HelAction::VerifyL;
      m.da = DialogueAct::Check;
      m.pointing = PointingEvent{goalRef(arg, false)};
    } else if (cmd == "open") {
      m.helAction = HelAction::VerifyL;
      m.da = DialogueAct::NoUtterance;
      m.ho = HapticOstensiveEvent{goalRef(arg, false), HoType::OpenLocation};
    } else if (cmd == "verify-o") {
      m.helAction = HelAction::VerifyO;
      m.da = DialogueAct::Check;
      m.ho = HapticOstensiveEvent{goalRef(arg, true), HoType::TakeOutObject};
    } else {
      std::cout << "unknown command: " << cmd << "\n";
      continue;
    }

    try {
      const auto sr = env.step(m);
      print_eld_move(env, sr.eldMove);
      if (sr.done) {
        std::cout << "episode over: " << to_string(*sr.outcome)
                  << " totalReward=" << env.session().totalReward
                  << " (reset to go again)\n";
      }
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return 0;
}

int cmd_docs(const std::string& outDir) {
  atomic_write_file(outDir + "/oracle-tables.md", render_oracle_tables());
  std::ostringstream schema;
  schema << "# Feature schema\n\n"
         << "This file is generated by the `docs` command; edit the code, not the file.\n\n"
         << "76 binary features, laid out as `name:offset:width`:\n\n```\n"
         << render_feature_schema() << "```\n\n"
         << "hash: `" << hex_u64(feature_schema_hash()) << "` (embedded in corpus headers\n"
         << "and model files; loading fails on a mismatch).\n\n"
         << "Block semantics:\n\n"
         << "- prev-actor: (1,0) previous move was ELD's, (0,1) HEL's, (0,0) trial start.\n"
         << "- uttered-ot / uttered-l: ELD has uttered the object type / location so far.\n"
         << "- belief: one-hot over the 13 valid belief states in canonical order.\n"
         << "- pointing: [location-target, object-target, correct, wrong,\n"
         << "  right-type-wrong-instance]; all zeros when no gesture happened.\n"
         << "- ho: pointing layout for the target plus a one-hot over\n"
         << "  [open-location, close-location, touch, take-out-object, hold-object].\n"
         << "- hel-action, hel-da, prev-eld-action, prev-eld-da: one-hot over the\n"
         << "  canonical enum orders.\n";
  atomic_write_file(outDir + "/feature-schema.md", schema.str());
  log_line("wrote " + outDir + "/oracle-tables.md and " + outDir + "/feature-schema.md");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"musim - multimodal user simulator for the collaborative Find task"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value config file; flags override it");
  app.add_flag("--quiet", g_quiet, "suppress progress logging");

  auto* gen = app.add_subcommand("generate", "synthesize a corpus of scripted Find dialogues");
  std::string genOut;
  int genDialogues = 100;
  int genRecords = 0;
  double genNoise = 0.0;
  std::uint64_t genSeed = 0;
  int genMaxTurns = 40;
  gen->add_option("--out", genOut, "corpus file to write")->required();
  gen->add_option("--dialogues", genDialogues, "number of dialogues");
  gen->add_option("--records", genRecords, "truncate to exactly this many records");
  gen->add_option("--noise", genNoise, "per-turn HEL mistake probability");
  gen->add_option("--seed", genSeed, "RNG seed")->envname("MUSIM_SEED");
  gen->add_option("--max-turns", genMaxTurns, "turn limit per dialogue");

  auto* aug = app.add_subcommand("augment", "append rule-based synthetic records");
  std::string augIn, augOut, augPreset, augCounts;
  std::uint64_t augSeed = 0;
  aug->add_option("--in", augIn, "input corpus")->required();
  aug->add_option("--out", augOut, "output corpus")->required();
  aug->add_option("--preset", augPreset, "named count preset (paper-profile)")
      ->check(CLI::IsMember({"paper-profile"}));
  aug->add_option("--rule-counts", augCounts, "explicit rule=count list");
  aug->add_option("--seed", augSeed, "RNG seed")->envname("MUSIM_SEED");

  auto* spl = app.add_subcommand("split", "deterministic train/val/test partition");
  std::string splIn, splTrain, splVal, splTest, splRatios = "0.8,0.1,0.1";
  std::uint64_t splSeed = 0;
  bool splByDialogue = false;
  spl->add_option("--in", splIn, "input corpus")->required();
  spl->add_option("--train-out", splTrain, "train corpus file")->required();
  spl->add_option("--val-out", splVal, "validation corpus file")->required();
  spl->add_option("--test-out", splTest, "test corpus file")->required();
  spl->add_option("--ratios", splRatios, "train,val,test ratios");
  spl->add_option("--seed", splSeed, "RNG seed")->envname("MUSIM_SEED");
  spl->add_flag("--by-dialogue", splByDialogue, "split whole dialogues (approximate sizes)");

  auto* trn = app.add_subcommand("train", "train the three-head classifier");
  std::string trnTrain, trnVal, trnOut, trnReport;
  std::string trnActivation = "identity", trnHidden = "64,32";
  int trnEpochs = 100, trnPatience = 10, trnBatch = 32;
  double trnLr = 1e-3, trnDropout = 0.2;
  std::uint64_t trnSeed = 0;
  trn->add_option("--train", trnTrain, "training corpus")->required();
  trn->add_option("--val", trnVal, "validation corpus")->required();
  trn->add_option("--out", trnOut, "model file to write")->required();
  trn->add_option("--report", trnReport, "per-epoch CSV report file");
  trn->add_option("--activation", trnActivation, "identity|tanh|relu");
  trn->add_option("--hidden", trnHidden, "hidden widths h1,h2");
  trn->add_option("--epochs", trnEpochs, "max epochs");
  trn->add_option("--patience", trnPatience, "early-stopping patience");
  trn->add_option("--lr", trnLr, "Adam learning rate");
  trn->add_option("--batch", trnBatch, "mini-batch size");
  trn->add_option("--dropout", trnDropout, "dropout rate");
  trn->add_option("--seed", trnSeed, "RNG seed")->envname("MUSIM_SEED");

  auto* evl = app.add_subcommand("eval", "accuracy and confusion matrices on a test corpus");
  std::string evlModel, evlTest, evlFormat = "text", evlOut = "-";
  double evlMin = 0.0;
  evl->add_option("--model", evlModel, "model file")->required();
  evl->add_option("--test", evlTest, "test corpus")->required();
  evl->add_option("--format", evlFormat, "text|csv");
  evl->add_option("--out", evlOut, "output file ('-' = stdout)");
  evl->add_option("--min-accuracy", evlMin, "fail (exit 1) when overall accuracy is lower");

  auto* cmp = app.add_subcommand(
      "compare", "agreement with the rule-based policy over all valid inputs");
  PolicyChoice cmpChoice;
  std::string cmpFormat = "text", cmpOut = "-";
  add_policy_flags(cmp, cmpChoice);
  cmp->add_option("--format", cmpFormat, "text|csv");
  cmp->add_option("--out", cmpOut, "output file ('-' = stdout)");

  auto* srv = app.add_subcommand("serve", "run the episode server (line protocol)");
  PolicyChoice srvChoice;
  std::string srvAddr = "127.0.0.1:7071";
  bool srvStdio = false;
  int srvMaxTurns = 40;
  std::uint64_t srvSeed = 0;
  add_policy_flags(srv, srvChoice);
  srv->add_option("--addr", srvAddr, "listen address host:port");
  srv->add_flag("--stdio", srvStdio, "single session over stdin/stdout");
  srv->add_option("--max-turns", srvMaxTurns, "HEL moves per episode");
  srv->add_option("--seed", srvSeed, "RNG seed for sampled goals")->envname("MUSIM_SEED");

  auto* ply = app.add_subcommand("play", "interactive debug episode on the terminal");
  PolicyChoice plyChoice;
  std::uint64_t plySeed = 0;
  int plyMaxTurns = 40;
  add_policy_flags(ply, plyChoice);
  ply->add_option("--seed", plySeed, "RNG seed for the sampled goal")->envname("MUSIM_SEED");
  ply->add_option("--max-turns", plyMaxTurns, "HEL moves per episode");

  auto* doc = app.add_subcommand("docs", "regenerate the generated documentation files");
  std::string docDir = "docs";
  doc->add_option("--out-dir", docDir, "directory for generated docs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    const CLI::App* cmd = app.get_subcommands().front();
    log_config(cmd);
    if (cmd == gen) {
      return cmd_generate(genOut, genDialogues, genRecords, genNoise, genSeed, genMaxTurns);
    }
    if (cmd == aug) {
      if (augPreset.empty() == augCounts.empty()) {
        std::cerr << "augment needs exactly one of --preset / --rule-counts\n";
        return 2;
      }
      return cmd_augment(augIn, augOut, !augPreset.empty(), augCounts, augSeed);
    }
    if (cmd == spl) {
      return cmd_split(splIn, splTrain, splVal, splTest, splRatios, splSeed, splByDialogue);
    }
    if (cmd == trn) {
      return cmd_train(trnTrain, trnVal, trnOut, trnReport, trnActivation, trnHidden,
                       trnEpochs, trnPatience, trnLr, trnBatch, trnDropout, trnSeed);
    }
    if (cmd == evl) return cmd_eval(evlModel, evlTest, evlFormat, evlOut, evlMin);
    if (cmd == cmp) return cmd_compare(cmpChoice, cmpFormat, cmpOut);
    if (cmd == srv) return cmd_serve(srvChoice, srvAddr, srvStdio, srvMaxTurns, srvSeed);
    if (cmd == ply) return cmd_play(plyChoice, plySeed, plyMaxTurns);
    if (cmd == doc) return cmd_docs(docDir);
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
