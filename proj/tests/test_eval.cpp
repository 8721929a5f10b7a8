#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "musim/corpus.hpp"
#include "musim/eval.hpp"
#include "musim/util.hpp"

using namespace musim;

namespace {

Mlp zero_model() {
  TrainConfig cfg;
  cfg.hidden1 = 8;
  cfg.hidden2 = 8;
  Mlp m = init(cfg);
  for (auto* v : {&m.l1.w, &m.l2.w, &m.l3.w, &m.l1.b, &m.l2.b, &m.l3.b}) {
    std::fill(v->begin(), v->end(), 0.0);
  }
  return m;
}

// tiny hand-made corpus: 3 pass records, 7 instruct records
Corpus tiny_corpus() {
  Corpus c;
  WorldGoal g;
  g.objectType = "bowl";
  g.location = "cabinet";
  g.object = TargetRef::object("bowl-small", "bowl");
  for (int i = 0; i < 10; ++i) {
    Record r;
    r.dialogueId = "d" + std::to_string(i);
    r.turnIndex = 0;
    r.input.goal = g;
    r.input.prevActor = Actor::Eld;
    r.input.prevEldAction = EldAction::GiveOT;
    r.input.prevEldDa = DialogueAct::Instruct;
    r.input.utteredOT = true;
    r.input.helAction = i < 3 ? HelAction::Acknowledge : HelAction::RequestL;
    r.input.helDa = i < 3 ? DialogueAct::Acknowledge : DialogueAct::QueryW;
    r.targets = i < 3 ? TargetLabels{0, 0, 0} : TargetLabels{2, 5, 3};
    c.records.push_back(std::move(r));
  }
  return c;
}

}  // namespace

TEST_CASE("cohen's kappa reference values") {
  const std::vector<int> same = {3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(cohens_kappa(same, same) == 1.0);

  const std::vector<int> a = {1, 1, 0, 0};
  const std::vector<int> b = {1, 0, 0, 1};
  CHECK(cohens_kappa(a, b) == doctest::Approx(0.0).epsilon(1e-15));

  const std::vector<int> c = {0, 1, 0, 1};
  const std::vector<int> d = {1, 0, 1, 0};
  CHECK(cohens_kappa(c, d) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("kappa is symmetric and handles the constant-agreement convention") {
  Rng rng(5);
  std::vector<int> a(50), b(50);
  for (int i = 0; i < 50; ++i) {
    a[static_cast<std::size_t>(i)] = rng.range(0, 3);
    b[static_cast<std::size_t>(i)] = rng.range(0, 3);
  }
  CHECK(cohens_kappa(a, b) == doctest::Approx(cohens_kappa(b, a)).epsilon(1e-15));
  CHECK(cohens_kappa(a, a) == 1.0);

  const std::vector<int> constant = {7, 7, 7};
  CHECK(cohens_kappa(constant, constant) == 1.0);  // p_e = 1, p_o = 1

  CHECK_THROWS_AS(cohens_kappa(std::vector<int>{}, std::vector<int>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cohens_kappa(std::vector<int>{1}, std::vector<int>{1, 2}),
                  std::invalid_argument);
}

TEST_CASE("a constant predictor scores exactly its label share") {
  const Corpus c = tiny_corpus();
  const EvalReport rep = evaluate(zero_model(), c);
  CHECK(rep.n == 10);
  CHECK(rep.overallAccuracy == doctest::Approx(0.3));
  CHECK(rep.actionAccuracy == doctest::Approx(0.3));
  CHECK(rep.daAccuracy == doctest::Approx(0.3));
  CHECK(rep.stateAccuracy == doctest::Approx(0.3));
  CHECK(rep.action.counts[0][0] == 3);
  CHECK(rep.action.counts[2][0] == 7);  // give-l records predicted as no-action
  CHECK(rep.action.row_sum(2) == 7);
}

TEST_CASE("overall accuracy never exceeds the per-head accuracies") {
  SynthConfig sc;
  sc.noise = 0.3;
  sc.dialogues = 25;
  sc.seed = 77;
  const Corpus c = synthesize_corpus(sc);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.hidden1 = 12;
    cfg.hidden2 = 8;
    cfg.activation = Activation::Tanh;
    const EvalReport rep = evaluate(init(cfg), c);
    CHECK(rep.overallAccuracy <= rep.actionAccuracy + 1e-12);
    CHECK(rep.overallAccuracy <= rep.daAccuracy + 1e-12);
    CHECK(rep.overallAccuracy <= rep.stateAccuracy + 1e-12);
  }
}

TEST_CASE("accuracy equals one minus the normalized hamming error") {
  SynthConfig sc;
  sc.noise = 0.2;
  sc.dialogues = 20;
  sc.seed = 13;
  const Corpus c = synthesize_corpus(sc);
  TrainConfig cfg;
  cfg.seed = 4;
  const Mlp m = init(cfg);
  const EvalReport rep = evaluate(m, c);

  std::vector<EncodedInput> xs;
  for (const Record& r : c.records) xs.push_back(encode_input(r.input));
  const auto preds = predict_batch(m, xs);
  int hamming = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    hamming += preds[i].eldAction != c.records[i].targets.eldAction;
  }
  CHECK(rep.actionAccuracy ==
        doctest::Approx(1.0 - hamming / static_cast<double>(preds.size())).epsilon(1e-12));
}

TEST_CASE("serial and parallel evaluation agree exactly") {
  SynthConfig sc;
  sc.noise = 0.3;
  sc.dialogues = 30;
  sc.seed = 14;
  const Corpus c = synthesize_corpus(sc);
  TrainConfig cfg;
  cfg.seed = 2;
  cfg.activation = Activation::Tanh;
  const Mlp m = init(cfg);
  const EvalReport serial = evaluate(m, c, kernels::Exec::Serial);
  const EvalReport parallel = evaluate(m, c, kernels::Exec::Parallel);
  CHECK(serial.overallAccuracy == parallel.overallAccuracy);
  CHECK(serial.action.counts == parallel.action.counts);
  CHECK(serial.da.counts == parallel.da.counts);
  CHECK(serial.state.counts == parallel.state.counts);
}

TEST_CASE("report rendering") {
  const EvalReport rep = evaluate(zero_model(), tiny_corpus());

  const std::string text = render_report(rep, ReportFormat::Text);
  CHECK(text.find("overall-accuracy=30.00%") != std::string::npos);
  // rows without support render as dashes
  CHECK(text.find("give-ot-l") != std::string::npos);
  CHECK(text.find("-") != std::string::npos);
  CHECK(render_report(rep, ReportFormat::Text) == text);  // byte-stable

  const std::string csv = render_report(rep, ReportFormat::Csv);
  const EvalReport back = parse_report_csv(csv);
  CHECK(back.n == rep.n);
  CHECK(back.action.counts == rep.action.counts);
  CHECK(back.da.counts == rep.da.counts);
  CHECK(back.state.counts == rep.state.counts);

  CHECK_THROWS_AS(report_format_from_string("yaml"), UnsupportedFormat);
}

TEST_CASE("confusion row percentages sum to one hundred") {
  const EvalReport rep = evaluate(zero_model(), tiny_corpus());
  for (std::size_t r = 0; r < rep.action.counts.size(); ++r) {
    const long long total = rep.action.row_sum(static_cast<int>(r));
    if (total == 0) continue;
    double pct = 0.0;
    for (long long v : rep.action.counts[r]) {
      pct += 100.0 * static_cast<double>(v) / static_cast<double>(total);
    }
    CHECK(pct == doctest::Approx(100.0).epsilon(1e-4));
  }
}

namespace {

struct PassPolicy final : EldPolicy {
  EldDecision respond(const InteractionContext& ctx) override {
    return {std::nullopt, ctx.prevBelief};
  }
};

}  // namespace

TEST_CASE("the oracle agrees with itself everywhere") {
  OraclePolicy oracle;
  const auto inputs = enumerate_valid_inputs();
  const AgreementReport rep = compare_to_oracle(oracle, inputs);
  CHECK(rep.n == static_cast<int>(inputs.size()));
  CHECK(rep.exactAgreement == 1.0);
  CHECK(rep.intentAgreement == 1.0);
  for (const SubtaskAgreement& s : rep.perSubtask) {
    CHECK(s.exact == s.n);
    CHECK(s.intent == s.n);
  }
}

TEST_CASE("a pass-everywhere policy matches only the no-move rows") {
  PassPolicy pass;
  const auto inputs = enumerate_valid_inputs();
  const AgreementReport rep = compare_to_oracle(pass, inputs);

  // only the location-verification row permits staying silent
  int passRows = 0;
  for (const InteractionContext& ctx : inputs) {
    const TableRow* row = find_row(classify_subtask(ctx), input_tuple(ctx));
    REQUIRE(row != nullptr);
    for (const TuplePattern& p : row->outputs) {
      if (!p.da) {
        ++passRows;
        break;
      }
    }
  }
  CHECK(rep.exactAgreement ==
        doctest::Approx(passRows / static_cast<double>(inputs.size())).epsilon(1e-12));
  CHECK(rep.exactAgreement < 0.5);
  CHECK(rep.intentAgreement >= rep.exactAgreement);

  const std::string text = render_agreement(rep, ReportFormat::Text);
  CHECK(render_agreement(rep, ReportFormat::Text) == text);
  CHECK(text.find("per-subtask") != std::string::npos);
}
