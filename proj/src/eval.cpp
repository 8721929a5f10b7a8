#include "musim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

namespace musim {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labelNames)
    : labels(std::move(labelNames)) {
  counts.assign(labels.size(), std::vector<long long>(labels.size(), 0));
}

void ConfusionMatrix::add(int truth, int predicted) {
  counts.at(static_cast<std::size_t>(truth)).at(static_cast<std::size_t>(predicted)) += 1;
}

long long ConfusionMatrix::row_sum(int row) const {
  long long s = 0;
  for (long long v : counts[static_cast<std::size_t>(row)]) s += v;
  return s;
}

namespace {

std::vector<std::string> action_labels() {
  std::vector<std::string> v;
  for (int i = 0; i < kNumEldActions; ++i) v.emplace_back(to_string(static_cast<EldAction>(i)));
  return v;
}
std::vector<std::string> da_labels() {
  std::vector<std::string> v;
  for (int i = 0; i < kNumDialogueActs; ++i) v.emplace_back(to_string(static_cast<DialogueAct>(i)));
  return v;
}
std::vector<std::string> state_labels() {
  std::vector<std::string> v;
  for (const BeliefState& b : kBeliefStates) {
    // compact comma-free form so the CSV stays trivially parseable
    v.push_back(std::to_string(b.ot) + std::to_string(b.loc) + std::to_string(b.obj));
  }
  return v;
}

}  // namespace

EvalReport evaluate(const Mlp& model, const Corpus& test, kernels::Exec exec) {
  if (test.records.empty()) throw std::invalid_argument("evaluate: empty test corpus");

  std::vector<EncodedInput> xs;
  xs.reserve(test.records.size());
  for (const Record& r : test.records) xs.push_back(encode_input(r.input));
  const auto preds = predict_batch(model, xs, exec);

  EvalReport rep;
  rep.n = static_cast<int>(test.records.size());
  rep.action = ConfusionMatrix(action_labels());
  rep.da = ConfusionMatrix(da_labels());
  rep.state = ConfusionMatrix(state_labels());

  int okAll = 0, okA = 0, okD = 0, okS = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const TargetLabels& t = test.records[i].targets;
    const TargetLabels& p = preds[i];
    rep.action.add(t.eldAction, p.eldAction);
    rep.da.add(t.eldDa, p.eldDa);
    rep.state.add(t.nextBelief, p.nextBelief);
    const bool a = t.eldAction == p.eldAction;
    const bool d = t.eldDa == p.eldDa;
    const bool s = t.nextBelief == p.nextBelief;
    okA += a;
    okD += d;
    okS += s;
    okAll += a && d && s;
  }
  const double n = static_cast<double>(rep.n);
  rep.overallAccuracy = okAll / n;
  rep.actionAccuracy = okA / n;
  rep.daAccuracy = okD / n;
  rep.stateAccuracy = okS / n;
  return rep;
}

double cohens_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("cohens_kappa: sequences must have equal nonzero length");
  }
  const std::size_t n = a.size();
  long long same = 0;
  std::unordered_map<int, long long> ca, cb;
  for (std::size_t i = 0; i < n; ++i) {
    same += a[i] == b[i];
    ca[a[i]] += 1;
    cb[b[i]] += 1;
  }
  // integer-exact chance agreement check: sum(na*nb) == n^2 iff p_e == 1
  long long sumProd = 0;
  for (const auto& [label, na] : ca) {
    const auto it = cb.find(label);
    if (it != cb.end()) sumProd += na * it->second;
  }
  const long long n2 = static_cast<long long>(n) * static_cast<long long>(n);
  if (sumProd == n2) {
    if (same == static_cast<long long>(n)) return 1.0;
    throw DegenerateMarginals("chance agreement is 1 but observed agreement is not");
  }
  const double po = static_cast<double>(same) / static_cast<double>(n);
  const double pe = static_cast<double>(sumProd) / static_cast<double>(n2);
  return (po - pe) / (1.0 - pe);
}

AgreementReport compare_to_oracle(EldPolicy& policy,
                                  std::span<const InteractionContext> inputs) {
  if (inputs.empty()) throw std::invalid_argument("compare_to_oracle: no inputs");

  AgreementReport rep;
  rep.perSubtask.resize(kNumSubtasks);
  for (int s = 0; s < kNumSubtasks; ++s) {
    rep.perSubtask[static_cast<std::size_t>(s)].subtask = static_cast<PrimitiveSubtask>(s);
  }

  int exact = 0, intent = 0;
  for (const InteractionContext& ctx : inputs) {
    const PrimitiveSubtask subtask = classify_subtask(ctx);
    const TableRow* row = find_row(subtask, input_tuple(ctx));
    if (row == nullptr) {
      throw std::logic_error("enumerated input has no transition-table row");
    }
    const EldDecision decision = policy.respond(ctx);
    const bool exactOk = output_permitted(*row, output_tuple(decision.move));
    const Intent got = intent_of(decision.move);
    bool intentOk = false;
    for (const TuplePattern& p : row->outputs) {
      for (const Intent& allowed : pattern_intents(p)) {
        if (allowed == got) {
          intentOk = true;
          break;
        }
      }
      if (intentOk) break;
    }
    intentOk = intentOk || exactOk;

    exact += exactOk;
    intent += intentOk;
    auto& st = rep.perSubtask[static_cast<std::size_t>(subtask)];
    st.n += 1;
    st.exact += exactOk;
    st.intent += intentOk;
  }
  rep.n = static_cast<int>(inputs.size());
  rep.exactAgreement = exact / static_cast<double>(rep.n);
  rep.intentAgreement = intent / static_cast<double>(rep.n);
  return rep;
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "text") return ReportFormat::Text;
  if (s == "csv") return ReportFormat::Csv;
  throw UnsupportedFormat("unsupported report format: " + s);
}

namespace {

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

void render_matrix_text(std::ostringstream& out, const std::string& name,
                        const ConfusionMatrix& cm) {
  out << name << " confusion (row %, rows = true class):\n";
  std::size_t w = 4;
  for (const auto& l : cm.labels) w = std::max(w, l.size());
  out << std::string(w + 2, ' ');
  for (const auto& l : cm.labels) {
    out << l;
    out << std::string(w + 2 - l.size(), ' ');
  }
  out << "\n";
  for (std::size_t r = 0; r < cm.labels.size(); ++r) {
    out << cm.labels[r] << std::string(w + 2 - cm.labels[r].size(), ' ');
    const long long total = cm.row_sum(static_cast<int>(r));
    for (std::size_t c = 0; c < cm.labels.size(); ++c) {
      std::string cell = "-";
      if (total > 0) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f",
                      100.0 * static_cast<double>(cm.counts[r][c]) / static_cast<double>(total));
        cell = buf;
      }
      out << cell << std::string(w + 2 - cell.size(), ' ');
    }
    out << "\n";
  }
}

void render_matrix_csv(std::ostringstream& out, const std::string& name,
                       const ConfusionMatrix& cm) {
  for (std::size_t r = 0; r < cm.labels.size(); ++r) {
    for (std::size_t c = 0; c < cm.labels.size(); ++c) {
      if (cm.counts[r][c] != 0) {
        out << "cm," << name << "," << cm.labels[r] << "," << cm.labels[c] << ","
            << cm.counts[r][c] << "\n";
      }
    }
  }
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::Text) {
    out << "n=" << report.n << "\n";
    out << "overall-accuracy=" << pct(report.overallAccuracy) << "\n";
    out << "action-accuracy=" << pct(report.actionAccuracy) << "\n";
    out << "da-accuracy=" << pct(report.daAccuracy) << "\n";
    out << "state-accuracy=" << pct(report.stateAccuracy) << "\n";
    out << "\n";
    render_matrix_text(out, "action", report.action);
    out << "\n";
    render_matrix_text(out, "da", report.da);
    out << "\n";
    render_matrix_text(out, "state", report.state);
    return out.str();
  }
  char buf[64];
  out << "metric,value\n";
  out << "n," << report.n << "\n";
  auto metric = [&](const char* name, double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    out << name << "," << buf << "\n";
  };
  metric("overall", report.overallAccuracy);
  metric("action", report.actionAccuracy);
  metric("da", report.daAccuracy);
  metric("state", report.stateAccuracy);
  render_matrix_csv(out, "action", report.action);
  render_matrix_csv(out, "da", report.da);
  render_matrix_csv(out, "state", report.state);
  return out.str();
}

std::string render_agreement(const AgreementReport& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::Text) {
    out << "n=" << report.n << "\n";
    out << "exact-agreement=" << pct(report.exactAgreement) << "\n";
    out << "intent-agreement=" << pct(report.intentAgreement) << "\n";
    out << "per-subtask:\n";
    for (const SubtaskAgreement& s : report.perSubtask) {
      if (s.n == 0) {
        out << "  " << to_string(s.subtask) << " n=0\n";
        continue;
      }
      out << "  " << to_string(s.subtask) << " n=" << s.n
          << " exact=" << pct(s.exact / static_cast<double>(s.n))
          << " intent=" << pct(s.intent / static_cast<double>(s.n)) << "\n";
    }
    return out.str();
  }
  out << "subtask,n,exact,intent\n";
  out << "all," << report.n << "," << report.exactAgreement << "," << report.intentAgreement
      << "\n";
  for (const SubtaskAgreement& s : report.perSubtask) {
    out << to_string(s.subtask) << "," << s.n << "," << s.exact << "," << s.intent << "\n";
  }
  return out.str();
}

EvalReport parse_report_csv(const std::string& text) {
  EvalReport rep;
  rep.action = ConfusionMatrix(action_labels());
  rep.da = ConfusionMatrix(da_labels());
  rep.state = ConfusionMatrix(state_labels());

  auto label_index = [](const ConfusionMatrix& cm, const std::string& label) {
    const auto it = std::find(cm.labels.begin(), cm.labels.end(), label);
    if (it == cm.labels.end()) throw ParseError("unknown confusion label: " + label);
    return static_cast<int>(it - cm.labels.begin());
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "metric,value") continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string col;
    while (std::getline(ls, col, ',')) cols.push_back(col);
    if (cols.size() == 2) {
      const double v = std::stod(cols[1]);
      if (cols[0] == "n") rep.n = static_cast<int>(v);
      if (cols[0] == "overall") rep.overallAccuracy = v;
      if (cols[0] == "action") rep.actionAccuracy = v;
      if (cols[0] == "da") rep.daAccuracy = v;
      if (cols[0] == "state") rep.stateAccuracy = v;
    } else if (cols.size() == 5 && cols[0] == "cm") {
      ConfusionMatrix& cm = cols[1] == "action" ? rep.action
                            : cols[1] == "da"   ? rep.da
                                                : rep.state;
      cm.counts[static_cast<std::size_t>(label_index(cm, cols[2]))]
               [static_cast<std::size_t>(label_index(cm, cols[3]))] = std::stoll(cols[4]);
    } else {
      throw ParseError("unrecognized report line: " + line);
    }
  }
  return rep;
}

}  // namespace musim
