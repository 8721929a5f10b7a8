#pragma once

#include <span>
#include <string>
#include <vector>

#include "musim/corpus.hpp"
#include "musim/mlp.hpp"
#include "musim/oracle.hpp"
#include "musim/policy.hpp"

namespace musim {

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<long long>> counts;  // rows = true, cols = predicted

  explicit ConfusionMatrix(std::vector<std::string> labelNames = {});
  void add(int truth, int predicted);
  long long row_sum(int row) const;
};

struct EvalReport {
  int n = 0;
  double overallAccuracy = 0.0;  // all three heads simultaneously correct
  double actionAccuracy = 0.0;
  double daAccuracy = 0.0;
  double stateAccuracy = 0.0;
  ConfusionMatrix action{};
  ConfusionMatrix da{};
  ConfusionMatrix state{};
};

// Per-head accuracy and confusion matrices of the raw argmax predictions.
// Predictions run batched through the kernels; the aggregation is a fixed
// serial reduction so serial and parallel execution agree exactly.
EvalReport evaluate(const Mlp& model, const Corpus& test,
                    kernels::Exec exec = kernels::default_exec());

struct DegenerateMarginals : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Chance-corrected agreement of two label sequences. Chance agreement of
// exactly 1 with perfect observed agreement returns 1 by convention;
// chance agreement 1 with disagreements is an error.
double cohens_kappa(std::span<const int> a, std::span<const int> b);

struct SubtaskAgreement {
  PrimitiveSubtask subtask{};
  int n = 0;
  int exact = 0;
  int intent = 0;
};

struct AgreementReport {
  int n = 0;
  double exactAgreement = 0.0;   // response tuple inside the permitted set
  double intentAgreement = 0.0;  // response intent permitted by the set
  std::vector<SubtaskAgreement> perSubtask;
};

// Plays the policy against every enumerated valid input and scores its
// responses against the transition tables.
AgreementReport compare_to_oracle(EldPolicy& policy,
                                  std::span<const InteractionContext> inputs);

enum class ReportFormat { Text, Csv };
struct UnsupportedFormat : std::runtime_error {
  using std::runtime_error::runtime_error;
};
ReportFormat report_format_from_string(const std::string& s);

std::string render_report(const EvalReport& report, ReportFormat format);
std::string render_agreement(const AgreementReport& report, ReportFormat format);

// Re-reads the counts of a CSV eval report (round-trip check / CI use).
EvalReport parse_report_csv(const std::string& text);

}  // namespace musim
