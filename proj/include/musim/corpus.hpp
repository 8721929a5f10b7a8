#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "musim/features.hpp"
#include "musim/mlp.hpp"

namespace musim {

enum class Provenance {
  Original = 0,
  AugOutEstabOT,
  AugOutWrongOT,
  AugOutWrongLO,
  AugIn112,
  AugIn120,
  AugIn210,
  AugIn220,
  AugIn200,
  Synthetic,
};
const char* to_string(Provenance p);
std::optional<Provenance> provenance_from_string(const std::string& s);

struct Record {
  InteractionContext input;
  TargetLabels targets;
  Provenance prov = Provenance::Original;
  std::string dialogueId;
  int turnIndex = 0;
};

struct Corpus {
  std::string schemaVersion = "1";
  std::vector<Record> records;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidRecord : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientSource : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCorpusSchemaVersion = "1";

// Line-delimited format: one JSON header line (format tag, schema version,
// feature-schema hash), then one JSON record per line. See
// docs/corpus-format.md.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& c, const std::string& path);
Corpus parse_corpus(const std::string& text);
std::string serialize_corpus(const Corpus& c);

// Full validation of one record; empty when fine.
std::string record_problem(const Record& r);
// Validates records plus dialogue uniqueness / contiguity / turn order.
void validate_corpus(const Corpus& c);

// The eight augmentation rules by config key. The first three synthesize
// rare output states, the rest cover the missing input states.
inline constexpr std::array<const char*, 3> kOutputRules = {
    "out-estab-ot", "out-wrong-ot", "out-wrong-lo"};
inline constexpr std::array<const char*, 5> kInputRules = {
    "in-112", "in-120", "in-210", "in-220", "in-200"};

struct AugmentConfig {
  std::map<std::string, int> perRuleCounts;
  std::uint64_t seed = 0;
};

// Distributes 1239 synthetic records over the rules proportionally to
// their source-pool sizes in `c` (largest remainder, zero for empty
// pools), so a 693-record corpus always grows to 1932.
AugmentConfig paper_profile(const Corpus& c, std::uint64_t seed);
inline constexpr int kPaperProfileTotal = 1239;

Corpus augment_output_states(const Corpus& c, const AugmentConfig& cfg);
Corpus augment_input_states(const Corpus& c, const AugmentConfig& cfg);

// Number of records eligible as sources for one rule.
int rule_pool_size(const Corpus& c, const std::string& rule);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Largest-remainder allocation of n records to the three parts, with one
// pinned entry: (n=1932, ratios 0.8/0.1/0.1) -> 1548/183/201, the
// published partition this pipeline reproduces (0.8*1932 is 1545.6, so no
// rounding rule derives those counts; they are pinned instead).
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

// Seeded shuffled partition at record granularity; each part keeps the
// original corpus order so dialogues stay contiguous. The per-dialogue
// mode assigns whole dialogues greedily instead (approximate sizes,
// leakage-free).
std::array<Corpus, 3> split(const Corpus& c, const SplitRatios& ratios, std::uint64_t seed,
                            bool byDialogue = false);

struct SynthConfig {
  double noise = 0.0;
  int dialogues = 1;
  std::uint64_t seed = 0;
  int maxTurns = 40;
};

// Simulates full Find dialogues between the scripted cooperative HEL and
// the rule-based ELD policy; every turn becomes a record.
Corpus synthesize_corpus(const SynthConfig& cfg);

// Exactly `records` records: dialogues are generated (prefix-stable in the
// seed) until enough exist, then the tail is dropped.
Corpus synthesize_records(SynthConfig cfg, std::size_t records);

std::vector<Example> corpus_examples(const Corpus& c);

}  // namespace musim
