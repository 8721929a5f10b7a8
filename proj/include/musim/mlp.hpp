#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "musim/features.hpp"
#include "musim/kernels.hpp"
#include "musim/util.hpp"

namespace musim {

enum class Activation { Identity, Tanh, Relu };

const char* to_string(Activation a);
std::optional<Activation> activation_from_string(const std::string& s);

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // row-major [out][in]
  std::vector<double> b;  // [out]

  bool operator==(const DenseLayer&) const = default;
};

// Three dense layers with an activation after the first two, one dropout
// layer (inverted scaling) after the second hidden activation, and a
// 34-unit output split into action(7) | DA(14) | state(13) heads.
struct Mlp {
  DenseLayer l1, l2, l3;
  Activation activation = Activation::Identity;
  double dropoutRate = 0.2;

  bool operator==(const Mlp&) const = default;
};

struct TrainConfig {
  int maxEpochs = 100;
  int patience = 10;
  double learningRate = 1e-3;
  double adamBeta1 = 0.9;
  double adamBeta2 = 0.999;
  double adamEpsilon = 1e-8;
  int batchSize = 32;
  std::uint64_t seed = 0;
  Activation activation = Activation::Identity;
  int hidden1 = 64;
  int hidden2 = 32;
  double dropoutRate = 0.2;
};

Mlp init(const TrainConfig& cfg);

struct Logits {
  std::array<double, kOutputSize> z{};
  std::span<const double> action() const { return {z.data(), kActionHead}; }
  std::span<const double> da() const { return {z.data() + kActionHead, kDaHead}; }
  std::span<const double> state() const { return {z.data() + kActionHead + kDaHead, kStateHead}; }
};

// Eval mode is deterministic; train mode draws one dropout mask per hidden
// unit from maskRng (required when trainMode is set).
Logits forward(const Mlp& m, const EncodedInput& x, bool trainMode = false,
               Rng* maskRng = nullptr);

// Sum of the three per-head cross-entropies.
double loss(const Logits& logits, const TargetLabels& targets);

struct Gradients {
  std::vector<double> w1, b1, w2, b2, w3, b3;
};

struct AdamState {
  std::vector<double> m, v;  // over flattened parameters
  long t = 0;
};

// Mean-loss gradient over a batch. Dropout masks, when training, are drawn
// serially per sample before any parallel work so results do not depend on
// thread count.
double batch_loss_and_gradients(const Mlp& m, std::span<const EncodedInput> xs,
                                std::span<const TargetLabels> ys, bool trainMode,
                                Rng* maskRng, Gradients& grads,
                                kernels::Exec exec = kernels::default_exec());

void adam_step(Mlp& m, const Gradients& grads, AdamState& state, const TrainConfig& cfg);

struct EpochStats {
  int epoch = 0;
  double trainLoss = 0.0;
  double valLoss = 0.0;
  double valActionAcc = 0.0;
  double valDaAcc = 0.0;
  double valStateAcc = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int stoppedAtEpoch = 0;
  int bestEpoch = 0;
};

struct Example {
  EncodedInput x;
  TargetLabels y;
};

struct TrainResult {
  Mlp model;
  TrainReport report;
};

TrainResult train(std::span<const Example> trainSet, std::span<const Example> valSet,
                  const TrainConfig& cfg);

// Raw per-head argmax with ties broken toward the lowest index.
TargetLabels predict(const Mlp& m, const EncodedInput& x);
std::vector<TargetLabels> predict_batch(const Mlp& m, std::span<const EncodedInput> xs,
                                        kernels::Exec exec = kernels::default_exec());

// Like predict, but couples the action and DA heads: when exactly one of
// them is the "none" class, the head with the higher top probability wins
// and the other is coerced to agree (none with none, best non-none
// otherwise).
TargetLabels predict_coherent(const Mlp& m, const EncodedInput& x);

double mean_loss(const Mlp& m, std::span<const Example> set,
                 kernels::Exec exec = kernels::default_exec());

void save_model(const Mlp& m, const std::string& path);
Mlp load_model(const std::string& path);
std::string serialize_model(const Mlp& m);
Mlp deserialize_model(std::string_view bytes);

}  // namespace musim
