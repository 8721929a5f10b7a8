#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "musim/mlp.hpp"

using namespace musim;

namespace {

TrainConfig small_cfg(std::uint64_t seed, Activation act = Activation::Identity) {
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.activation = act;
  cfg.hidden1 = 8;
  cfg.hidden2 = 8;
  return cfg;
}

EncodedInput random_input(Rng& rng) {
  EncodedInput x;
  for (double& v : x.values) v = rng.bernoulli(0.15) ? 1.0 : 0.0;
  return x;
}

TargetLabels random_targets(Rng& rng) {
  TargetLabels t;
  t.eldAction = rng.range(1, kNumEldActions - 1);
  t.eldDa = rng.range(1, kNumDialogueActs - 1);
  t.nextBelief = rng.range(0, kNumBeliefStates - 1);
  return t;
}

std::vector<double> flatten(const Gradients& g) {
  std::vector<double> out;
  for (const auto* v : {&g.w1, &g.b1, &g.w2, &g.b2, &g.w3, &g.b3}) {
    out.insert(out.end(), v->begin(), v->end());
  }
  return out;
}

std::vector<double*> param_ptrs(Mlp& m) {
  std::vector<double*> out;
  for (auto* v : {&m.l1.w, &m.l1.b, &m.l2.w, &m.l2.b, &m.l3.w, &m.l3.b}) {
    for (double& x : *v) out.push_back(&x);
  }
  return out;
}

}  // namespace

TEST_CASE("seeded init is reproducible and fan-in bounded") {
  const Mlp a = init(small_cfg(5));
  const Mlp b = init(small_cfg(5));
  CHECK(a == b);
  const Mlp c = init(small_cfg(6));
  CHECK_FALSE(a == c);

  const TrainConfig cfg;
  const Mlp full = init(cfg);
  const double bound = 1.0 / std::sqrt(76.0);
  for (double w : full.l1.w) {
    CHECK(std::abs(w) <= bound);
  }
  for (double bb : full.l1.b) CHECK(bb == 0.0);
}

TEST_CASE("zero-weight model yields uniform heads and the ln-sum loss") {
  Mlp m = init(small_cfg(1));
  for (auto* v : {&m.l1.w, &m.l2.w, &m.l3.w, &m.l1.b, &m.l2.b, &m.l3.b}) {
    std::fill(v->begin(), v->end(), 0.0);
  }
  Rng rng(3);
  const EncodedInput x = random_input(rng);
  const Logits logits = forward(m, x);
  for (double z : logits.z) CHECK(z == 0.0);

  const double expected = std::log(7.0) + std::log(14.0) + std::log(13.0);
  CHECK(std::abs(loss(logits, TargetLabels{2, 3, 4}) - expected) < 1e-9);

  // ties break toward the lowest index
  CHECK(predict(m, x) == TargetLabels{0, 0, 0});
}

TEST_CASE("eval-mode forward is deterministic, train mode needs a mask source") {
  const Mlp m = init(small_cfg(7, Activation::Tanh));
  Rng rng(9);
  const EncodedInput x = random_input(rng);
  CHECK(forward(m, x).z == forward(m, x).z);
  CHECK_THROWS_AS(forward(m, x, true, nullptr), std::invalid_argument);
}

TEST_CASE("loss is invariant to shifting one head's logits") {
  Logits a;
  Rng rng(11);
  for (double& z : a.z) z = rng.uniform(-2, 2);
  Logits b = a;
  for (int i = 0; i < kActionHead; ++i) b.z[static_cast<std::size_t>(i)] += 17.5;
  const TargetLabels t{3, 5, 7};
  CHECK(loss(a, t) == doctest::Approx(loss(b, t)).epsilon(1e-12));
}

TEST_CASE("a confident correct logit drives the loss to zero") {
  Logits z;
  z.z[1] = 60.0;                            // action head, class 1
  z.z[kActionHead + 2] = 60.0;              // da head, class 2
  z.z[kActionHead + kDaHead + 3] = 60.0;    // state head, class 3
  CHECK(loss(z, TargetLabels{1, 2, 3}) < 1e-9);
}

TEST_CASE("dropout uses inverted scaling: mask average matches eval activations") {
  // With rate 0.2 the pre-output activations are h * mask where
  // E[mask] = 1, so averaging many draws approaches the eval-mode value.
  const Mlp m = init(small_cfg(13, Activation::Tanh));
  Rng rng(17);
  const EncodedInput x = random_input(rng);
  const Logits evalLogits = forward(m, x);

  Rng maskRng(23);
  const int draws = 10000;
  std::vector<double> mean(kOutputSize, 0.0);
  std::vector<double> sq(kOutputSize, 0.0);
  for (int i = 0; i < draws; ++i) {
    const Logits z = forward(m, x, true, &maskRng);
    for (int j = 0; j < kOutputSize; ++j) {
      mean[static_cast<std::size_t>(j)] += z.z[static_cast<std::size_t>(j)];
      sq[static_cast<std::size_t>(j)] += z.z[static_cast<std::size_t>(j)] * z.z[static_cast<std::size_t>(j)];
    }
  }
  for (int j = 0; j < kOutputSize; ++j) {
    const double mu = mean[static_cast<std::size_t>(j)] / draws;
    const double var = sq[static_cast<std::size_t>(j)] / draws - mu * mu;
    const double se = std::sqrt(std::max(var, 0.0) / draws);
    CHECK(std::abs(mu - evalLogits.z[static_cast<std::size_t>(j)]) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
    Mlp m = init(small_cfg(seed, Activation::Tanh));
    m.dropoutRate = 0.0;  // eval-path gradient check
    Rng rng(seed + 100);
    const EncodedInput x = random_input(rng);
    const TargetLabels t = random_targets(rng);

    Gradients grads;
    batch_loss_and_gradients(m, std::span(&x, 1), std::span(&t, 1), false, nullptr, grads);
    const auto flat = flatten(grads);
    auto ptrs = param_ptrs(m);
    REQUIRE(flat.size() == ptrs.size());

    const double eps = 1e-5;
    double maxRel = 0.0;
    for (std::size_t i = 0; i < ptrs.size(); ++i) {
      const double orig = *ptrs[i];
      *ptrs[i] = orig + eps;
      const double up = loss(forward(m, x), t);
      *ptrs[i] = orig - eps;
      const double down = loss(forward(m, x), t);
      *ptrs[i] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double rel = std::abs(numeric - flat[i]) / std::max(1.0, std::abs(numeric));
      maxRel = std::max(maxRel, rel);
    }
    CHECK(maxRel < 1e-4);
  }
}

TEST_CASE("gradient of the target logit is softmax minus one") {
  Mlp m = init(small_cfg(41));
  m.dropoutRate = 0.0;
  Rng rng(42);
  const EncodedInput x = random_input(rng);
  const TargetLabels t{1, 2, 3};
  const Logits z = forward(m, x);

  Gradients grads;
  batch_loss_and_gradients(m, std::span(&x, 1), std::span(&t, 1), false, nullptr, grads);
  // output-bias gradient equals dLoss/dlogit directly
  double norm = 0.0;
  for (int i = 0; i < kActionHead; ++i) norm += std::exp(z.z[static_cast<std::size_t>(i)]);
  const double p = std::exp(z.z[1]) / norm;
  CHECK(grads.b3[1] == doctest::Approx(p - 1.0).epsilon(1e-9));
  CHECK(grads.b3[1] < 0.0);
}

TEST_CASE("zero input and zero weights give zero first-layer gradients") {
  Mlp m = init(small_cfg(51));
  for (auto* v : {&m.l1.w, &m.l2.w, &m.l3.w}) std::fill(v->begin(), v->end(), 0.0);
  EncodedInput x;  // all zeros
  const TargetLabels t{1, 1, 1};
  Gradients grads;
  batch_loss_and_gradients(m, std::span(&x, 1), std::span(&t, 1), false, nullptr, grads);
  for (double gw : grads.w1) CHECK(gw == 0.0);
}

TEST_CASE("first Adam step equals the closed-form bias-corrected update") {
  Mlp m = init(small_cfg(61));
  const double before = m.l1.w[0];
  Gradients g;
  g.w1.assign(m.l1.w.size(), 0.0);
  g.b1.assign(m.l1.b.size(), 0.0);
  g.w2.assign(m.l2.w.size(), 0.0);
  g.b2.assign(m.l2.b.size(), 0.0);
  g.w3.assign(m.l3.w.size(), 0.0);
  g.b3.assign(m.l3.b.size(), 0.0);
  const double grad = 0.37;
  g.w1[0] = grad;

  TrainConfig cfg = small_cfg(61);
  AdamState state;
  adam_step(m, g, state, cfg);
  const double expected = before - cfg.learningRate * grad / (std::abs(grad) + cfg.adamEpsilon);
  CHECK(std::abs(m.l1.w[0] - expected) < 1e-12);

  // zero gradient leaves every other parameter untouched
  CHECK(m.l1.w[1] == init(small_cfg(61)).l1.w[1]);
}

TEST_CASE("zero gradients forever leave the model unchanged") {
  Mlp m = init(small_cfg(71));
  const Mlp orig = m;
  Gradients g;
  g.w1.assign(m.l1.w.size(), 0.0);
  g.b1.assign(m.l1.b.size(), 0.0);
  g.w2.assign(m.l2.w.size(), 0.0);
  g.b2.assign(m.l2.b.size(), 0.0);
  g.w3.assign(m.l3.w.size(), 0.0);
  g.b3.assign(m.l3.b.size(), 0.0);
  TrainConfig cfg = small_cfg(71);
  AdamState state;
  for (int i = 0; i < 5; ++i) adam_step(m, g, state, cfg);
  CHECK(m == orig);
  CHECK(state.t == 5);
}

TEST_CASE("one small Adam step on a fixed batch lowers the loss") {
  TrainConfig cfg = small_cfg(81, Activation::Identity);
  cfg.learningRate = 1e-4;
  Mlp m = init(cfg);
  m.dropoutRate = 0.0;

  Rng rng(82);
  std::vector<EncodedInput> xs;
  std::vector<TargetLabels> ys;
  for (int i = 0; i < 16; ++i) {
    xs.push_back(random_input(rng));
    ys.push_back(random_targets(rng));
  }
  Gradients grads;
  const double before = batch_loss_and_gradients(m, xs, ys, false, nullptr, grads);
  AdamState state;
  adam_step(m, grads, state, cfg);
  Gradients unused;
  const double after = batch_loss_and_gradients(m, xs, ys, false, nullptr, unused);
  CHECK(after < before);
}

TEST_CASE("training fits a separable toy corpus and is fully deterministic") {
  // two context patterns with distinct labels
  std::vector<Example> data;
  for (int i = 0; i < 20; ++i) {
    Example e;
    e.x.values[static_cast<std::size_t>(i % 2 == 0 ? 4 : 10)] = 1.0;
    e.x.values[33] = 1.0;
    e.y = i % 2 == 0 ? TargetLabels{1, 1, 3} : TargetLabels{5, 6, 6};
    data.push_back(e);
  }
  TrainConfig cfg = small_cfg(91, Activation::Tanh);
  cfg.batchSize = 4;
  cfg.maxEpochs = 100;
  cfg.patience = 100;
  cfg.learningRate = 3e-3;
  cfg.dropoutRate = 0.0;

  const Mlp untouched = init(cfg);
  const double initialLoss = mean_loss(untouched, data);
  const TrainResult r1 = train(data, data, cfg);
  const TrainResult r2 = train(data, data, cfg);

  CHECK(mean_loss(r1.model, data) < 0.1 * initialLoss);
  CHECK(serialize_model(r1.model) == serialize_model(r2.model));
  CHECK(r1.report.bestEpoch <= r1.report.stoppedAtEpoch);
  CHECK(r1.report.stoppedAtEpoch <= cfg.maxEpochs);

  // the returned snapshot is the best-validation epoch
  double bestSeen = 1e30;
  for (const EpochStats& e : r1.report.epochs) bestSeen = std::min(bestSeen, e.valLoss);
  CHECK(mean_loss(r1.model, data) == doctest::Approx(bestSeen).epsilon(1e-12));

  for (const Example& e : data) {
    CHECK(predict(r1.model, e.x) == e.y);
  }
}

TEST_CASE("coherent prediction couples the action and DA heads") {
  TrainConfig cfg = small_cfg(101);
  Mlp m = init(cfg);
  for (auto* v : {&m.l1.w, &m.l2.w, &m.l3.w, &m.l1.b, &m.l2.b}) {
    std::fill(v->begin(), v->end(), 0.0);
  }
  EncodedInput x;

  // action head confidently says no-action, DA head weakly says instruct
  std::fill(m.l3.b.begin(), m.l3.b.end(), 0.0);
  m.l3.b[0] = 5.0;
  m.l3.b[kActionHead + 1] = 1.0;
  CHECK(predict(m, x) == TargetLabels{0, 1, 0});
  CHECK(predict_coherent(m, x) == TargetLabels{0, 0, 0});

  // DA head confidently says no-utterance, action head weakly says give-ot
  std::fill(m.l3.b.begin(), m.l3.b.end(), 0.0);
  m.l3.b[1] = 1.0;
  m.l3.b[kActionHead + 0] = 6.0;
  CHECK(predict_coherent(m, x) == TargetLabels{0, 0, 0});

  // action head confidently acts, DA head weakly silent: DA is pulled up
  std::fill(m.l3.b.begin(), m.l3.b.end(), 0.0);
  m.l3.b[1] = 6.0;
  m.l3.b[kActionHead + 0] = 0.5;
  m.l3.b[kActionHead + 5] = 0.4;
  const TargetLabels coherent = predict_coherent(m, x);
  CHECK(coherent.eldAction == 1);
  CHECK(coherent.eldDa == 5);
}

TEST_CASE("model files round-trip bit-exactly and validate their header") {
  TrainConfig cfg = small_cfg(111, Activation::Relu);
  const Mlp m = init(cfg);
  const std::string bytes = serialize_model(m);
  const Mlp back = deserialize_model(bytes);
  CHECK(m == back);
  CHECK(serialize_model(back) == bytes);

  Rng rng(112);
  for (int i = 0; i < 100; ++i) {
    const EncodedInput x = random_input(rng);
    CHECK(predict(m, x) == predict(back, x));
  }

  std::string truncated = bytes.substr(0, bytes.size() - 9);
  CHECK_THROWS_AS(deserialize_model(truncated), CorruptFile);

  std::string badMagic = bytes;
  badMagic[0] = 'X';
  CHECK_THROWS_AS(deserialize_model(badMagic), CorruptFile);

  // the feature-schema hash sits after the magic and the format version
  std::string badSchema = bytes;
  badSchema[13] ^= 0x5a;
  CHECK_THROWS_AS(deserialize_model(badSchema), SchemaMismatch);
}
