#include "musim/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace musim {

const char* to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
  }
  return "?";
}

std::optional<Activation> activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  return std::nullopt;
}

namespace {

DenseLayer init_layer(int in, int out, Rng& rng) {
  DenseLayer l;
  l.in = in;
  l.out = out;
  l.w.resize(static_cast<std::size_t>(in) * static_cast<std::size_t>(out));
  l.b.assign(static_cast<std::size_t>(out), 0.0);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : l.w) w = rng.uniform(-bound, bound);
  return l;
}

void apply_activation(Activation act, std::vector<double>& v) {
  switch (act) {
    case Activation::Identity:
      break;
    case Activation::Tanh:
      for (double& x : v) x = std::tanh(x);
      break;
    case Activation::Relu:
      for (double& x : v) x = x > 0.0 ? x : 0.0;
      break;
  }
}

// derivative expressed through the post-activation value
double activation_grad(Activation act, double h) {
  switch (act) {
    case Activation::Identity: return 1.0;
    case Activation::Tanh: return 1.0 - h * h;
    case Activation::Relu: return h > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

struct BatchCache {
  int m = 0;
  std::vector<double> x, h1, h2, mask, hd, z3;
};

void forward_batch(const Mlp& net, std::span<const EncodedInput> xs, bool trainMode,
                   Rng* maskRng, BatchCache& c, kernels::Exec exec) {
  const int m = static_cast<int>(xs.size());
  const int h1n = net.l1.out;
  const int h2n = net.l2.out;
  c.m = m;
  c.x.resize(static_cast<std::size_t>(m) * kInputSize);
  for (int i = 0; i < m; ++i) {
    std::copy(xs[static_cast<std::size_t>(i)].values.begin(),
              xs[static_cast<std::size_t>(i)].values.end(),
              c.x.begin() + static_cast<long>(i) * kInputSize);
  }

  c.h1.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(h1n));
  kernels::dense_forward(m, net.l1.in, h1n, c.x.data(), net.l1.w.data(), net.l1.b.data(),
                         c.h1.data(), exec);
  apply_activation(net.activation, c.h1);

  c.h2.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(h2n));
  kernels::dense_forward(m, net.l2.in, h2n, c.h1.data(), net.l2.w.data(), net.l2.b.data(),
                         c.h2.data(), exec);
  apply_activation(net.activation, c.h2);

  c.mask.assign(c.h2.size(), 1.0);
  if (trainMode && net.dropoutRate > 0.0) {
    if (maskRng == nullptr) {
      throw std::invalid_argument("train-mode forward needs a mask RNG");
    }
    const double keep = 1.0 - net.dropoutRate;
    const double scale = 1.0 / keep;
    for (double& v : c.mask) v = maskRng->bernoulli(keep) ? scale : 0.0;
  }
  c.hd.resize(c.h2.size());
  for (std::size_t i = 0; i < c.h2.size(); ++i) c.hd[i] = c.h2[i] * c.mask[i];

  c.z3.resize(static_cast<std::size_t>(m) * kOutputSize);
  kernels::dense_forward(m, net.l3.in, kOutputSize, c.hd.data(), net.l3.w.data(),
                         net.l3.b.data(), c.z3.data(), exec);
}

constexpr int kHeadOffsets[3] = {0, kActionHead, kActionHead + kDaHead};
constexpr int kHeadWidths[3] = {kActionHead, kDaHead, kStateHead};

int target_of(const TargetLabels& t, int head) {
  return head == 0 ? t.eldAction : head == 1 ? t.eldDa : t.nextBelief;
}

// cross-entropy of one head, and optionally its softmax-minus-onehot
// gradient scaled by gradScale
double head_xent(const double* z, int width, int target, double* dz, double gradScale) {
  double zmax = z[0];
  for (int i = 1; i < width; ++i) zmax = std::max(zmax, z[i]);
  double sum = 0.0;
  for (int i = 0; i < width; ++i) sum += std::exp(z[i] - zmax);
  const double logZ = zmax + std::log(sum);
  if (dz != nullptr) {
    for (int i = 0; i < width; ++i) {
      double p = std::exp(z[i] - logZ);
      dz[i] = (p - (i == target ? 1.0 : 0.0)) * gradScale;
    }
  }
  return logZ - z[target];
}

}  // namespace

Mlp init(const TrainConfig& cfg) {
  Rng rng(cfg.seed);
  Mlp net;
  net.activation = cfg.activation;
  net.dropoutRate = cfg.dropoutRate;
  net.l1 = init_layer(kInputSize, cfg.hidden1, rng);
  net.l2 = init_layer(cfg.hidden1, cfg.hidden2, rng);
  net.l3 = init_layer(cfg.hidden2, kOutputSize, rng);
  return net;
}

Logits forward(const Mlp& m, const EncodedInput& x, bool trainMode, Rng* maskRng) {
  BatchCache c;
  forward_batch(m, std::span<const EncodedInput>(&x, 1), trainMode, maskRng, c,
                kernels::Exec::Serial);
  Logits out;
  std::copy(c.z3.begin(), c.z3.end(), out.z.begin());
  return out;
}

double loss(const Logits& logits, const TargetLabels& targets) {
  if (const std::string why = targets_problem(targets); !why.empty()) {
    throw std::invalid_argument("invalid targets: " + why);
  }
  double total = 0.0;
  for (int head = 0; head < 3; ++head) {
    total += head_xent(logits.z.data() + kHeadOffsets[head], kHeadWidths[head],
                       target_of(targets, head), nullptr, 0.0);
  }
  return total;
}

double batch_loss_and_gradients(const Mlp& net, std::span<const EncodedInput> xs,
                                std::span<const TargetLabels> ys, bool trainMode,
                                Rng* maskRng, Gradients& grads, kernels::Exec exec) {
  const int m = static_cast<int>(xs.size());
  if (m == 0 || xs.size() != ys.size()) {
    throw std::invalid_argument("batch_loss_and_gradients: bad batch");
  }
  BatchCache c;
  forward_batch(net, xs, trainMode, maskRng, c, exec);

  const int h1n = net.l1.out;
  const int h2n = net.l2.out;
  const double invM = 1.0 / static_cast<double>(m);

  double totalLoss = 0.0;
  std::vector<double> dz3(static_cast<std::size_t>(m) * kOutputSize);
  for (int i = 0; i < m; ++i) {
    const double* z = c.z3.data() + static_cast<long>(i) * kOutputSize;
    double* dz = dz3.data() + static_cast<long>(i) * kOutputSize;
    for (int head = 0; head < 3; ++head) {
      totalLoss += head_xent(z + kHeadOffsets[head], kHeadWidths[head],
                             target_of(ys[static_cast<std::size_t>(i)], head),
                             dz + kHeadOffsets[head], invM);
    }
  }

  grads.w3.resize(net.l3.w.size());
  grads.b3.resize(net.l3.b.size());
  kernels::grad_weights(m, h2n, kOutputSize, dz3.data(), c.hd.data(), grads.w3.data(), exec);
  kernels::col_sums(m, kOutputSize, dz3.data(), grads.b3.data(), exec);

  std::vector<double> dh2(static_cast<std::size_t>(m) * static_cast<std::size_t>(h2n));
  kernels::matmul_nn(m, kOutputSize, h2n, dz3.data(), net.l3.w.data(), dh2.data(), exec);
  for (std::size_t i = 0; i < dh2.size(); ++i) {
    dh2[i] *= c.mask[i] * activation_grad(net.activation, c.h2[i]);
  }

  grads.w2.resize(net.l2.w.size());
  grads.b2.resize(net.l2.b.size());
  kernels::grad_weights(m, h1n, h2n, dh2.data(), c.h1.data(), grads.w2.data(), exec);
  kernels::col_sums(m, h2n, dh2.data(), grads.b2.data(), exec);

  std::vector<double> dh1(static_cast<std::size_t>(m) * static_cast<std::size_t>(h1n));
  kernels::matmul_nn(m, h2n, h1n, dh2.data(), net.l2.w.data(), dh1.data(), exec);
  for (std::size_t i = 0; i < dh1.size(); ++i) {
    dh1[i] *= activation_grad(net.activation, c.h1[i]);
  }

  grads.w1.resize(net.l1.w.size());
  grads.b1.resize(net.l1.b.size());
  kernels::grad_weights(m, kInputSize, h1n, dh1.data(), c.x.data(), grads.w1.data(), exec);
  kernels::col_sums(m, h1n, dh1.data(), grads.b1.data(), exec);

  return totalLoss * invM;
}

namespace {

void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 std::vector<double>& m, std::vector<double>& v, std::size_t offset,
                 double lr, double b1, double b2, double eps, double b1t, double b2t) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    double& mi = m[offset + i];
    double& vi = v[offset + i];
    mi = b1 * mi + (1.0 - b1) * grad[i];
    vi = b2 * vi + (1.0 - b2) * grad[i] * grad[i];
    const double mhat = mi / (1.0 - b1t);
    const double vhat = vi / (1.0 - b2t);
    param[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

std::size_t param_count(const Mlp& m) {
  return m.l1.w.size() + m.l1.b.size() + m.l2.w.size() + m.l2.b.size() + m.l3.w.size() +
         m.l3.b.size();
}

}  // namespace

void adam_step(Mlp& m, const Gradients& grads, AdamState& state, const TrainConfig& cfg) {
  const std::size_t n = param_count(m);
  if (state.m.size() != n) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
    state.t = 0;
  }
  state.t += 1;
  const double b1t = std::pow(cfg.adamBeta1, static_cast<double>(state.t));
  const double b2t = std::pow(cfg.adamBeta2, static_cast<double>(state.t));
  std::size_t off = 0;
  auto step = [&](std::vector<double>& p, const std::vector<double>& g) {
    adam_update(p, g, state.m, state.v, off, cfg.learningRate, cfg.adamBeta1, cfg.adamBeta2,
                cfg.adamEpsilon, b1t, b2t);
    off += p.size();
  };
  step(m.l1.w, grads.w1);
  step(m.l1.b, grads.b1);
  step(m.l2.w, grads.w2);
  step(m.l2.b, grads.b2);
  step(m.l3.w, grads.w3);
  step(m.l3.b, grads.b3);
}

namespace {

TargetLabels labels_from_row(const double* z) {
  auto argmax = [](const double* v, int n) {
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (v[i] > v[best]) best = i;
    }
    return best;
  };
  TargetLabels t;
  t.eldAction = argmax(z, kActionHead);
  t.eldDa = argmax(z + kActionHead, kDaHead);
  t.nextBelief = argmax(z + kActionHead + kDaHead, kStateHead);
  return t;
}

}  // namespace

TargetLabels predict(const Mlp& m, const EncodedInput& x) {
  const Logits logits = forward(m, x, false, nullptr);
  return labels_from_row(logits.z.data());
}

std::vector<TargetLabels> predict_batch(const Mlp& m, std::span<const EncodedInput> xs,
                                        kernels::Exec exec) {
  BatchCache c;
  forward_batch(m, xs, false, nullptr, c, exec);
  std::vector<TargetLabels> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = labels_from_row(c.z3.data() + static_cast<long>(i) * kOutputSize);
  }
  return out;
}

TargetLabels predict_coherent(const Mlp& m, const EncodedInput& x) {
  const Logits logits = forward(m, x, false, nullptr);
  TargetLabels t = labels_from_row(logits.z.data());
  if ((t.eldAction == 0) == (t.eldDa == 0)) return t;

  auto top_prob = [](std::span<const double> z, int best) {
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    return std::exp(z[static_cast<std::size_t>(best)] - zmax) / sum;
  };
  auto best_nonzero = [](std::span<const double> z) {
    int best = 1;
    for (int i = 2; i < static_cast<int>(z.size()); ++i) {
      if (z[static_cast<std::size_t>(i)] > z[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
  };

  const double pAction = top_prob(logits.action(), t.eldAction);
  const double pDa = top_prob(logits.da(), t.eldDa);
  if (pAction >= pDa) {
    t.eldDa = t.eldAction == 0 ? 0 : best_nonzero(logits.da());
  } else {
    t.eldAction = t.eldDa == 0 ? 0 : best_nonzero(logits.action());
  }
  return t;
}

double mean_loss(const Mlp& m, std::span<const Example> set, kernels::Exec exec) {
  if (set.empty()) return 0.0;
  std::vector<EncodedInput> xs(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) xs[i] = set[i].x;
  BatchCache c;
  forward_batch(m, xs, false, nullptr, c, exec);
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double* z = c.z3.data() + static_cast<long>(i) * kOutputSize;
    for (int head = 0; head < 3; ++head) {
      total += head_xent(z + kHeadOffsets[head], kHeadWidths[head],
                         target_of(set[i].y, head), nullptr, 0.0);
    }
  }
  return total / static_cast<double>(set.size());
}

TrainResult train(std::span<const Example> trainSet, std::span<const Example> valSet,
                  const TrainConfig& cfg) {
  if (trainSet.empty() || valSet.empty()) {
    throw std::invalid_argument("train: corpora must be nonempty");
  }
  Mlp net = init(cfg);
  Rng shuffleRng(cfg.seed ^ 0x5b5ad4f1e338ull);
  Rng maskRng(cfg.seed ^ 0x77aa11228844ull);
  AdamState adam;
  TrainReport report;

  Mlp best = net;
  double bestVal = mean_loss(net, valSet);
  int bestEpoch = 0;
  int sinceBest = 0;

  std::vector<std::size_t> order(trainSet.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<EncodedInput> bx;
  std::vector<TargetLabels> by;
  Gradients grads;

  int epoch = 0;
  for (epoch = 1; epoch <= cfg.maxEpochs; ++epoch) {
    shuffleRng.shuffle(order);
    double epochLoss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batchSize)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batchSize));
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) {
        bx.push_back(trainSet[order[i]].x);
        by.push_back(trainSet[order[i]].y);
      }
      const double batchLoss = batch_loss_and_gradients(net, bx, by, true, &maskRng, grads);
      adam_step(net, grads, adam, cfg);
      epochLoss += batchLoss * static_cast<double>(bx.size());
      seen += bx.size();
    }
    epochLoss /= static_cast<double>(seen);

    EpochStats stats;
    stats.epoch = epoch;
    stats.trainLoss = epochLoss;
    stats.valLoss = mean_loss(net, valSet);
    {
      std::vector<EncodedInput> vx(valSet.size());
      for (std::size_t i = 0; i < valSet.size(); ++i) vx[i] = valSet[i].x;
      const auto preds = predict_batch(net, vx);
      int okA = 0, okD = 0, okS = 0;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        okA += preds[i].eldAction == valSet[i].y.eldAction;
        okD += preds[i].eldDa == valSet[i].y.eldDa;
        okS += preds[i].nextBelief == valSet[i].y.nextBelief;
      }
      const double n = static_cast<double>(preds.size());
      stats.valActionAcc = okA / n;
      stats.valDaAcc = okD / n;
      stats.valStateAcc = okS / n;
    }
    report.epochs.push_back(stats);

    if (stats.valLoss < bestVal) {
      bestVal = stats.valLoss;
      best = net;
      bestEpoch = epoch;
      sinceBest = 0;
    } else {
      ++sinceBest;
      if (sinceBest >= cfg.patience) break;
    }
  }

  report.stoppedAtEpoch = std::min(epoch, cfg.maxEpochs);
  report.bestEpoch = bestEpoch;
  return TrainResult{std::move(best), std::move(report)};
}

namespace {

constexpr char kMagic[8] = {'M', 'U', 'S', 'I', 'M', 'M', 'L', 'P'};
constexpr std::uint32_t kFormatVersion = 1;

void put_bytes(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}

template <class T>
void put(std::string& out, T v) {
  put_bytes(out, &v, sizeof(T));
}

void put_vec(std::string& out, const std::vector<double>& v) {
  put<std::uint64_t>(out, v.size());
  put_bytes(out, v.data(), v.size() * sizeof(double));
}

struct Reader {
  std::string_view data;
  std::size_t pos = 0;

  void read_bytes(void* p, std::size_t n) {
    if (pos + n > data.size()) throw CorruptFile("model file truncated");
    std::memcpy(p, data.data() + pos, n);
    pos += n;
  }
  template <class T>
  T get() {
    T v;
    read_bytes(&v, sizeof(T));
    return v;
  }
  std::vector<double> get_vec(std::size_t expected) {
    const auto n = get<std::uint64_t>();
    if (n != expected) throw CorruptFile("model file has inconsistent tensor size");
    std::vector<double> v(n);
    read_bytes(v.data(), n * sizeof(double));
    return v;
  }
};

}  // namespace

std::string serialize_model(const Mlp& m) {
  std::string out;
  put_bytes(out, kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint64_t>(out, feature_schema_hash());
  put<std::uint8_t>(out, static_cast<std::uint8_t>(m.activation));
  put<double>(out, m.dropoutRate);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.l1.in));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.l1.out));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.l2.out));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.l3.out));
  put_vec(out, m.l1.w);
  put_vec(out, m.l1.b);
  put_vec(out, m.l2.w);
  put_vec(out, m.l2.b);
  put_vec(out, m.l3.w);
  put_vec(out, m.l3.b);
  return out;
}

Mlp deserialize_model(std::string_view bytes) {
  Reader r{bytes};
  char magic[8];
  r.read_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CorruptFile("not a model file (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw SchemaMismatch("unsupported model format version " + std::to_string(version));
  }
  const auto schema = r.get<std::uint64_t>();
  if (schema != feature_schema_hash()) {
    throw SchemaMismatch("model was built against a different feature schema");
  }
  Mlp m;
  const auto act = r.get<std::uint8_t>();
  if (act > 2) throw CorruptFile("bad activation tag");
  m.activation = static_cast<Activation>(act);
  m.dropoutRate = r.get<double>();
  const auto in = r.get<std::uint32_t>();
  const auto h1 = r.get<std::uint32_t>();
  const auto h2 = r.get<std::uint32_t>();
  const auto outDim = r.get<std::uint32_t>();
  if (in != kInputSize || outDim != kOutputSize || h1 == 0 || h2 == 0) {
    throw SchemaMismatch("model dimensions do not match this build");
  }
  m.l1.in = static_cast<int>(in);
  m.l1.out = static_cast<int>(h1);
  m.l2.in = static_cast<int>(h1);
  m.l2.out = static_cast<int>(h2);
  m.l3.in = static_cast<int>(h2);
  m.l3.out = static_cast<int>(outDim);
  m.l1.w = r.get_vec(static_cast<std::size_t>(in) * h1);
  m.l1.b = r.get_vec(h1);
  m.l2.w = r.get_vec(static_cast<std::size_t>(h1) * h2);
  m.l2.b = r.get_vec(h2);
  m.l3.w = r.get_vec(static_cast<std::size_t>(h2) * outDim);
  m.l3.b = r.get_vec(outDim);
  if (r.pos != bytes.size()) throw CorruptFile("trailing bytes in model file");
  return m;
}

void save_model(const Mlp& m, const std::string& path) {
  atomic_write_file(path, serialize_model(m));
}

Mlp load_model(const std::string& path) { return deserialize_model(read_text_file(path)); }

}  // namespace musim
