// Timing comparison of the serial reference kernels against the OpenMP
// variants, plus two end-to-end paths built on them (batched prediction,
// episode batches). Results of both variants are asserted bit-identical
// before timing.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "musim/corpus.hpp"
#include "musim/env.hpp"
#include "musim/eval.hpp"
#include "musim/hel.hpp"
#include "musim/kernels.hpp"
#include "musim/mlp.hpp"
#include "musim/policy.hpp"
#include "musim/util.hpp"

namespace {

using namespace musim;
namespace k = musim::kernels;

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const std::string& name, double serialMs, double parallelMs) {
  std::printf("%-34s %10.3f ms %10.3f ms %8.2fx\n", name.c_str(), serialMs, parallelMs,
              serialMs / parallelMs);
}

std::vector<double> random_matrix(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

void bench_kernels(int m, int kk, int n, Rng& rng) {
  const auto X = random_matrix(static_cast<std::size_t>(m) * kk, rng);
  const auto W = random_matrix(static_cast<std::size_t>(n) * kk, rng);
  const auto b = random_matrix(static_cast<std::size_t>(n), rng);
  std::vector<double> y1(static_cast<std::size_t>(m) * n), y2(y1.size());
  std::vector<double> dW1(W.size()), dW2(W.size());

  k::dense_forward(m, kk, n, X.data(), W.data(), b.data(), y1.data(), k::Exec::Serial);
  k::dense_forward(m, kk, n, X.data(), W.data(), b.data(), y2.data(), k::Exec::Parallel);
  k::grad_weights(m, kk, n, y1.data(), X.data(), dW1.data(), k::Exec::Serial);
  k::grad_weights(m, kk, n, y2.data(), X.data(), dW2.data(), k::Exec::Parallel);
  if (y1 != y2 || dW1 != dW2) {
    std::fprintf(stderr, "serial and parallel kernels disagree\n");
    std::exit(1);
  }

  char label[64];
  std::snprintf(label, sizeof(label), "dense_forward %dx%d -> %d", m, kk, n);
  row(label,
      time_ms([&] { k::dense_forward(m, kk, n, X.data(), W.data(), b.data(), y1.data(),
                                     k::Exec::Serial); },
              5),
      time_ms([&] { k::dense_forward(m, kk, n, X.data(), W.data(), b.data(), y2.data(),
                                     k::Exec::Parallel); },
              5));
  std::snprintf(label, sizeof(label), "grad_weights  %dx%d -> %d", m, kk, n);
  row(label,
      time_ms([&] { k::grad_weights(m, kk, n, y1.data(), X.data(), dW1.data(),
                                    k::Exec::Serial); },
              5),
      time_ms([&] { k::grad_weights(m, kk, n, y2.data(), X.data(), dW2.data(),
                                    k::Exec::Parallel); },
              5));
}

void bench_predict() {
  SynthConfig sc;
  sc.dialogues = 400;
  sc.noise = 0.3;
  sc.seed = 11;
  const Corpus corpus = synthesize_corpus(sc);
  const auto examples = corpus_examples(corpus);
  std::vector<EncodedInput> xs(examples.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = examples[i].x;

  TrainConfig cfg;
  cfg.activation = Activation::Tanh;
  cfg.hidden1 = 256;
  cfg.hidden2 = 128;
  cfg.seed = 3;
  const Mlp model = init(cfg);

  const auto serial = predict_batch(model, xs, k::Exec::Serial);
  const auto parallel = predict_batch(model, xs, k::Exec::Parallel);
  if (serial.size() != parallel.size()) std::exit(1);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    if (!(serial[i] == parallel[i])) {
      std::fprintf(stderr, "serial and parallel predictions disagree\n");
      std::exit(1);
    }
  }

  char label[64];
  std::snprintf(label, sizeof(label), "predict_batch n=%zu (256,128)", xs.size());
  row(label, time_ms([&] { predict_batch(model, xs, k::Exec::Serial); }, 5),
      time_ms([&] { predict_batch(model, xs, k::Exec::Parallel); }, 5));
}

void run_episodes(int count, bool parallel) {
  std::vector<int> turns(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < count; ++i) {
    OraclePolicy policy;
    EnvConfig cfg;
    Env env(cfg, policy);
    Rng rng(1000 + static_cast<std::uint64_t>(i));
    CooperativeHel hel(0.3);
    hel.start_episode();
    env.reset(sample_goal(rng));
    while (!env.session().done) {
      const Session& s = env.session();
      const HelView view{s.belief, s.utteredOT, s.utteredL, s.goal, s.prevEldMove};
      env.step(hel.next(view, rng));
    }
    turns[static_cast<std::size_t>(i)] = env.session().steps;
  }
}

void bench_episodes() {
  row("episodes n=2000 (oracle ELD)", time_ms([&] { run_episodes(2000, false); }, 3),
      time_ms([&] { run_episodes(2000, true); }, 3));
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel variants run serially\n");
#endif
  std::printf("%-34s %13s %13s %9s\n", "benchmark", "serial", "parallel", "speedup");

  Rng rng(7);
  bench_kernels(256, 76, 64, rng);
  bench_kernels(1024, 512, 256, rng);
  bench_kernels(4096, 256, 128, rng);
  bench_predict();
  bench_episodes();
  return 0;
}
