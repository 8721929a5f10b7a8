#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace musim {

struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorruptFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic RNG wrapper. All derived draws (uniforms, bounded ints,
// shuffles) are built from raw mt19937_64 outputs so that sequences are
// identical across standard library implementations; std::*_distribution
// is deliberately avoided because its algorithm is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1) with 53 bits of precision
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int range(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  template <class T>
  void shuffle(std::vector<T>& v) {  // Fisher-Yates over raw draws
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  Rng fork() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ull); }

 private:
  std::mt19937_64 gen_;
};

std::uint64_t fnv1a64(std::string_view data);

std::string read_text_file(const std::string& path);

// Writes via a temp file in the same directory followed by rename, so a
// reader never observes a partially written file.
void atomic_write_file(const std::string& path, std::string_view content);

std::string hex_u64(std::uint64_t v);

}  // namespace musim
