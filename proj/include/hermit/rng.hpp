#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace hermit {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based sub-stream derivation: every grid cell / replication gets an
// independent, reproducible seed from one root.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                 std::uint64_t counter = 0) {
  std::uint64_t s = root ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  std::uint64_t a = splitmix64(s);
  s ^= counter + 0xd1b54a32d192ed03ULL;
  return a ^ splitmix64(s);
}

// mt19937_64 with explicit transforms so sampled values do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // 0 .. n-1
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
  }

  // Box-Muller, standard normal
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Exponential inter-arrival counting; linear in lambda but exact for any
  // magnitude the generators produce.
  long poisson(double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("poisson: negative rate");
    long count = 0;
    double acc = 0.0;
    while (true) {
      double u = 0.0;
      while (u <= 0.0) u = uniform();
      acc += -std::log(u);
      if (acc >= lambda) break;
      ++count;
    }
    return count;
  }

  template <typename Derived>
  int categorical(const Derived& probs) {
    const double u = uniform();
    double cum = 0.0;
    const int k = static_cast<int>(probs.size());
    for (int r = 0; r < k; ++r) {
      cum += probs[r];
      if (u < cum) return r;
    }
    return k - 1;
  }

  // First `count` positions of a random permutation of 0..n-1.
  std::vector<int> sample_without_replacement(int n, int count) {
    if (count > n) throw std::invalid_argument("sample: count exceeds n");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < count; ++i) {
      const int j = i + uniform_int(n - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hermit
