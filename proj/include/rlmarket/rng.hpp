#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace rlmarket {

// Portable random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the distributions are implemented here
// because the std:: distributions are not reproducible across library vendors.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Uniform on (lo, hi).
  double uniform(double lo, double hi);

  // Discrete uniform on {lo, ..., hi}; requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal (Marsaglia polar method).
  double normal();

  // Fisher-Yates shuffle of indices.
  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

// Seed for Monte-Carlo run `run_index` of an experiment rooted at `master_seed`.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index);

}  // namespace rlmarket
