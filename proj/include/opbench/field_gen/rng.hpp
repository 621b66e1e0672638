// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace opbench::field_gen
{

// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Child seed for stream `index` of `seed`: the index is XOR'd into the seed
// after whitening, so neighbouring indices give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
  return mix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

/**
 * Counter-based 64-bit generator (SplitMix64).
 *
 * Word k of a stream is mix64(key + (k + 1) * golden), where key is derived
 * from the seed. The output depends only on (seed, k); there is no hidden
 * state besides the counter, so streams are reproducible on every platform
 * and can be skipped ahead in O(1).
 */
class CounterRng
{
public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed), key_(mix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }
  void skip(std::uint64_t n) noexcept { counter_ += n; }

  std::uint64_t next_u64() noexcept
  {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) noexcept { return low + (high - low) * uniform(); }

  // Uniform integer in [0, n), unbiased (Lemire's method with rejection).
  std::uint64_t below(std::uint64_t n) noexcept;

  // Standard normal via the Box-Muller transform; the second variate of each
  // pair is cached.
  double normal() noexcept;

private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace opbench::field_gen
