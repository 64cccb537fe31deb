#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ner {

// Counter-based generator: the i-th draw of a stream with key k is
// splitmix64_mix(k + i * 0x9E3779B97F4A7C15), i = 1, 2, ...
// Streams are split by hashing the (master seed, stream id) pair into a key,
// key = splitmix64_mix(master ^ splitmix64_mix(stream + 0x9E3779B97F4A7C15)),
// so every stream can be regenerated from the seed alone in any language.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static CounterRng stream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, bound), unbiased (rejection on the top bits).
  std::uint64_t uniform_below(std::uint64_t bound);
  // Standard normal via Box-Muller; draws come in pairs, the second is cached.
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

// Uniformly random subset of size k from {0, ..., n-1} (partial Fisher-Yates),
// returned in ascending order.
std::vector<std::size_t> sample_without_replacement(CounterRng& rng, std::size_t n, std::size_t k);

// Uniform random permutation of {0, ..., n-1}.
std::vector<std::size_t> random_permutation(CounterRng& rng, std::size_t n);

}  // namespace ner
