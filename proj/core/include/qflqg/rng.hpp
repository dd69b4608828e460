#pragma once

#include <cstdint>
#include <limits>

namespace qflqg {

/// Stream tags separating the independent random streams of one run.
enum class StreamTag : std::uint32_t {
  kProcessNoise = 1,  // W_{-1} .. W_{T-1}
  kRollout = 2,       // lookahead samples inside the rollout policy
  kOracle = 3,        // scenario sampling for discretized micro-instances
};

/// Identifies one reproducible random stream: (master seed, run, time, tag).
/// Time is stored with an offset so that t = -1 (the initial state draw) is a
/// valid key.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t run = 0;
  std::int64_t time = 0;
  StreamTag tag = StreamTag::kProcessNoise;
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based generator: the i-th output of a stream is a pure function of
/// (key, i).  Satisfies UniformRandomBitGenerator so it plugs into the
/// standard distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(const StreamKey& key) : base_(hash_key(key)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    return detail::splitmix64(base_ ^ detail::splitmix64(counter_++));
  }

  static constexpr std::uint64_t hash_key(const StreamKey& key) {
    std::uint64_t h = detail::splitmix64(key.seed);
    h = detail::splitmix64(h ^ key.run);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(key.time + 1));
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(key.tag));
    return h;
  }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace qflqg
