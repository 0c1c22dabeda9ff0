#pragma once

#include <cstdint>

namespace cftplab {

// Counter-based uniform generator: every value is a pure function of
// (master seed, replica, site, time step, stream, level), so a draw keyed by
// (site, n) is identical no matter which chain, window radius, horizon, or
// worker thread asks for it.  That reuse is what makes backward coupling
// produce exact samples; a stateful generator here would silently bias them.
//
// The mixer is the splitmix64 finalizer over key + counter * golden gamma,
// i.e. the splitmix64 sequence indexed at the counter.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Streams of the per-sweep randomness pair: 'A' drives the inverse-CDF site
// updates, 'B' drives the order labels.  Extra streams serve the tooling.
enum class Stream : std::uint64_t {
  UpdateA = 0,
  OrderB = 1,
  Source = 2,   // coloring sources (z, sigma)
  Scratch = 3,  // test generators, oracle sampling
};

class CounterRng {
 public:
  CounterRng() : key_(0) {}
  explicit CounterRng(std::uint64_t master_seed, std::uint64_t replica = 0)
      : key_(mix64(mix64(master_seed) ^ (0x517cc1b727220a95ULL * (replica + 1)))) {}

  // Raw 64-bit word at a (site, time, stream, level) counter.
  std::uint64_t word(std::int64_t site, std::int64_t time, Stream stream, int level = 0) const {
    ++draws_;
    std::uint64_t c = pack(site, time, static_cast<std::uint64_t>(stream), level);
    return mix64(key_ + c * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform(std::int64_t site, std::int64_t time, Stream stream, int level = 0) const {
    return static_cast<double>(word(site, time, stream, level) >> 11) * 0x1.0p-53;
  }

  double update_a(std::int64_t site, std::int64_t time) const {
    return uniform(site, time, Stream::UpdateA);
  }

  double order_real(std::int64_t site, std::int64_t time, int level = 0) const {
    return uniform(site, time, Stream::OrderB, level);
  }

  // Digit label in {1, ..., base}; multiply-shift keeps the O(base/2^64)
  // modulo bias far below anything our statistics can see.
  int order_digit(std::int64_t site, std::int64_t time, int base) const {
    std::uint64_t w = word(site, time, Stream::OrderB);
    return 1 + static_cast<int>((static_cast<unsigned __int128>(w) * static_cast<std::uint64_t>(base)) >> 64);
  }

  int uniform_int(std::int64_t site, std::int64_t time, Stream stream, int n) const {
    std::uint64_t w = word(site, time, stream);
    return static_cast<int>((static_cast<unsigned __int128>(w) * static_cast<std::uint64_t>(n)) >> 64);
  }

  std::uint64_t draws() const { return draws_; }
  void reset_draws() const { draws_ = 0; }

 private:
  static std::uint64_t pack(std::int64_t site, std::int64_t time, std::uint64_t stream, int level) {
    // site < 2^26, time < 2^30, 4 stream bits, 4 level bits: disjoint counters.
    return (static_cast<std::uint64_t>(site) << 38) ^
           (static_cast<std::uint64_t>(time) << 8) ^ (stream << 4) ^
           static_cast<std::uint64_t>(level);
  }

  std::uint64_t key_;
  mutable std::uint64_t draws_ = 0;
};

}  // namespace cftplab
