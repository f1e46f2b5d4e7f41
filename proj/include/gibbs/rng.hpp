#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace gibbs {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is identified by (seed, stream_id); the n-th output is a pure
/// function of (seed, stream_id, n). Independent workers take distinct
/// stream ids, so a run is reproducible regardless of scheduling.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0,1) with 53 random bits.
  double uniform();
  /// Uniform on [a,b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Uniform integer on {0, ..., n-1}; n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal (Box-Muller, one cached spare).
  double normal();
  /// Poisson variate with the given mean (mean >= 0).
  std::uint64_t poisson(double mean);

  std::uint64_t seed() const { return key_; }
  std::uint64_t stream_id() const { return stream_; }
  /// Number of 128-bit blocks consumed so far.
  std::uint64_t blocks_used() const { return counter_; }

  /// Derive an independent child stream (e.g. one per chain or per outer sample).
  Rng split(std::uint64_t child) const;

private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int avail_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gibbs
