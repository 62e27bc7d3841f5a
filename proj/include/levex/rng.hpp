#pragma once

#include <cstdint>
#include <random>

namespace levex {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014). Used to derive
/// independent stream seeds from (master seed, stream index).
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of replication `index` under `master_seed`. Depends on nothing else,
/// so results do not change with execution order or thread count.
std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index);

/// Standard-normal stream: std::mt19937_64 (fully specified by the standard)
/// -> 53-bit uniform on the open interval (0, 1) -> inverse normal CDF.
/// Exactly one engine draw per variate.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double operator()();

 private:
  std::mt19937_64 engine_;
};

}  // namespace levex
