#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gbo {

// Stream seeds are derived from a master seed plus a textual tag and an index
// so that every (method, trial) pair owns an independent, reproducible stream.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index);

// Deterministic random source. The engine output is fully specified by the
// standard and all conversions to doubles are done here explicitly, so streams
// are reproducible across compilers and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller; second deviate cached
  double normal();

  // uniform on {0, ..., n-1} without modulo bias
  int uniform_int(int n);

  // first k entries of a partial Fisher-Yates shuffle of {0, ..., n-1}
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gbo
