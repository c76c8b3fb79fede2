#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace delayrl {

// splitmix64 finalizer; bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

// FNV-1a hash of a stream name.
std::uint64_t hash_name(std::string_view name);

// Seed for the substream (master, name, a, b). Changing any argument gives an
// unrelated stream; the same arguments always give the same stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view name,
                          std::uint64_t a = 0, std::uint64_t b = 0);

// Deterministic random stream. The engine is std::mt19937_64 (its output
// sequence is fixed by the standard); the samplers below are implemented here
// rather than with std:: distributions, whose outputs vary across standard
// library implementations and would break byte-identical regression runs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
  }

  // Standard normal via Box-Muller; the second deviate of each pair is cached.
  double normal();

  // Poisson draw via Knuth's multiplicative method, splitting large means so
  // exp(-mean) stays representable.
  long poisson(double mean);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Hands out named substreams of one master seed. Streams are independent of
// the order they are requested in, so concurrent consumers stay reproducible.
class StreamFactory {
 public:
  explicit StreamFactory(std::uint64_t master) : master_(master) {}

  RngStream stream(std::string_view name, std::uint64_t a = 0,
                   std::uint64_t b = 0) const {
    return RngStream(derive_seed(master_, name, a, b));
  }

  StreamFactory fork(std::string_view name, std::uint64_t index = 0) const {
    return StreamFactory(derive_seed(master_, name, index));
  }

  std::uint64_t master() const { return master_; }

 private:
  std::uint64_t master_;
};

}  // namespace delayrl
