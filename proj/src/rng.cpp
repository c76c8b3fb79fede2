#include "delayrl/rng.hpp"

#include <cmath>

namespace delayrl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view name,
                          std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ hash_name(name));
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return h;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

long RngStream::poisson(double mean) {
  long count = 0;
  // exp(-400) ~ 1e-174 keeps the running product away from underflow.
  while (mean > 400.0) {
    count += poisson(400.0);
    mean -= 400.0;
  }
  const double limit = std::exp(-mean);
  double product = uniform01();
  while (product > limit) {
    ++count;
    product *= uniform01();
  }
  return count;
}

}  // namespace delayrl
