#include "sparsest/randomness.hpp"

#include <cmath>
#include <numbers>

namespace sparsest::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

Stream::Stream(std::uint64_t seed) : seed_(seed), key_(splitmix64(seed ^ 0x5eed5eed5eed5eedULL)) {}

Stream Stream::derive(std::span<const std::uint64_t> label) const {
  // Length-prefixed so that (1, 2) and (1, 2, 0) hash differently.
  std::uint64_t h = splitmix64(seed_ + kGolden);
  h = splitmix64(h ^ ((label.size() + 1) * kGolden));
  for (std::uint64_t part : label) h = splitmix64((h + kGolden) ^ splitmix64(part + 0x2545f4914f6cdd1dULL));
  return Stream(h);
}

std::uint64_t Stream::next_u64() {
  ++counter_;
  return splitmix64(key_ + counter_ * kGolden);
}

double Stream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Stream::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - uniform() lies in (0, 1], keeping the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

numerics::Vector gaussian_vector(Stream& stream, std::size_t n) {
  numerics::Vector g(n);
  for (double& v : g) v = stream.standard_normal();
  return g;
}

numerics::Matrix gaussian_matrix(Stream& stream, std::size_t rows, std::size_t cols) {
  numerics::Matrix m(rows, cols);
  for (double& v : m.data()) v = stream.standard_normal();
  return m;
}

}  // namespace sparsest::rng
