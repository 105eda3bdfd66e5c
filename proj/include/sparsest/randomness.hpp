#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

#include "sparsest/numerics.hpp"

namespace sparsest::rng {

/// Counter-based stream: the i-th 64-bit output is splitmix64(key + i·φ),
/// so a stream is fully described by (key, counter). Normals come from the
/// Box-Muller transform on 53-bit uniforms; both variates of a pair are
/// used, the second one cached in the stream.
///
/// A stream is single-owner. Hand independent work its own `derive`d child.
class Stream {
 public:
  explicit Stream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Child stream determined only by (seed, label); the parent's position
  /// does not matter and the parent is not advanced.
  Stream derive(std::span<const std::uint64_t> label) const;
  Stream derive(std::initializer_list<std::uint64_t> label) const {
    return derive(std::span<const std::uint64_t>(label.begin(), label.size()));
  }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double standard_normal();

  bool operator==(const Stream&) const = default;

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// n iid N(0, 1) draws.
numerics::Vector gaussian_vector(Stream& stream, std::size_t n);

/// rows × cols iid N(0, 1), filled column by column.
numerics::Matrix gaussian_matrix(Stream& stream, std::size_t rows, std::size_t cols);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sparsest::rng
