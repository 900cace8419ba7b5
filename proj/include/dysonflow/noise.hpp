#pragma once

// Counter-based Gaussian noise.  Every increment is a pure function of
// (seed, stream, domain, particle index, step index, refinement level,
// sub-interval), so coupled runs, nested windows and any thread schedule see
// the same Brownian motions.

#include <array>
#include <cstdint>
#include <limits>

namespace dysonflow {

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// UniformRandomBitGenerator over consecutive Philox blocks of one counter.
class PhiloxStream {
 public:
  using result_type = std::uint32_t;

  PhiloxStream(std::array<std::uint32_t, 2> key, std::uint32_t c0, std::uint32_t c1);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t c0_, c1_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
};

enum class NoiseDomain : std::uint32_t {
  Particle = 1,
  Matrix = 2,
  Sampler = 3,
};

class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed = 0, std::uint64_t stream = 0);

  // Brownian increments are all zero, which turns the integrators deterministic.
  static NoiseSource silent();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Standard normal keyed by (domain, i, n, level, sub).
  double normal(NoiseDomain domain, long i, long n, int level = 0, std::uint64_t sub = 0) const;

  // Increment of B_i over step n of length dt; at refinement level L the step
  // is split into 2^L pieces and `piece` selects one, generated by successive
  // Brownian-bridge halving so the pieces sum to the coarse increment.
  double particle_increment(long i, long n, double dt, int level = 0, std::uint64_t piece = 0) const;

  // W_a = B_{key+1} - B_key over the same (sub)interval.
  double gap_increment(long key, long n, double dt, int level = 0, std::uint64_t piece = 0) const {
    return particle_increment(key + 1, n, dt, level, piece) - particle_increment(key, n, dt, level, piece);
  }

  // B_i(n_steps * dt) - B_i(0).
  double brownian(long i, long n_steps, double dt) const;

 private:
  std::array<std::uint32_t, 2> key_for(NoiseDomain domain, int level, std::uint64_t sub) const;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t base_;
  double scale_ = 1.0;
};

}  // namespace dysonflow
