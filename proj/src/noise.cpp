#include "dysonflow/noise.hpp"

#include <cmath>
#include <random>

namespace dysonflow {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

PhiloxStream::PhiloxStream(std::array<std::uint32_t, 2> key, std::uint32_t c0, std::uint32_t c1)
    : key_(key), c0_(c0), c1_(c1) {}

PhiloxStream::result_type PhiloxStream::operator()() {
  if (used_ == 4) {
    buf_ = philox4x32({c0_, c1_, block_++, 0x5A17u}, key_);
    used_ = 0;
  }
  return buf_[static_cast<std::size_t>(used_++)];
}

NoiseSource::NoiseSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), base_(splitmix(splitmix(seed) ^ stream)) {}

NoiseSource NoiseSource::silent() {
  NoiseSource n;
  n.scale_ = 0.0;
  return n;
}

std::array<std::uint32_t, 2> NoiseSource::key_for(NoiseDomain domain, int level,
                                                   std::uint64_t sub) const {
  const auto tag = (static_cast<std::uint64_t>(domain) << 56) ^ static_cast<std::uint64_t>(level);
  std::uint64_t h = splitmix(base_ ^ tag);
  h = splitmix(h ^ sub);
  return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
}

double NoiseSource::normal(NoiseDomain domain, long i, long n, int level, std::uint64_t sub) const {
  PhiloxStream gen(key_for(domain, level, sub), static_cast<std::uint32_t>(i),
                   static_cast<std::uint32_t>(n));
  std::normal_distribution<double> dist;
  return dist(gen);
}

double NoiseSource::particle_increment(long i, long n, double dt, int level,
                                       std::uint64_t piece) const {
  double d = std::sqrt(dt) * normal(NoiseDomain::Particle, i, n);
  double h = dt;
  for (int l = 1; l <= level; ++l) {
    const std::uint64_t node = piece >> (level - l);
    const double left = 0.5 * d + 0.5 * std::sqrt(h) * normal(NoiseDomain::Particle, i, n, l, node >> 1);
    d = (node & 1u) ? d - left : left;
    h *= 0.5;
  }
  return scale_ * d;
}

double NoiseSource::brownian(long i, long n_steps, double dt) const {
  double b = 0.0;
  for (long n = 0; n < n_steps; ++n) b += particle_increment(i, n, dt);
  return b;
}

}  // namespace dysonflow
