#pragma once

// Finite-window particle and gap configurations.
//
// Indexing convention used throughout the library: particles carry integer
// indices i, gaps carry half-integer indices a = k + 1/2 and are stored under
// the integer key k.  Gap k sits between particles k and k + 1, so a particle
// window [i1, i2] owns the gap keys [i1, i2 - 1].

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dysonflow {

// Inclusive integer range; empty when last < first.
struct IndexRange {
  long first = 0;
  long last = -1;

  bool empty() const { return last < first; }
  long size() const { return empty() ? 0 : last - first + 1; }
  bool contains(long i) const { return i >= first && i <= last; }
  bool contains(const IndexRange& other) const {
    return other.empty() || (contains(other.first) && contains(other.last));
  }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

// Gap keys of the half-integers strictly between particle indices i and j,
// with the convention (i, j) = (j, i).
IndexRange gaps_between(long i, long j);

class ParticleConfig {
 public:
  ParticleConfig() = default;
  // Throws InvalidConfig unless positions are finite and strictly increasing.
  ParticleConfig(long offset, std::vector<double> positions);

  // spacing * i for i in [first, last].
  static ParticleConfig lattice(long first, long last, double spacing = 1.0);

  long offset() const { return offset_; }
  long last_index() const { return offset_ + static_cast<long>(positions_.size()) - 1; }
  std::size_t size() const { return positions_.size(); }
  IndexRange indices() const { return {offset_, last_index()}; }
  bool contains(long i) const { return indices().contains(i); }

  double operator[](long i) const { return positions_[static_cast<std::size_t>(i - offset_)]; }
  double at(long i) const;
  std::span<const double> positions() const { return positions_; }

  friend bool operator==(const ParticleConfig&, const ParticleConfig&) = default;

 private:
  long offset_ = 0;
  std::vector<double> positions_;
};

class GapConfig {
 public:
  GapConfig() = default;
  // Finite entries must be > 0; +inf entries are accepted only when
  // infinite_outside is set (the window then models a configuration whose
  // neighbours beyond the window have escaped to infinity).
  GapConfig(long offset, std::vector<double> gaps, bool infinite_outside = false);

  long offset() const { return offset_; }
  IndexRange keys() const { return {offset_, offset_ + static_cast<long>(gaps_.size()) - 1}; }
  std::size_t size() const { return gaps_.size(); }
  bool infinite_outside() const { return infinite_outside_; }
  // Particle indices spanned by the stored gaps.
  IndexRange particle_window() const {
    return {offset_, offset_ + static_cast<long>(gaps_.size())};
  }

  double operator[](long key) const { return gaps_[static_cast<std::size_t>(key - offset_)]; }
  // +inf outside the window when infinite_outside, OutOfWindow otherwise.
  double at(long key) const;
  std::span<const double> values() const { return gaps_; }
  bool all_finite() const;

  friend bool operator==(const GapConfig&, const GapConfig&) = default;

 private:
  long offset_ = 0;
  std::vector<double> gaps_;
  bool infinite_outside_ = false;
};

struct AnchoredGapConfig {
  double x0 = 0.0;
  GapConfig gaps;
};

struct SpaceParams {
  double alpha = 0.3;
  double rho = 1.0;
  double p = 2.0;
  double gamma = 1.0;

  // Throws Precondition on alpha outside (0,1), rho <= 0, p <= 1 or gamma <= 0.
  void validate() const;
};

AnchoredGapConfig to_gaps(const ParticleConfig& x);
ParticleConfig from_gaps(const AnchoredGapConfig& g);

// |I|^-1 sum_{a in I} y_a^p over gap keys; 0 for an empty range, +inf if an
// infinite gap falls inside.
double avg_power(const GapConfig& y, IndexRange keys, double p = 1.0);

// Average over the gaps strictly between particle indices i and j.
inline double avg_between(const GapConfig& y, long i, long j, double p = 1.0) {
  return avg_power(y, gaps_between(i, j), p);
}

// max_{0<|m|<=m_max} |avg_(0,m)(y) - rho| |m|^alpha.  A truncated proxy for
// the supremum over all m; needs gap keys [-m_max, m_max - 1].
double alpha_norm(const GapConfig& y, const SpaceParams& params, long m_max);

struct MembershipReport {
  double alpha_norm = 0.0;
  double sup_avg_p = 0.0;  // max_{0<|m|<=m_max} avg^p_(0,m)
  double min_gap = 0.0;
  double max_gap = 0.0;
};

MembershipReport membership_report(const GapConfig& y, const SpaceParams& params, long m_max);

// inf over i' in (i, j] of avg_(i,i')(y).
double h_stat(const GapConfig& y, long i, long j);

// Occurrence frequency of the sorted key set A seen from particle index i:
// sup over j in (i, i_end] of |(i,j) ∩ A| / |j - i|.  Direction follows the
// sign of i_end - i; returns 0 when i_end == i.
double g_freq(std::span<const long> sorted_keys, long i, long i_end);

// Exact form of g_freq(A, i, i_end) > 1/n using integer arithmetic.
bool g_freq_exceeds(std::span<const long> sorted_keys, long i, long i_end, long n);

// Index i* produced by the counting-function argument: for i1 < i2 <= i3
// (or the mirror i3 <= i2 < i1), if avg_(i1,i)(y) > gamma for every i between
// i2 and i3, returns the last index between i1 and i2 whose counting function
// lies on or below the line of slope gamma through i1; h_stat(y, i*, i3) >= gamma
// then holds.  Returns nullopt when the hypothesis fails.
std::optional<long> goodset_find(const GapConfig& y, long i1, long i2, long i3, double gamma);

enum class Direction { Right, Left };

// {i in window : g_freq(A, i, window edge in direction) > 1/n}.  Throws
// InvariantViolation if the set is larger than n |A|.
std::vector<long> topple_set(std::span<const long> sorted_keys, long n, Direction dir,
                             IndexRange window);

}  // namespace dysonflow
