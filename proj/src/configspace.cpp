#include "dysonflow/configspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dysonflow/error.hpp"

namespace dysonflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw DysonError(code, msg); }

}  // namespace

IndexRange gaps_between(long i, long j) {
  if (i == j) return {};
  return {std::min(i, j), std::max(i, j) - 1};
}

ParticleConfig::ParticleConfig(long offset, std::vector<double> positions)
    : offset_(offset), positions_(std::move(positions)) {
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    if (!std::isfinite(positions_[k])) {
      fail(ErrorCode::InvalidConfig, "non-finite particle position");
    }
    if (k > 0 && !(positions_[k - 1] < positions_[k])) {
      std::ostringstream os;
      os << "particles not strictly increasing at index " << offset_ + static_cast<long>(k);
      fail(ErrorCode::InvalidConfig, os.str());
    }
  }
}

ParticleConfig ParticleConfig::lattice(long first, long last, double spacing) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(std::max(0L, last - first + 1)));
  for (long i = first; i <= last; ++i) xs.push_back(spacing * static_cast<double>(i));
  return ParticleConfig(first, std::move(xs));
}

double ParticleConfig::at(long i) const {
  if (!contains(i)) {
    std::ostringstream os;
    os << "particle index " << i << " outside window [" << offset_ << ", " << last_index() << "]";
    fail(ErrorCode::OutOfWindow, os.str());
  }
  return (*this)[i];
}

GapConfig::GapConfig(long offset, std::vector<double> gaps, bool infinite_outside)
    : offset_(offset), gaps_(std::move(gaps)), infinite_outside_(infinite_outside) {
  for (double g : gaps_) {
    if (std::isnan(g) || !(g > 0.0)) fail(ErrorCode::InvalidConfig, "gaps must be positive");
    if (std::isinf(g) && !infinite_outside_) {
      fail(ErrorCode::InvalidConfig, "infinite gap without infinite_outside semantics");
    }
  }
}

double GapConfig::at(long key) const {
  if (keys().contains(key)) return (*this)[key];
  if (infinite_outside_) return kInf;
  std::ostringstream os;
  os << "gap key " << key << " outside window [" << keys().first << ", " << keys().last << "]";
  fail(ErrorCode::OutOfWindow, os.str());
}

bool GapConfig::all_finite() const {
  return std::all_of(gaps_.begin(), gaps_.end(), [](double g) { return std::isfinite(g); });
}

void SpaceParams::validate() const {
  std::ostringstream os;
  if (!(alpha > 0.0 && alpha < 1.0)) os << " alpha must lie in (0,1);";
  if (!(rho > 0.0)) os << " rho must be positive;";
  if (!(p > 1.0)) os << " p must exceed 1;";
  if (!(gamma > 0.0)) os << " gamma must be positive;";
  if (!os.str().empty()) fail(ErrorCode::Precondition, "space parameters:" + os.str());
}

AnchoredGapConfig to_gaps(const ParticleConfig& x) {
  if (!x.contains(0)) fail(ErrorCode::AnchorMissing, "particle window does not contain index 0");
  std::vector<double> gaps;
  gaps.reserve(x.size() - 1);
  for (long i = x.offset(); i < x.last_index(); ++i) gaps.push_back(x[i + 1] - x[i]);
  return {x[0], GapConfig(x.offset(), std::move(gaps))};
}

ParticleConfig from_gaps(const AnchoredGapConfig& g) {
  const GapConfig& y = g.gaps;
  const IndexRange window = y.particle_window();
  if (!window.contains(0)) fail(ErrorCode::AnchorMissing, "gap window does not touch particle 0");
  if (!y.all_finite()) fail(ErrorCode::NotInvertible, "infinite gap cannot be mapped to particles");
  std::vector<double> xs(static_cast<std::size_t>(window.size()));
  const auto local = [&](long i) { return static_cast<std::size_t>(i - window.first); };
  xs[local(0)] = g.x0;
  for (long i = 1; i <= window.last; ++i) xs[local(i)] = xs[local(i - 1)] + y[i - 1];
  for (long i = -1; i >= window.first; --i) xs[local(i)] = xs[local(i + 1)] - y[i];
  return ParticleConfig(window.first, std::move(xs));
}

double avg_power(const GapConfig& y, IndexRange keys, double p) {
  if (keys.empty()) return 0.0;
  double sum = 0.0;
  for (long k = keys.first; k <= keys.last; ++k) {
    const double v = y.at(k);
    if (std::isinf(v)) return kInf;
    sum += p == 1.0 ? v : std::pow(v, p);
  }
  return sum / static_cast<double>(keys.size());
}

namespace {

// Averages over (0, m) for m = 1..m_max (direction +1) or m = -1..-m_max.
// Entry m-1 holds the average over m gaps.
std::vector<double> origin_averages(const GapConfig& y, long m_max, int direction, double p) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m_max));
  double sum = 0.0;
  for (long m = 1; m <= m_max; ++m) {
    const long key = direction > 0 ? m - 1 : -m;
    const double v = y.at(key);
    sum += p == 1.0 ? v : std::pow(v, p);
    out.push_back(sum / static_cast<double>(m));
  }
  return out;
}

}  // namespace

double alpha_norm(const GapConfig& y, const SpaceParams& params, long m_max) {
  double best = 0.0;
  for (int dir : {+1, -1}) {
    const auto avgs = origin_averages(y, m_max, dir, 1.0);
    for (long m = 1; m <= m_max; ++m) {
      const double v = std::abs(avgs[static_cast<std::size_t>(m - 1)] - params.rho) *
                       std::pow(static_cast<double>(m), params.alpha);
      best = std::max(best, v);
    }
  }
  return best;
}

MembershipReport membership_report(const GapConfig& y, const SpaceParams& params, long m_max) {
  MembershipReport r;
  r.alpha_norm = alpha_norm(y, params, m_max);
  for (int dir : {+1, -1}) {
    for (double v : origin_averages(y, m_max, dir, params.p)) r.sup_avg_p = std::max(r.sup_avg_p, v);
  }
  r.min_gap = kInf;
  r.max_gap = 0.0;
  for (long k = -m_max; k <= m_max - 1; ++k) {
    const double v = y.at(k);
    r.min_gap = std::min(r.min_gap, v);
    r.max_gap = std::max(r.max_gap, v);
  }
  return r;
}

double h_stat(const GapConfig& y, long i, long j) {
  if (i == j) fail(ErrorCode::Precondition, "h_stat needs i != j");
  double best = kInf;
  double sum = 0.0;
  const long step = j > i ? 1 : -1;
  for (long ip = i + step; ; ip += step) {
    sum += y.at(step > 0 ? ip - 1 : ip);
    best = std::min(best, sum / static_cast<double>(std::abs(ip - i)));
    if (ip == j) break;
  }
  return best;
}

namespace {

// Calls visit(count, distance) for j = i ± 1, ..., i_end, where count is
// |(i, j) ∩ A|.  Stops early when visit returns true.
template <class Visit>
void walk_counts(std::span<const long> keys, long i, long i_end, Visit&& visit) {
  if (i_end == i) return;
  long count = 0;
  if (i_end > i) {
    auto it = std::lower_bound(keys.begin(), keys.end(), i);
    for (long j = i + 1; j <= i_end; ++j) {
      while (it != keys.end() && *it == j - 1) {
        ++count;
        ++it;
      }
      if (visit(count, j - i)) return;
    }
  } else {
    auto it = std::upper_bound(keys.begin(), keys.end(), i - 1);
    for (long j = i - 1; j >= i_end; --j) {
      while (it != keys.begin() && *(it - 1) == j) {
        ++count;
        --it;
      }
      if (visit(count, i - j)) return;
    }
  }
}

}  // namespace

double g_freq(std::span<const long> sorted_keys, long i, long i_end) {
  double best = 0.0;
  walk_counts(sorted_keys, i, i_end, [&](long count, long dist) {
    best = std::max(best, static_cast<double>(count) / static_cast<double>(dist));
    return false;
  });
  return best;
}

bool g_freq_exceeds(std::span<const long> sorted_keys, long i, long i_end, long n) {
  bool hit = false;
  walk_counts(sorted_keys, i, i_end, [&](long count, long dist) {
    hit = n * count > dist;
    return hit;
  });
  return hit;
}

std::optional<long> goodset_find(const GapConfig& y, long i1, long i2, long i3, double gamma) {
  const bool right = i1 < i2 && i2 <= i3;
  const bool left = i3 <= i2 && i2 < i1;
  if (!right && !left) fail(ErrorCode::Precondition, "goodset_find needs i1 < i2 <= i3 or mirror");
  if (!(gamma > 0.0)) fail(ErrorCode::Precondition, "goodset_find needs gamma > 0");
  const long step = right ? 1 : -1;

  // Counting function f(i) = y summed over the gaps between i1 and i, walked
  // outward from i1; averages use the same running sums.
  double f = 0.0;
  std::optional<long> last_not_above = i1;
  for (long i = i1 + step;; i += step) {
    const double v = y.at(right ? i - 1 : i);
    f = std::isinf(v) ? kInf : f + v;
    const double avg = f / static_cast<double>(std::abs(i - i1));
    const bool beyond_i2 = right ? i >= i2 : i <= i2;
    if (beyond_i2) {
      if (!(avg > gamma)) return std::nullopt;
    } else if (avg <= gamma) {
      last_not_above = i;
    }
    if (i == i3) break;
  }
  return last_not_above;
}

std::vector<long> topple_set(std::span<const long> sorted_keys, long n, Direction dir,
                             IndexRange window) {
  if (n < 1) fail(ErrorCode::Precondition, "topple_set needs n >= 1");
  std::vector<long> out;
  const long edge = dir == Direction::Right ? window.last : window.first;
  for (long i = window.first; i <= window.last; ++i) {
    if (g_freq_exceeds(sorted_keys, i, edge, n)) out.push_back(i);
  }
  if (static_cast<long>(out.size()) > n * static_cast<long>(sorted_keys.size())) {
    std::ostringstream os;
    os << "toppling bound violated: " << out.size() << " > " << n << " * " << sorted_keys.size();
    fail(ErrorCode::InvariantViolation, os.str());
  }
  return out;
}

}  // namespace dysonflow
