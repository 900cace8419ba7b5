#pragma once

#include <optional>
#include <random>

#include "dysonflow/error.hpp"

namespace testutil {

template <class F>
std::optional<dysonflow::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const dysonflow::DysonError& e) {
    return e.code();
  }
  return std::nullopt;
}

using Rng = std::mt19937_64;

inline long pick(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testutil
