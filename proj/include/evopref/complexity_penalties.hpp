#pragma once

#include <cstddef>
#include <span>

#include "evopref/strategy_space.hpp"

namespace evopref {

/// Complexity costs: eps_r for rational optimisation, eps_p per distinct
/// game-specific parameter, eps_h for the handshake's equilibrium selection.
struct PenaltyConfig {
  double eps_r = 0.0;
  double eps_p = 0.0;
  double eps_h = 0.0;

  void validate() const;
};

/// Actions closer than this count as the same parameter.
inline constexpr double kActionQuantum = 1e-9;

/// Number of distinct values after rounding to kActionQuantum.
[[nodiscard]] std::size_t distinct_action_count(std::span<const double> actions);

/// Behavioral: eps_p * distinct actions; rational: eps_r + eps_p; handshake: eps_h.
/// A single game with eps_p = 0 gives the within-game cost eps_r * [s in R].
[[nodiscard]] double complexity_cost(const Strategy& s, const PenaltyConfig& pc);

[[nodiscard]] double penalized_fitness(const Strategy& own, const Strategy& other,
                                       const Environment& env, const PenaltyConfig& pc);

}  // namespace evopref
