#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evopref/externality_game.hpp"

namespace evopref {

enum class StrategyKind { Behavioral, Rational, Handshake };

[[nodiscard]] const char* to_string(StrategyKind kind) noexcept;

/// A member of B_K, R_K or the handshake class H.
///
/// Behavioral strategies commit to one action per game. Rational strategies
/// best-respond under subjective utility u_i + alpha u_j. A handshake strategy
/// is indifferent over outcomes: it mimics the action any other strategy plays
/// against itself, and plays the efficient action against another handshake.
class Strategy {
 public:
  static Strategy behavioral(std::vector<double> actions);
  static Strategy rational(double alpha);
  static Strategy handshake();

  [[nodiscard]] StrategyKind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_behavioral() const noexcept { return kind_ == StrategyKind::Behavioral; }
  [[nodiscard]] bool is_rational() const noexcept { return kind_ == StrategyKind::Rational; }
  [[nodiscard]] bool is_handshake() const noexcept { return kind_ == StrategyKind::Handshake; }

  /// Per-game actions; empty unless behavioral.
  [[nodiscard]] std::span<const double> actions() const noexcept { return actions_; }
  [[nodiscard]] double action(std::size_t game) const;
  /// Preference parameter; 0 unless rational.
  [[nodiscard]] double alpha() const noexcept { return alpha_; }

  [[nodiscard]] std::string describe() const;

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  Strategy(StrategyKind kind, std::vector<double> actions, double alpha)
      : kind_(kind), actions_(std::move(actions)), alpha_(alpha) {}

  StrategyKind kind_;
  std::vector<double> actions_;
  double alpha_;
};

/// A collection of games played with the given time proportions.
class Environment {
 public:
  Environment(std::vector<GameParams> games, std::vector<double> proportions);

  static Environment single(const GameParams& g);
  /// G_{kappa1} with proportion p and G_{kappa2} with proportion 1 - p.
  static Environment two_games(double kappa1, double kappa2, double p, double m = 1.0);

  [[nodiscard]] std::size_t size() const noexcept { return games_.size(); }
  [[nodiscard]] const GameParams& game(std::size_t k) const { return games_.at(k); }
  [[nodiscard]] double proportion(std::size_t k) const { return proportions_.at(k); }
  [[nodiscard]] std::span<const GameParams> games() const noexcept { return games_; }
  [[nodiscard]] std::span<const double> proportions() const noexcept { return proportions_; }
  /// Largest payoff scale m across games.
  [[nodiscard]] double max_scale() const noexcept;

 private:
  std::vector<GameParams> games_;
  std::vector<double> proportions_;
};

/// Throws InvalidArgument unless s is usable in env (behavioral arity = K).
void check_compatible(const Strategy& s, const Environment& env);

/// Action strategy `own` takes against `other` in game `game` of env.
/// Propagates SingularEquilibrium for rational-vs-rational pairs.
[[nodiscard]] double resolve_action(const Strategy& own, const Strategy& other,
                                    const Environment& env, std::size_t game);

/// Proportion-weighted base-game payoff of `own` against `other`, no penalties.
[[nodiscard]] double base_fitness(const Strategy& own, const Strategy& other,
                                  const Environment& env);

}  // namespace evopref
