#pragma once

// Closed-form mathematics of the symmetric externality game
//   u_i(a_i, a_j) = a_i (kappa a_j + m - a_i)
// and of its subjective variants V_i = u_i + alpha u_j.

namespace evopref {

struct GameParams {
  double kappa = 0.5;
  double m = 1.0;

  /// Throws InvalidArgument unless kappa in [-2, 0) U (0, 1) and m > 0.
  void validate() const;
  [[nodiscard]] bool valid() const noexcept;
};

/// Actions of the row ("own") and column ("other") player.
struct ActionPair {
  double own = 0.0;
  double other = 0.0;
};

/// Denominator magnitude below which the subjective equilibrium is treated
/// as singular.
[[nodiscard]] double singularity_tolerance(const GameParams& g) noexcept;

[[nodiscard]] double payoff(const GameParams& g, double own, double other) noexcept;

[[nodiscard]] double subjective_utility(const GameParams& g, double alpha, double own,
                                        double other) noexcept;

/// Unique maximiser of own subjective utility against a fixed opponent action.
[[nodiscard]] double best_response(const GameParams& g, double opponent_action,
                                   double alpha) noexcept;

/// Unique equilibrium of G(alpha_i, alpha_j). Throws SingularEquilibrium when
/// 4 - kappa^2 (1+alpha_i)(1+alpha_j) is within singularity_tolerance of 0.
[[nodiscard]] ActionPair nash_equilibrium(const GameParams& g, double alpha_i, double alpha_j);

/// Symmetric equilibrium action of the base game, m / (2 - kappa).
[[nodiscard]] double base_equilibrium_action(const GameParams& g) noexcept;

/// Payoff of the base-game equilibrium, m^2 / (2 - kappa)^2.
[[nodiscard]] double base_equilibrium_payoff(const GameParams& g) noexcept;

/// Maximiser of total welfare 2a(m - (1 - kappa)a) over symmetric profiles.
[[nodiscard]] double efficient_action(const GameParams& g) noexcept;

/// Preference parameter of the evolutionarily stable rational population,
/// kappa / (2 - kappa).
[[nodiscard]] double ess_alpha(const GameParams& g) noexcept;

/// Committed action maximising u_i(a, best_response(a; alpha)) against a rational
/// opponent: m(2 + kappa) / (2(2 - kappa^2 (1 + alpha))). Throws
/// SingularEquilibrium unless the objective is strictly concave.
[[nodiscard]] double commitment_action(const GameParams& g, double alpha);

}  // namespace evopref
