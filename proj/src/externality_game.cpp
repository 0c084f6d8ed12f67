#include "evopref/externality_game.hpp"

#include <cmath>
#include <sstream>

#include "evopref/errors.hpp"

namespace evopref {

bool GameParams::valid() const noexcept {
  const bool kappa_ok = std::isfinite(kappa) && kappa >= -2.0 && kappa < 1.0 && kappa != 0.0;
  return kappa_ok && std::isfinite(m) && m > 0.0;
}

void GameParams::validate() const {
  if (!valid()) {
    std::ostringstream os;
    os << "invalid externality game (kappa=" << kappa << ", m=" << m
       << "): need kappa in [-2,0)U(0,1) and m > 0";
    throw InvalidArgument(os.str());
  }
}

double singularity_tolerance(const GameParams& g) noexcept { return 1e-8 * g.m * g.m; }

double payoff(const GameParams& g, double own, double other) noexcept {
  return own * (g.kappa * other + g.m - own);
}

double subjective_utility(const GameParams& g, double alpha, double own, double other) noexcept {
  return payoff(g, own, other) + alpha * payoff(g, other, own);
}

double best_response(const GameParams& g, double opponent_action, double alpha) noexcept {
  // d/da [a(kb + m - a) + alpha b(ka + m - b)] = kb + m - 2a + alpha k b
  return (g.m + g.kappa * (1.0 + alpha) * opponent_action) / 2.0;
}

ActionPair nash_equilibrium(const GameParams& g, double alpha_i, double alpha_j) {
  const double xi = 1.0 + alpha_i;
  const double xj = 1.0 + alpha_j;
  const double denom = 4.0 - g.kappa * g.kappa * xi * xj;
  if (!(std::abs(denom) >= singularity_tolerance(g))) {
    std::ostringstream os;
    os << "subjective equilibrium is singular at alpha_i=" << alpha_i << ", alpha_j=" << alpha_j
       << " (kappa=" << g.kappa << ")";
    throw SingularEquilibrium(os.str());
  }
  return {g.m * (2.0 + g.kappa * xi) / denom, g.m * (2.0 + g.kappa * xj) / denom};
}

double base_equilibrium_action(const GameParams& g) noexcept { return g.m / (2.0 - g.kappa); }

double base_equilibrium_payoff(const GameParams& g) noexcept {
  const double a = base_equilibrium_action(g);
  return payoff(g, a, a);
}

double efficient_action(const GameParams& g) noexcept { return g.m / (2.0 * (1.0 - g.kappa)); }

double ess_alpha(const GameParams& g) noexcept { return g.kappa / (2.0 - g.kappa); }

double commitment_action(const GameParams& g, double alpha) {
  const double denom = 2.0 - g.kappa * g.kappa * (1.0 + alpha);
  if (!(denom > singularity_tolerance(g))) {
    std::ostringstream os;
    os << "no finite commitment action against alpha=" << alpha << " (kappa=" << g.kappa << ")";
    throw SingularEquilibrium(os.str());
  }
  return g.m * (2.0 + g.kappa) / (2.0 * denom);
}

}  // namespace evopref
