#include "evopref/strategy_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "evopref/errors.hpp"

namespace evopref {

const char* to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::Behavioral:
      return "behavioral";
    case StrategyKind::Rational:
      return "rational";
    case StrategyKind::Handshake:
      return "handshake";
  }
  return "unknown";
}

Strategy Strategy::behavioral(std::vector<double> actions) {
  if (actions.empty()) throw InvalidArgument("behavioral strategy needs at least one action");
  for (double a : actions) {
    if (!std::isfinite(a)) throw InvalidArgument("behavioral action must be finite");
  }
  return Strategy(StrategyKind::Behavioral, std::move(actions), 0.0);
}

Strategy Strategy::rational(double alpha) {
  if (!std::isfinite(alpha)) throw InvalidArgument("preference parameter must be finite");
  return Strategy(StrategyKind::Rational, {}, alpha);
}

Strategy Strategy::handshake() { return Strategy(StrategyKind::Handshake, {}, 0.0); }

double Strategy::action(std::size_t game) const {
  if (!is_behavioral()) throw InvalidArgument("only behavioral strategies carry actions");
  return actions_.at(game);
}

std::string Strategy::describe() const {
  std::ostringstream os;
  os.precision(9);
  switch (kind_) {
    case StrategyKind::Behavioral:
      os << "B(";
      for (std::size_t k = 0; k < actions_.size(); ++k) os << (k ? ", " : "") << actions_[k];
      os << ")";
      break;
    case StrategyKind::Rational:
      os << "R(" << alpha_ << ")";
      break;
    case StrategyKind::Handshake:
      os << "H";
      break;
  }
  return os.str();
}

Environment::Environment(std::vector<GameParams> games, std::vector<double> proportions)
    : games_(std::move(games)), proportions_(std::move(proportions)) {
  if (games_.empty()) throw InvalidArgument("environment needs at least one game");
  if (games_.size() != proportions_.size()) {
    throw InvalidArgument("environment: games and proportions differ in length");
  }
  for (const auto& g : games_) g.validate();
  double total = 0.0;
  for (double p : proportions_) {
    if (!(p >= 0.0)) throw InvalidArgument("environment: proportions must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("environment: proportions must sum to 1");
  }
}

Environment Environment::single(const GameParams& g) { return Environment({g}, {1.0}); }

Environment Environment::two_games(double kappa1, double kappa2, double p, double m) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("environment: p must lie in [0, 1]");
  return Environment({GameParams{kappa1, m}, GameParams{kappa2, m}}, {p, 1.0 - p});
}

double Environment::max_scale() const noexcept {
  double s = 0.0;
  for (const auto& g : games_) s = std::max(s, g.m);
  return s;
}

void check_compatible(const Strategy& s, const Environment& env) {
  if (s.is_behavioral() && s.actions().size() != env.size()) {
    std::ostringstream os;
    os << "behavioral strategy has " << s.actions().size() << " actions but the environment has "
       << env.size() << " games";
    throw InvalidArgument(os.str());
  }
}

namespace {

// Action a strategy plays against itself; what a handshake mimics.
double self_play_action(const Strategy& s, const GameParams& g, std::size_t game) {
  switch (s.kind()) {
    case StrategyKind::Behavioral:
      return s.action(game);
    case StrategyKind::Rational:
      return nash_equilibrium(g, s.alpha(), s.alpha()).own;
    case StrategyKind::Handshake:
      return efficient_action(g);
  }
  return 0.0;
}

}  // namespace

double resolve_action(const Strategy& own, const Strategy& other, const Environment& env,
                      std::size_t game) {
  const GameParams& g = env.game(game);
  switch (own.kind()) {
    case StrategyKind::Behavioral:
      return own.action(game);
    case StrategyKind::Rational:
      switch (other.kind()) {
        case StrategyKind::Behavioral:
          return best_response(g, other.action(game), own.alpha());
        case StrategyKind::Rational:
          return nash_equilibrium(g, own.alpha(), other.alpha()).own;
        case StrategyKind::Handshake:
          // The handshake selects the rational player's self-play equilibrium.
          return nash_equilibrium(g, own.alpha(), own.alpha()).own;
      }
      break;
    case StrategyKind::Handshake:
      return self_play_action(other, g, game);
  }
  return 0.0;
}

double base_fitness(const Strategy& own, const Strategy& other, const Environment& env) {
  check_compatible(own, env);
  check_compatible(other, env);
  double total = 0.0;
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double p = env.proportion(k);
    if (p == 0.0) continue;
    const double ai = resolve_action(own, other, env, k);
    const double aj = resolve_action(other, own, env, k);
    total += p * payoff(env.game(k), ai, aj);
  }
  return total;
}

}  // namespace evopref
