#include "evopref/complexity_penalties.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "evopref/errors.hpp"

namespace evopref {

void PenaltyConfig::validate() const {
  auto ok = [](double e) { return std::isfinite(e) && e >= 0.0; };
  if (!ok(eps_r) || !ok(eps_p) || !ok(eps_h)) {
    throw InvalidArgument("complexity penalties must be finite and nonnegative");
  }
}

std::size_t distinct_action_count(std::span<const double> actions) {
  std::vector<double> q;
  q.reserve(actions.size());
  for (double a : actions) q.push_back(std::round(a / kActionQuantum));
  std::sort(q.begin(), q.end());
  return static_cast<std::size_t>(std::unique(q.begin(), q.end()) - q.begin());
}

double complexity_cost(const Strategy& s, const PenaltyConfig& pc) {
  switch (s.kind()) {
    case StrategyKind::Behavioral:
      return pc.eps_p * static_cast<double>(distinct_action_count(s.actions()));
    case StrategyKind::Rational:
      return pc.eps_r + pc.eps_p;
    case StrategyKind::Handshake:
      return pc.eps_h;
  }
  return 0.0;
}

double penalized_fitness(const Strategy& own, const Strategy& other, const Environment& env,
                         const PenaltyConfig& pc) {
  return base_fitness(own, other, env) - complexity_cost(own, pc);
}

}  // namespace evopref
