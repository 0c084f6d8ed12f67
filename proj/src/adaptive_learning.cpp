#include "evopref/adaptive_learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <tuple>

#include "evopref/errors.hpp"

namespace evopref {

const char* to_string(LearningSpace space) noexcept {
  switch (space) {
    case LearningSpace::Full:
      return "full";
    case LearningSpace::RationalOnly:
      return "rational";
    case LearningSpace::BehavioralOnly:
      return "behavioral";
  }
  return "?";
}

const char* to_string(FinalKind kind) noexcept {
  switch (kind) {
    case FinalKind::Behavioral:
      return "behavioral";
    case FinalKind::Rational:
      return "rational";
    case FinalKind::Mixed:
      return "mixed";
  }
  return "?";
}

void SimConfig::validate() const {
  if (population_size < 2) throw InvalidArgument("population_size must be at least 2");
  if (rounds < 1) throw InvalidArgument("rounds must be at least 1");
  if (!(q1 >= 0.0 && q1 <= 1.0)) throw InvalidArgument("q1 must lie in [0, 1]");
  if (q_freeze_round < 0) throw InvalidArgument("q_freeze_round must be nonnegative");
  if (!(action_bound > 0.0)) throw InvalidArgument("action_bound must be positive");
  if (!(ascent.step > 0.0) || ascent.max_iterations < 1 || !(ascent.tolerance > 0.0)) {
    throw InvalidArgument("gradient ascent needs positive step, iterations and tolerance");
  }
  pc.validate();
}

Strategy AgentParams::strategy() const {
  return behavioral ? Strategy::behavioral(actions) : Strategy::rational(alpha);
}

void AgentParams::adopt(const Strategy& s) {
  if (s.is_behavioral()) {
    behavioral = true;
    actions.assign(s.actions().begin(), s.actions().end());
  } else if (s.is_rational()) {
    behavioral = false;
    alpha = s.alpha();
  } else {
    throw InvalidArgument("agents cannot adopt handshake strategies");
  }
}

AgentParams sample_agent(const SimConfig& cfg, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  AgentParams a;
  a.alpha = normal(rng);
  a.actions.resize(cfg.env.size());
  for (double& x : a.actions) x = normal(rng);
  a.behavioral = coin(rng);
  if (cfg.space == LearningSpace::RationalOnly) a.behavioral = false;
  if (cfg.space == LearningSpace::BehavioralOnly) a.behavioral = true;
  return a;
}

Population init_population(const SimConfig& cfg, Rng& rng) {
  Population pop;
  pop.agents.reserve(cfg.population_size);
  for (std::size_t i = 0; i < cfg.population_size; ++i) pop.agents.push_back(sample_agent(cfg, rng));
  return pop;
}

Population init_population(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  return init_population(cfg, rng);
}

double mutation_prob(int t, const SimConfig& cfg) {
  if (t < 1) throw InvalidArgument("mutation_prob: rounds start at 1");
  double q = cfg.q1;
  for (int s = 1; s < t; ++s) {
    if (s > cfg.q_freeze_round) return 0.0;
    q *= static_cast<double>(s) / static_cast<double>(s + 1);
  }
  return q;
}

// ---------------------------------------------------------------------------
// Behavioral best responses

namespace {

// p * (c2 a^2 + c1 a): contribution of a committed action a in one game.
struct Quadratic {
  double c2 = 0.0;
  double c1 = 0.0;
  [[nodiscard]] double operator()(double a) const { return (c2 * a + c1) * a; }
};

Quadratic commitment_objective(const Strategy& opponent, const GameParams& g, std::size_t k,
                               double weight) {
  const double kp = g.kappa;
  switch (opponent.kind()) {
    case StrategyKind::Behavioral:
      return {-weight, weight * (kp * opponent.action(k) + g.m)};
    case StrategyKind::Rational:
      // u(a, BR(a; alpha)) with BR(a; alpha) = (m + kappa (1 + alpha) a) / 2
      return {weight * (kp * kp * (1.0 + opponent.alpha()) / 2.0 - 1.0),
              weight * g.m * (1.0 + kp / 2.0)};
    case StrategyKind::Handshake:
      return {weight * (kp - 1.0), weight * g.m};
  }
  return {};
}

double maximize_on_box(const Quadratic& q, double bound) {
  if (q.c2 < 0.0) return std::clamp(-q.c1 / (2.0 * q.c2), -bound, bound);
  return q(bound) >= q(-bound) ? bound : -bound;
}

}  // namespace

Strategy best_response_behavioral(const Strategy& opponent, const Environment& env,
                                  const PenaltyConfig& pc, double action_bound) {
  check_compatible(opponent, env);
  const std::size_t K = env.size();
  const double bound = action_bound * env.max_scale();

  Quadratic total;
  std::vector<Quadratic> per_game;
  per_game.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    per_game.push_back(commitment_objective(opponent, env.game(k), k, env.proportion(k)));
    total.c2 += per_game.back().c2;
    total.c1 += per_game.back().c1;
  }
  const double shared_action = maximize_on_box(total, bound);
  Strategy shared = Strategy::behavioral(std::vector<double>(K, shared_action));
  if (K == 1) return shared;

  std::vector<double> split(K);
  for (std::size_t k = 0; k < K; ++k) {
    split[k] = env.proportion(k) == 0.0 ? shared_action : maximize_on_box(per_game[k], bound);
  }
  Strategy separate = Strategy::behavioral(std::move(split));
  const double v_shared = penalized_fitness(shared, opponent, env, pc);
  const double v_separate = penalized_fitness(separate, opponent, env, pc);
  return v_separate > v_shared ? separate : shared;
}

// ---------------------------------------------------------------------------
// Rational best responses

ValueAndSlope rational_fitness(double beta, const Strategy& opponent, const Environment& env,
                               double action_bound) {
  check_compatible(opponent, env);
  const double bound = action_bound * env.max_scale();
  const double x = 1.0 + beta;
  ValueAndSlope out;
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double p = env.proportion(k);
    if (p == 0.0) continue;
    const GameParams& g = env.game(k);
    const double kp = g.kappa;
    const double m = g.m;
    double ai = 0, aj = 0, dai = 0, daj = 0;
    switch (opponent.kind()) {
      case StrategyKind::Behavioral: {
        aj = opponent.action(k);
        ai = (m + kp * x * aj) / 2.0;
        dai = kp * aj / 2.0;
        break;
      }
      case StrategyKind::Rational: {
        const double y = 1.0 + opponent.alpha();
        const double d = 4.0 - kp * kp * x * y;
        if (!(std::abs(d) >= singularity_tolerance(g))) return {};
        const double dd = -kp * kp * y;
        const double ni = m * (2.0 + kp * x);
        const double nj = m * (2.0 + kp * y);
        ai = ni / d;
        aj = nj / d;
        dai = (m * kp * d - ni * dd) / (d * d);
        daj = -nj * dd / (d * d);
        break;
      }
      case StrategyKind::Handshake: {
        // The handshake selects this player's self-play equilibrium.
        const double d = 4.0 - kp * kp * x * x;
        if (!(std::abs(d) >= singularity_tolerance(g))) return {};
        const double dd = -2.0 * kp * kp * x;
        const double n = m * (2.0 + kp * x);
        ai = aj = n / d;
        dai = daj = (m * kp * d - n * dd) / (d * d);
        break;
      }
    }
    if (!(std::abs(ai) <= bound) || !(std::abs(aj) <= bound)) return {};
    out.value += p * ai * (kp * aj + m - ai);
    out.slope += p * (dai * (kp * aj + m - 2.0 * ai) + ai * kp * daj);
  }
  out.feasible = std::isfinite(out.value) && std::isfinite(out.slope);
  return out;
}

RationalResponse best_response_rational(const Strategy& opponent, const Environment& env,
                                        const PenaltyConfig& pc,
                                        const GradientAscentConfig& ascent, double action_bound,
                                        std::span<const double> extra_starts) {
  std::vector<double> starts = ascent.starts;
  if (opponent.is_rational()) starts.push_back(opponent.alpha());
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());

  bool any = false;
  RationalResponse best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (double start : starts) {
    double x = start;
    ValueAndSlope cur = rational_fitness(x, opponent, env, action_bound);
    if (!cur.feasible) continue;
    double eta = ascent.step;
    bool converged = false;
    int it = 0;
    for (; it < ascent.max_iterations; ++it) {
      if (std::abs(cur.slope) < ascent.tolerance) {
        converged = true;
        break;
      }
      bool moved = false;
      while (eta * std::abs(cur.slope) > 1e-15 * std::max(1.0, std::abs(x))) {
        const double cand = x + eta * cur.slope;
        const ValueAndSlope next = rational_fitness(cand, opponent, env, action_bound);
        if (next.feasible && next.value > cur.value) {
          x = cand;
          cur = next;
          eta *= 2.0;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) {
        // Line search exhausted at machine precision: x is stationary to rounding.
        converged = true;
        break;
      }
    }
    if (!any || cur.value > best_value) {
      any = true;
      best_value = cur.value;
      best.strategy = Strategy::rational(x);
      best.converged = converged;
      best.iterations = it;
    }
  }
  if (!any) {
    throw NoAscentProgress("no admissible preference parameter against " + opponent.describe());
  }
  best.fitness = best_value - complexity_cost(best.strategy, pc);
  return best;
}

// ---------------------------------------------------------------------------
// Dynamics

Population step(const Population& pop, const SimConfig& cfg, int t, Rng& rng,
                std::vector<UpdateRecord>* log) {
  const std::size_t n = pop.agents.size();
  if (n < 2) throw InvalidArgument("step: population needs at least two agents");
  const double q = mutation_prob(t, cfg);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 2);

  std::vector<Strategy> snapshot;
  snapshot.reserve(n);
  for (const auto& a : pop.agents) snapshot.push_back(a.strategy());

  Population next = pop;
  next.round = t;
  if (log) log->assign(n, UpdateRecord{});
  for (std::size_t i = 0; i < n; ++i) {
    AgentParams& agent = next.agents[i];
    if (unit(rng) < q) {
      agent = sample_agent(cfg, rng);
      if (log) (*log)[i].mutated = true;
      continue;
    }
    std::size_t j = pick(rng);
    if (j >= i) ++j;
    const Strategy& opponent = snapshot[j];

    std::optional<Strategy> chosen;
    double chosen_value = -std::numeric_limits<double>::infinity();
    if (cfg.space != LearningSpace::RationalOnly) {
      Strategy b = best_response_behavioral(opponent, cfg.env, cfg.pc, cfg.action_bound);
      chosen_value = penalized_fitness(b, opponent, cfg.env, cfg.pc);
      chosen = std::move(b);
    }
    if (cfg.space != LearningSpace::BehavioralOnly) {
      try {
        std::vector<double> own;
        if (!pop.agents[i].behavioral) own.push_back(pop.agents[i].alpha);
        RationalResponse r = best_response_rational(opponent, cfg.env, cfg.pc, cfg.ascent,
                                                    cfg.action_bound, own);
        // Ties go to the behavioral response.
        if (!chosen || r.fitness > chosen_value + 1e-12) {
          chosen_value = r.fitness;
          chosen = std::move(r.strategy);
        }
      } catch (const NoAscentProgress&) {
      }
    }
    if (log) {
      auto& rec = (*log)[i];
      rec.opponent = j;
      try {
        rec.previous_fitness = penalized_fitness(snapshot[i], opponent, cfg.env, cfg.pc);
      } catch (const SingularEquilibrium&) {
        rec.previous_fitness = -std::numeric_limits<double>::infinity();
      }
      rec.new_fitness = chosen ? chosen_value : rec.previous_fitness;
    }
    if (chosen) agent.adopt(*chosen);
  }
  return next;
}

RoundSummary summarize(const Population& pop, const Environment& env) {
  RoundSummary s;
  s.round = pop.round;
  double alpha_sum = 0.0;
  std::vector<Strategy> strategies;
  for (const auto& a : pop.agents) {
    strategies.push_back(a.strategy());
    if (a.behavioral) {
      ++s.behavioral;
      s.distinct_actions = std::max(s.distinct_actions, distinct_action_count(a.actions));
    } else {
      ++s.rational;
      alpha_sum += a.alpha;
    }
  }
  s.mean_alpha = s.rational ? alpha_sum / static_cast<double>(s.rational)
                            : std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    for (std::size_t j = 0; j < strategies.size(); ++j) {
      if (i == j) continue;
      try {
        total += base_fitness(strategies[i], strategies[j], env) +
                 base_fitness(strategies[j], strategies[i], env);
        ++pairs;
      } catch (const SingularEquilibrium&) {
      }
    }
  }
  s.welfare = pairs ? total / static_cast<double>(pairs) : std::numeric_limits<double>::quiet_NaN();
  return s;
}

namespace {

using Key = std::tuple<bool, double, std::vector<double>>;

std::vector<Key> composition(const Population& p) {
  std::vector<Key> keys;
  keys.reserve(p.agents.size());
  for (const auto& a : p.agents) {
    if (a.behavioral) {
      keys.emplace_back(true, 0.0, a.actions);
    } else {
      keys.emplace_back(false, a.alpha, std::vector<double>{});
    }
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

bool same_composition(const Population& a, const Population& b, double tol) {
  if (a.agents.size() != b.agents.size()) return false;
  const auto ka = composition(a);
  const auto kb = composition(b);
  for (std::size_t i = 0; i < ka.size(); ++i) {
    const auto& [ba, xa, va] = ka[i];
    const auto& [bb, xb, vb] = kb[i];
    if (ba != bb || std::abs(xa - xb) > tol || va.size() != vb.size()) return false;
    for (std::size_t k = 0; k < va.size(); ++k) {
      if (std::abs(va[k] - vb[k]) > tol) return false;
    }
  }
  return true;
}

Trajectory run(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Trajectory tr;
  tr.populations.reserve(static_cast<std::size_t>(cfg.rounds) + 1);
  tr.populations.push_back(init_population(cfg, rng));
  for (int t = 1; t <= cfg.rounds; ++t) {
    tr.populations.push_back(step(tr.populations.back(), cfg, t, rng));
  }
  for (const auto& p : tr.populations) tr.summaries.push_back(summarize(p, cfg.env));

  const RoundSummary& last = tr.summaries.back();
  tr.final_kind = last.rational == 0    ? FinalKind::Behavioral
                  : last.behavioral == 0 ? FinalKind::Rational
                                         : FinalKind::Mixed;
  tr.final_mean_alpha = last.mean_alpha;
  tr.final_distinct_actions = last.distinct_actions;
  const std::size_t n = tr.summaries.size();
  tr.welfare = n >= 2 ? 0.5 * (tr.summaries[n - 1].welfare + tr.summaries[n - 2].welfare)
                      : last.welfare;

  const auto& pops = tr.populations;
  if (pops.size() >= 5) {
    tr.converged = true;
    for (std::size_t i = pops.size() - 4; i < pops.size(); ++i) {
      tr.converged = tr.converged && same_composition(pops[i], pops[i - 1]);
    }
  }
  if (pops.size() >= 6 && !tr.converged) {
    bool period2 = !same_composition(pops.back(), pops[pops.size() - 2]);
    for (std::size_t i = pops.size() - 4; i < pops.size(); ++i) {
      period2 = period2 && same_composition(pops[i], pops[i - 2]);
    }
    tr.oscillating = period2;
  }
  return tr;
}

}  // namespace evopref
