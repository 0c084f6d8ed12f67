#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "evopref/complexity_penalties.hpp"
#include "evopref/strategy_space.hpp"

namespace evopref {

/// Which strategy classes agents may adopt when best-responding.
enum class LearningSpace { Full, RationalOnly, BehavioralOnly };

[[nodiscard]] const char* to_string(LearningSpace space) noexcept;

struct GradientAscentConfig {
  double step = 0.05;  ///< initial learning rate; halved on rejection, doubled on success
  int max_iterations = 500;
  double tolerance = 1e-8;  ///< |d fitness / d alpha| at which a start has converged
  std::vector<double> starts{-1.0, -0.5, 0.0, 0.5, 1.0};
};

struct SimConfig {
  std::size_t population_size = 10;
  int rounds = 30;
  double q1 = 0.01;
  int q_freeze_round = 20;
  std::uint64_t seed = 1;
  Environment env = Environment::single(GameParams{});
  PenaltyConfig pc{};
  GradientAscentConfig ascent{};
  LearningSpace space = LearningSpace::Full;
  /// Admissible actions are [-action_bound * m, action_bound * m].
  double action_bound = 10.0;

  void validate() const;
};

/// (alpha, a_1..a_K, n): R(alpha) when n = 0, B(a_1..a_K) when n = 1.
struct AgentParams {
  double alpha = 0.0;
  std::vector<double> actions;
  bool behavioral = false;

  [[nodiscard]] Strategy strategy() const;
  void adopt(const Strategy& s);
};

struct Population {
  std::vector<AgentParams> agents;
  int round = 0;
};

using Rng = std::mt19937_64;

/// One draw from the initialisation distribution: alpha, a_k ~ N(0,1), n ~ Bern(1/2),
/// with n forced when the learning space is restricted.
[[nodiscard]] AgentParams sample_agent(const SimConfig& cfg, Rng& rng);
[[nodiscard]] Population init_population(const SimConfig& cfg, Rng& rng);
[[nodiscard]] Population init_population(const SimConfig& cfg);

/// q_1 = cfg.q1, q_{t+1} = q_t t/(t+1) while t <= cfg.q_freeze_round, else 0.
[[nodiscard]] double mutation_prob(int t, const SimConfig& cfg);

/// Fitness-maximising member of B_K against `opponent`: per-game optimal
/// actions (K parameters) or the best single shared action, whichever scores
/// higher after the per-parameter penalty. Actions are confined to
/// [-bound*m, bound*m].
[[nodiscard]] Strategy best_response_behavioral(const Strategy& opponent, const Environment& env,
                                                const PenaltyConfig& pc,
                                                double action_bound = 10.0);

/// Base fitness of R(beta) against `opponent` and its derivative in beta.
struct ValueAndSlope {
  double value = 0.0;
  double slope = 0.0;
  bool feasible = false;  ///< false at singular or out-of-bound equilibria
};
[[nodiscard]] ValueAndSlope rational_fitness(double beta, const Strategy& opponent,
                                             const Environment& env, double action_bound = 10.0);

struct RationalResponse {
  Strategy strategy = Strategy::rational(0.0);
  double fitness = 0.0;  ///< penalised
  bool converged = false;
  int iterations = 0;
};

/// Multi-start gradient ascent over alpha. Throws NoAscentProgress when no
/// start is feasible.
[[nodiscard]] RationalResponse best_response_rational(const Strategy& opponent,
                                                      const Environment& env,
                                                      const PenaltyConfig& pc,
                                                      const GradientAscentConfig& ascent,
                                                      double action_bound = 10.0,
                                                      std::span<const double> extra_starts = {});

/// What happened to one agent during a round.
struct UpdateRecord {
  bool mutated = false;
  std::size_t opponent = 0;
  double previous_fitness = 0.0;  ///< old strategy vs the sampled opponent
  double new_fitness = 0.0;       ///< installed strategy vs the sampled opponent
};

/// One synchronous round: every agent mutates with probability q_t or adopts
/// its best response to an opponent drawn uniformly from the others.
[[nodiscard]] Population step(const Population& pop, const SimConfig& cfg, int t, Rng& rng,
                              std::vector<UpdateRecord>* log = nullptr);

enum class FinalKind { Behavioral, Rational, Mixed };
[[nodiscard]] const char* to_string(FinalKind kind) noexcept;

struct RoundSummary {
  int round = 0;
  std::size_t behavioral = 0;
  std::size_t rational = 0;
  double mean_alpha = 0.0;  ///< NaN without rational agents
  std::size_t distinct_actions = 0;  ///< max over behavioral agents
  double welfare = 0.0;  ///< mean of u_i + u_j over ordered pairs
};

[[nodiscard]] RoundSummary summarize(const Population& pop, const Environment& env);

/// True when both populations hold the same multiset of strategies.
[[nodiscard]] bool same_composition(const Population& a, const Population& b, double tol = 1e-6);

struct Trajectory {
  std::vector<Population> populations;  ///< round 0 (initial) .. rounds
  std::vector<RoundSummary> summaries;
  FinalKind final_kind = FinalKind::Mixed;
  double final_mean_alpha = 0.0;
  std::size_t final_distinct_actions = 0;
  double welfare = 0.0;  ///< average over the final two rounds
  bool converged = false;
  bool oscillating = false;
};

/// Runs cfg.rounds rounds from a seeded initial population. Pure in cfg.
[[nodiscard]] Trajectory run(const SimConfig& cfg);

}  // namespace evopref
