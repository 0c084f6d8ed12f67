#include "evopref/evopref.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evopref/adaptive_learning.hpp"
#include "evopref/errors.hpp"
#include "evopref/experiments.hpp"
#include "evopref/stability_analysis.hpp"

using namespace evopref;

struct evopref_environment {
  Environment env;
};

struct evopref_verdict {
  StabilityVerdict verdict;
  std::string description;
};

struct evopref_report {
  VerificationReport report;
  std::string text;
  std::string json;
};

struct evopref_trajectory {
  Trajectory tr;
};

struct evopref_sweep {
  SweepSpec spec;
};

struct evopref_records {
  std::vector<SweepRecord> records;
};

namespace {

thread_local std::string g_last_error;

evopref_status fail(evopref_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

template <class F>
evopref_status guarded(F&& f) noexcept {
  try {
    f();
    g_last_error.clear();
    return EVOPREF_OK;
  } catch (const InvalidArgument& e) {
    return fail(EVOPREF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const SingularEquilibrium& e) {
    return fail(EVOPREF_ERR_SINGULAR_EQUILIBRIUM, e.what());
  } catch (const NoAscentProgress& e) {
    return fail(EVOPREF_ERR_NO_ASCENT_PROGRESS, e.what());
  } catch (const SearchBudgetExceeded& e) {
    return fail(EVOPREF_ERR_SEARCH_BUDGET, e.what());
  } catch (const IoError& e) {
    return fail(EVOPREF_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EVOPREF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EVOPREF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EVOPREF_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw InvalidArgument(std::string("null argument: ") + what);
}

GameParams to_game(const evopref_game* g) {
  need(g, "game");
  GameParams gp{g->kappa, g->m};
  gp.validate();
  return gp;
}

PenaltyConfig to_penalties(const evopref_penalties* pc) {
  if (pc == nullptr) return {};
  PenaltyConfig out{pc->eps_r, pc->eps_p, pc->eps_h};
  out.validate();
  return out;
}

Strategy to_strategy(const evopref_strategy* s) {
  need(s, "strategy");
  switch (s->kind) {
    case EVOPREF_BEHAVIORAL:
      if (s->n_actions > 0) need(s->actions, "strategy actions");
      return Strategy::behavioral(std::vector<double>(s->actions, s->actions + s->n_actions));
    case EVOPREF_RATIONAL:
      return Strategy::rational(s->alpha);
    case EVOPREF_HANDSHAKE:
      return Strategy::handshake();
  }
  throw InvalidArgument("unknown strategy kind");
}

evopref_strategy view_of(const Strategy& s) {
  evopref_strategy v{};
  v.kind = static_cast<evopref_strategy_kind>(s.kind());
  v.alpha = s.alpha();
  v.actions = s.actions().data();
  v.n_actions = s.actions().size();
  return v;
}

DeviationSearchConfig to_search(const evopref_search_config* c) {
  DeviationSearchConfig cfg;
  if (c != nullptr) {
    cfg.alpha_min = c->alpha_min;
    cfg.alpha_max = c->alpha_max;
    cfg.alpha_step = c->alpha_step;
    cfg.action_min = c->action_min;
    cfg.action_max = c->action_max;
    cfg.action_step = c->action_step;
    cfg.refine_iterations = c->refine_iterations;
    cfg.tol_eq = c->tol_eq;
    cfg.tol_strict = c->tol_strict;
    cfg.identity_radius = c->identity_radius;
  }
  cfg.validate();
  return cfg;
}

StrategySpace to_space(evopref_space s) {
  switch (s) {
    case EVOPREF_SPACE_B: return StrategySpace::Behavioral;
    case EVOPREF_SPACE_R: return StrategySpace::Rational;
    case EVOPREF_SPACE_S: return StrategySpace::Combined;
    case EVOPREF_SPACE_S_WITH_H: return StrategySpace::CombinedWithHandshake;
  }
  throw InvalidArgument("unknown strategy space");
}

SimConfig to_sim(const evopref_sim_config* c) {
  need(c, "sim config");
  SimConfig cfg;
  cfg.population_size = c->population_size;
  cfg.rounds = c->rounds;
  cfg.q1 = c->q1;
  cfg.q_freeze_round = c->q_freeze_round;
  cfg.seed = c->seed;
  if (c->single_game) {
    GameParams g{c->kappa1, c->m};
    g.validate();
    cfg.env = Environment::single(g);
  } else {
    cfg.env = Environment::two_games(c->kappa1, c->kappa2, c->p, c->m);
  }
  cfg.pc = to_penalties(&c->penalties);
  switch (c->space) {
    case EVOPREF_LEARN_FULL: cfg.space = LearningSpace::Full; break;
    case EVOPREF_LEARN_RATIONAL_ONLY: cfg.space = LearningSpace::RationalOnly; break;
    case EVOPREF_LEARN_BEHAVIORAL_ONLY: cfg.space = LearningSpace::BehavioralOnly; break;
    default: throw InvalidArgument("unknown learning space");
  }
  cfg.ascent.step = c->ascent_step;
  cfg.ascent.max_iterations = c->ascent_max_iterations;
  cfg.ascent.tolerance = c->ascent_tolerance;
  cfg.action_bound = c->action_bound;
  cfg.validate();
  return cfg;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

RecordFormat to_format(evopref_format f) {
  switch (f) {
    case EVOPREF_CSV: return RecordFormat::Csv;
    case EVOPREF_JSON: return RecordFormat::Json;
  }
  throw InvalidArgument("unknown record format");
}

std::vector<double> copy_grid(const double* v, std::size_t n, const char* what) {
  if (n > 0) need(v, what);
  return std::vector<double>(v, v + n);
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

nlohmann::json population_json(const Population& pop) {
  auto arr = nlohmann::json::array();
  for (const auto& a : pop.agents) {
    nlohmann::json j;
    j["behavioral"] = a.behavioral;
    if (a.behavioral) j["actions"] = a.actions;
    else j["alpha"] = a.alpha;
    arr.push_back(std::move(j));
  }
  return arr;
}

nlohmann::json maybe(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

}  // namespace

extern "C" {

const char* evopref_version(void) { return "1.0.0"; }

const char* evopref_status_name(evopref_status s) {
  switch (s) {
    case EVOPREF_OK: return "ok";
    case EVOPREF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case EVOPREF_ERR_SINGULAR_EQUILIBRIUM: return "singular equilibrium";
    case EVOPREF_ERR_NO_ASCENT_PROGRESS: return "no ascent progress";
    case EVOPREF_ERR_SEARCH_BUDGET: return "search budget exceeded";
    case EVOPREF_ERR_IO: return "i/o error";
    case EVOPREF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* evopref_last_error(void) { return g_last_error.c_str(); }

void evopref_string_free(char* s) { std::free(s); }

// ---- game

evopref_status evopref_payoff(const evopref_game* g, double own, double other, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = payoff(to_game(g), own, other);
  });
}

evopref_status evopref_subjective_utility(const evopref_game* g, double alpha, double own,
                                          double other, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = subjective_utility(to_game(g), alpha, own, other);
  });
}

evopref_status evopref_best_response(const evopref_game* g, double opponent_action, double alpha,
                                     double* out) {
  return guarded([&] {
    need(out, "out");
    *out = best_response(to_game(g), opponent_action, alpha);
  });
}

evopref_status evopref_nash_equilibrium(const evopref_game* g, double alpha_i, double alpha_j,
                                        double* own, double* other) {
  return guarded([&] {
    need(own, "own");
    need(other, "other");
    auto ne = nash_equilibrium(to_game(g), alpha_i, alpha_j);
    *own = ne.own;
    *other = ne.other;
  });
}

evopref_status evopref_ess_alpha(const evopref_game* g, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = ess_alpha(to_game(g));
  });
}

// ---- environment and fitness

evopref_status evopref_environment_create(const evopref_game* games, const double* proportions,
                                          size_t n_games, evopref_environment** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    if (n_games == 0) throw InvalidArgument("environment needs at least one game");
    need(games, "games");
    need(proportions, "proportions");
    std::vector<GameParams> gs;
    for (size_t k = 0; k < n_games; ++k) gs.push_back(to_game(&games[k]));
    Environment env(std::move(gs), std::vector<double>(proportions, proportions + n_games));
    *out = new evopref_environment{std::move(env)};
  });
}

void evopref_environment_destroy(evopref_environment* env) { delete env; }

evopref_status evopref_resolve_action(const evopref_strategy* own, const evopref_strategy* other,
                                      const evopref_environment* env, size_t game, double* out) {
  return guarded([&] {
    need(env, "environment");
    need(out, "out");
    auto a = to_strategy(own);
    auto b = to_strategy(other);
    check_compatible(a, env->env);
    check_compatible(b, env->env);
    if (game >= env->env.size()) throw InvalidArgument("game index out of range");
    *out = resolve_action(a, b, env->env, game);
  });
}

evopref_status evopref_base_fitness(const evopref_strategy* own, const evopref_strategy* other,
                                    const evopref_environment* env, double* out) {
  return guarded([&] {
    need(env, "environment");
    need(out, "out");
    *out = base_fitness(to_strategy(own), to_strategy(other), env->env);
  });
}

evopref_status evopref_complexity_cost(const evopref_strategy* s, const evopref_penalties* pc,
                                       double* out) {
  return guarded([&] {
    need(out, "out");
    *out = complexity_cost(to_strategy(s), to_penalties(pc));
  });
}

evopref_status evopref_penalized_fitness(const evopref_strategy* own,
                                         const evopref_strategy* other,
                                         const evopref_environment* env,
                                         const evopref_penalties* pc, double* out) {
  return guarded([&] {
    need(env, "environment");
    need(out, "out");
    *out = penalized_fitness(to_strategy(own), to_strategy(other), env->env, to_penalties(pc));
  });
}

// ---- stability

void evopref_search_config_default(evopref_search_config* c) {
  if (c == nullptr) return;
  DeviationSearchConfig d;
  c->alpha_min = d.alpha_min;
  c->alpha_max = d.alpha_max;
  c->alpha_step = d.alpha_step;
  c->action_min = d.action_min;
  c->action_max = d.action_max;
  c->action_step = d.action_step;
  c->refine_iterations = d.refine_iterations;
  c->tol_eq = d.tol_eq;
  c->tol_strict = d.tol_strict;
  c->identity_radius = d.identity_radius;
}

evopref_status evopref_classify(const evopref_strategy* candidate, evopref_space space,
                                const evopref_environment* env, const evopref_penalties* pc,
                                const evopref_search_config* cfg, evopref_verdict** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    need(env, "environment");
    auto s = to_strategy(candidate);
    auto v = classify(s, to_space(space), env->env, to_penalties(pc), to_search(cfg));
    std::string d = s.describe() + " in " + to_string(to_space(space)) + ":";
    d += v.is_ess ? " ESS" : v.is_nss ? " NSS" : v.is_nash ? " Nash" : " not Nash";
    if (v.witness) d += " (witness " + v.witness->describe() + ")";
    *out = new evopref_verdict{std::move(v), std::move(d)};
  });
}

int evopref_verdict_is_nash(const evopref_verdict* v) { return v && v->verdict.is_nash; }
int evopref_verdict_is_nss(const evopref_verdict* v) { return v && v->verdict.is_nss; }
int evopref_verdict_is_ess(const evopref_verdict* v) { return v && v->verdict.is_ess; }
double evopref_verdict_margin(const evopref_verdict* v) { return v ? v->verdict.margin : nan(); }

int evopref_verdict_witness(const evopref_verdict* v, evopref_strategy* out) {
  if (v == nullptr || out == nullptr || !v->verdict.witness) return 0;
  *out = view_of(*v->verdict.witness);
  return 1;
}

const char* evopref_verdict_describe(const evopref_verdict* v) {
  return v ? v->description.c_str() : "";
}

void evopref_verdict_destroy(evopref_verdict* v) { delete v; }

namespace {
evopref_report* wrap(VerificationReport r) {
  auto* out = new evopref_report{std::move(r), {}, {}};
  out->text = out->report.to_text();
  out->json = out->report.to_json();
  return out;
}
}  // namespace

evopref_status evopref_verify_proposition1(const evopref_game* g, const evopref_search_config* cfg,
                                           evopref_report** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = wrap(verify_proposition1(to_game(g), to_search(cfg)));
  });
}

evopref_status evopref_verify_proposition2(const evopref_game* g, double eps_r,
                                           const evopref_search_config* cfg,
                                           evopref_report** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = wrap(verify_proposition2(to_game(g), eps_r, to_search(cfg)));
  });
}

evopref_status evopref_verify_handshake(const evopref_game* g, const evopref_penalties* pc,
                                        const evopref_search_config* cfg, evopref_report** out) {
  return guarded([&] {
    need(out, "out");
    need(pc, "penalties");
    *out = nullptr;
    *out = wrap(verify_handshake_block(to_game(g), to_penalties(pc), to_search(cfg)));
  });
}

int evopref_report_passed(const evopref_report* r) { return r && r->report.pass; }
const char* evopref_report_text(const evopref_report* r) { return r ? r->text.c_str() : ""; }
const char* evopref_report_json(const evopref_report* r) { return r ? r->json.c_str() : ""; }

double evopref_report_handshake_margin(const evopref_report* r) {
  if (r == nullptr || !r->report.handshake_margin) return nan();
  return *r->report.handshake_margin;
}

void evopref_report_destroy(evopref_report* r) { delete r; }

// ---- simulation

void evopref_sim_config_default(evopref_sim_config* c) {
  if (c == nullptr) return;
  SimConfig d;
  std::memset(c, 0, sizeof(*c));
  c->population_size = d.population_size;
  c->rounds = d.rounds;
  c->q1 = d.q1;
  c->q_freeze_round = d.q_freeze_round;
  c->seed = d.seed;
  c->kappa1 = 0.5;
  c->kappa2 = 0.5;
  c->p = 1.0;
  c->m = 1.0;
  c->single_game = 1;
  c->penalties = {d.pc.eps_r, d.pc.eps_p, d.pc.eps_h};
  c->space = EVOPREF_LEARN_FULL;
  c->ascent_step = d.ascent.step;
  c->ascent_max_iterations = d.ascent.max_iterations;
  c->ascent_tolerance = d.ascent.tolerance;
  c->action_bound = d.action_bound;
}

evopref_status evopref_simulate(const evopref_sim_config* cfg, evopref_trajectory** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new evopref_trajectory{run(to_sim(cfg))};
  });
}

size_t evopref_trajectory_length(const evopref_trajectory* tr) {
  return tr ? tr->tr.populations.size() : 0;
}

size_t evopref_trajectory_population_size(const evopref_trajectory* tr) {
  return tr && !tr->tr.populations.empty() ? tr->tr.populations.front().agents.size() : 0;
}

evopref_status evopref_trajectory_summary(const evopref_trajectory* tr, size_t round,
                                          evopref_round_summary* out) {
  return guarded([&] {
    need(tr, "trajectory");
    need(out, "out");
    if (round >= tr->tr.summaries.size()) throw InvalidArgument("round out of range");
    const auto& s = tr->tr.summaries[round];
    *out = {s.round, s.behavioral, s.rational, s.mean_alpha, s.distinct_actions, s.welfare};
  });
}

evopref_status evopref_trajectory_agent(const evopref_trajectory* tr, size_t round, size_t agent,
                                        evopref_agent* out) {
  return guarded([&] {
    need(tr, "trajectory");
    need(out, "out");
    if (round >= tr->tr.populations.size()) throw InvalidArgument("round out of range");
    const auto& agents = tr->tr.populations[round].agents;
    if (agent >= agents.size()) throw InvalidArgument("agent out of range");
    const auto& a = agents[agent];
    out->alpha = a.alpha;
    out->behavioral = a.behavioral;
    out->actions = a.actions.data();
    out->n_actions = a.actions.size();
  });
}

evopref_status evopref_trajectory_final(const evopref_trajectory* tr, evopref_final_summary* out) {
  return guarded([&] {
    need(tr, "trajectory");
    need(out, "out");
    const auto& t = tr->tr;
    out->final_kind = static_cast<evopref_final_kind>(t.final_kind);
    out->mean_alpha = t.final_mean_alpha;
    out->distinct_actions = t.final_distinct_actions;
    out->welfare = t.welfare;
    out->converged = t.converged;
    out->oscillating = t.oscillating;
  });
}

evopref_status evopref_trajectory_json(const evopref_trajectory* tr, char** out) {
  return guarded([&] {
    need(tr, "trajectory");
    need(out, "out");
    *out = nullptr;
    const auto& t = tr->tr;
    nlohmann::ordered_json j;
    j["final_kind"] = to_string(t.final_kind);
    j["mean_alpha"] = maybe(t.final_mean_alpha);
    j["distinct_actions"] = t.final_distinct_actions;
    j["welfare"] = t.welfare;
    j["converged"] = t.converged;
    j["oscillating"] = t.oscillating;
    auto rounds = nlohmann::ordered_json::array();
    for (size_t r = 0; r < t.summaries.size(); ++r) {
      const auto& s = t.summaries[r];
      nlohmann::ordered_json e;
      e["round"] = s.round;
      e["behavioral"] = s.behavioral;
      e["rational"] = s.rational;
      e["mean_alpha"] = maybe(s.mean_alpha);
      e["distinct_actions"] = s.distinct_actions;
      e["welfare"] = s.welfare;
      if (r < t.populations.size()) e["agents"] = population_json(t.populations[r]);
      rounds.push_back(std::move(e));
    }
    j["rounds"] = std::move(rounds);
    *out = dup_string(j.dump(2));
  });
}

void evopref_trajectory_destroy(evopref_trajectory* tr) { delete tr; }

double evopref_mutation_prob(const evopref_sim_config* cfg, int round) {
  if (cfg == nullptr) return nan();
  SimConfig c;
  c.q1 = cfg->q1;
  c.q_freeze_round = cfg->q_freeze_round;
  return mutation_prob(round, c);
}

// ---- sweeps

evopref_status evopref_sweep_create(evopref_experiment experiment, evopref_sweep** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    ExperimentId id;
    switch (experiment) {
      case EVOPREF_FIG1: id = ExperimentId::Fig1; break;
      case EVOPREF_FIG2: id = ExperimentId::Fig2; break;
      case EVOPREF_FIG3: id = ExperimentId::Fig3; break;
      case EVOPREF_FIG4: id = ExperimentId::Fig4; break;
      case EVOPREF_CUSTOM: id = ExperimentId::Custom; break;
      default: throw InvalidArgument("unknown experiment");
    }
    *out = new evopref_sweep{SweepSpec::for_experiment(id)};
  });
}

void evopref_sweep_destroy(evopref_sweep* s) { delete s; }

evopref_status evopref_sweep_set_base(evopref_sweep* s, const evopref_sim_config* base) {
  return guarded([&] {
    need(s, "sweep");
    need(base, "base");
    evopref_sim_config c = *base;
    c.single_game = 1;  // the environment is replaced per point
    c.kappa1 = 0.5;
    s->spec.base = to_sim(&c);
    s->spec.m = base->m;
  });
}

evopref_status evopref_sweep_set_replicates(evopref_sweep* s, int replicates) {
  return guarded([&] {
    need(s, "sweep");
    if (replicates < 1) throw InvalidArgument("replicates must be at least 1");
    s->spec.replicates = replicates;
  });
}

evopref_status evopref_sweep_set_threads(evopref_sweep* s, unsigned threads) {
  return guarded([&] {
    need(s, "sweep");
    s->spec.threads = threads;
  });
}

evopref_status evopref_sweep_set_kappa_pairs(evopref_sweep* s, const double* kappa1,
                                             const double* kappa2, size_t n) {
  return guarded([&] {
    need(s, "sweep");
    auto a = copy_grid(kappa1, n, "kappa1");
    auto b = copy_grid(kappa2, n, "kappa2");
    s->spec.kappa_pairs.clear();
    for (size_t i = 0; i < n; ++i) s->spec.kappa_pairs.emplace_back(a[i], b[i]);
  });
}

evopref_status evopref_sweep_set_p_grid(evopref_sweep* s, const double* p, size_t n) {
  return guarded([&] {
    need(s, "sweep");
    s->spec.p_grid = copy_grid(p, n, "p");
  });
}

evopref_status evopref_sweep_set_eps_p_grid(evopref_sweep* s, const double* eps_p, size_t n) {
  return guarded([&] {
    need(s, "sweep");
    s->spec.eps_p_grid = copy_grid(eps_p, n, "eps_p");
  });
}

evopref_status evopref_sweep_set_output_path(evopref_sweep* s, const char* path) {
  return guarded([&] {
    need(s, "sweep");
    s->spec.output_path = path ? path : "";
  });
}

size_t evopref_sweep_point_count(const evopref_sweep* s) {
  return s ? s->spec.points().size() : 0;
}

evopref_status evopref_sweep_run(const evopref_sweep* s, evopref_records** out) {
  return guarded([&] {
    need(s, "sweep");
    need(out, "out");
    *out = nullptr;
    *out = new evopref_records{run_sweep(s->spec)};
  });
}

evopref_status evopref_records_from_trajectory(const evopref_trajectory* tr,
                                               const evopref_sim_config* cfg,
                                               evopref_records** out) {
  return guarded([&] {
    need(tr, "trajectory");
    need(cfg, "sim config");
    need(out, "out");
    *out = nullptr;
    SweepSpec spec;
    spec.base = to_sim(cfg);
    SweepPoint pt;
    pt.kappa1 = cfg->kappa1;
    pt.kappa2 = cfg->single_game ? cfg->kappa1 : cfg->kappa2;
    pt.p = cfg->single_game ? 1.0 : cfg->p;
    pt.eps_p = cfg->penalties.eps_p;
    auto rec = make_record(spec, pt, 0, tr->tr);
    rec.seed = cfg->seed;
    std::vector<SweepRecord> v{rec};
    apply_welfare_normalization(v);
    *out = new evopref_records{std::move(v)};
  });
}

evopref_status evopref_records_parse(const char* text, evopref_format format,
                                     evopref_records** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = nullptr;
    auto v = to_format(format) == RecordFormat::Csv ? parse_csv(text) : parse_json(text);
    *out = new evopref_records{std::move(v)};
  });
}

size_t evopref_records_count(const evopref_records* r) { return r ? r->records.size() : 0; }

evopref_status evopref_records_get(const evopref_records* r, size_t i, evopref_record* out) {
  return guarded([&] {
    need(r, "records");
    need(out, "out");
    if (i >= r->records.size()) throw InvalidArgument("record index out of range");
    const auto& x = r->records[i];
    out->experiment = x.experiment.c_str();
    out->kappa1 = x.kappa1;
    out->kappa2 = x.kappa2;
    out->p = x.p;
    out->eps_p = x.eps_p;
    out->eps_r = x.eps_r;
    out->seed = x.seed;
    out->replicate = x.replicate;
    out->final_kind = static_cast<evopref_final_kind>(x.final_kind);
    out->mean_alpha = x.mean_alpha;
    out->distinct_actions = x.distinct_actions;
    out->welfare_raw = x.welfare_raw;
    out->welfare_norm = x.welfare_norm;
    out->converged = x.converged;
    out->oscillating = x.oscillating;
  });
}

evopref_status evopref_records_serialize(const evopref_records* r, evopref_format format,
                                         char** out) {
  return guarded([&] {
    need(r, "records");
    need(out, "out");
    *out = nullptr;
    *out = dup_string(to_format(format) == RecordFormat::Csv ? to_csv(r->records)
                                                             : to_json(r->records));
  });
}

evopref_status evopref_records_export(const evopref_records* r, evopref_format format,
                                      const char* path) {
  return guarded([&] {
    need(r, "records");
    need(path, "path");
    export_records(r->records, to_format(format), path);
  });
}

void evopref_records_destroy(evopref_records* r) { delete r; }

evopref_status evopref_tune_eps_p(const evopref_sweep* s, double kappa1, double kappa2, double p,
                                  double lo, double hi, int iterations, double min_fraction,
                                  double* eps_p_out, int* bracketed_out) {
  return guarded([&] {
    need(s, "sweep");
    need(eps_p_out, "eps_p_out");
    auto res = tune_eps_p(s->spec, kappa1, kappa2, p, lo, hi, iterations, min_fraction);
    *eps_p_out = res.eps_p;
    if (bracketed_out) *bracketed_out = res.bracketed;
  });
}

}  // extern "C"
