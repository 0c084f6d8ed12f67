#include "evopref/stability_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "evopref/errors.hpp"

namespace evopref {

const char* to_string(StrategySpace space) noexcept {
  switch (space) {
    case StrategySpace::Behavioral:
      return "B";
    case StrategySpace::Rational:
      return "R";
    case StrategySpace::Combined:
      return "S";
    case StrategySpace::CombinedWithHandshake:
      return "S+H";
  }
  return "?";
}

bool contains(StrategySpace space, const Strategy& s) noexcept {
  switch (space) {
    case StrategySpace::Behavioral:
      return s.is_behavioral();
    case StrategySpace::Rational:
      return s.is_rational();
    case StrategySpace::Combined:
      return !s.is_handshake();
    case StrategySpace::CombinedWithHandshake:
      return true;
  }
  return false;
}

void DeviationSearchConfig::validate() const {
  if (!(alpha_step > 0.0 && action_step > 0.0 && alpha_max > alpha_min &&
        action_max > action_min)) {
    throw InvalidArgument("deviation search: grids need positive steps and non-empty ranges");
  }
  if (refine_iterations < 0) throw InvalidArgument("deviation search: negative refinement count");
  if (!(tol_eq > 0.0 && tol_strict > tol_eq)) {
    throw InvalidArgument("deviation search: need 0 < tol_eq < tol_strict");
  }
  if (!(identity_radius > 0.0)) throw InvalidArgument("deviation search: identity_radius <= 0");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_fitness(const Strategy& own, const Strategy& other, const Environment& env,
                    const PenaltyConfig& pc) {
  double v;
  try {
    v = penalized_fitness(own, other, env, pc);
  } catch (const SingularEquilibrium&) {
    return kNegInf;
  }
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
    throw SearchBudgetExceeded("deviation search produced a non-finite fitness for " +
                               own.describe());
  }
  return v;
}

struct Peak {
  double x;
  double value;
};

struct GridScan {
  std::vector<Peak> peaks;  // refined local maxima
  Peak best{0.0, kNegInf};  // best point evaluated anywhere
};

// Evaluates f on lo, lo + step, ..., hi, then ternary-refines every grid-local
// maximum inside its neighbouring cells.
GridScan scan(const std::function<double(double)>& f, double lo, double hi, double step,
              int iterations) {
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> xs(n), vs(n);
  GridScan out;
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = lo + static_cast<double>(i) * step;
    vs[i] = f(xs[i]);
    if (vs[i] > out.best.value) out.best = {xs[i], vs[i]};
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (vs[i] == kNegInf) continue;
    const bool rises = i == 0 || vs[i] > vs[i - 1];
    const bool holds = i + 1 == n || vs[i] >= vs[i + 1];
    if (!rises || !holds) continue;
    double a = i == 0 ? xs[i] : xs[i - 1];
    double b = i + 1 == n ? xs[i] : xs[i + 1];
    for (int it = 0; it < iterations && b - a > 0.0; ++it) {
      const double m1 = a + (b - a) / 3.0;
      const double m2 = b - (b - a) / 3.0;
      if (f(m1) < f(m2)) {
        a = m1;
      } else {
        b = m2;
      }
    }
    Peak p{xs[i], vs[i]};
    const double mid = 0.5 * (a + b);
    const double vmid = f(mid);
    if (vmid > p.value) p = {mid, vmid};
    out.peaks.push_back(p);
    if (p.value > out.best.value) out.best = p;
  }
  return out;
}

bool same_strategy(const Strategy& a, const Strategy& b, double radius, double scale) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case StrategyKind::Rational:
      return std::abs(a.alpha() - b.alpha()) <= radius;
    case StrategyKind::Behavioral: {
      if (a.actions().size() != b.actions().size()) return false;
      for (std::size_t k = 0; k < a.actions().size(); ++k) {
        if (std::abs(a.actions()[k] - b.actions()[k]) > radius * scale) return false;
      }
      return true;
    }
    case StrategyKind::Handshake:
      return true;
  }
  return false;
}

struct Deviator {
  Strategy strategy;
  double vs_candidate;
};

}  // namespace

StabilityVerdict classify(const Strategy& candidate, StrategySpace space, const Environment& env,
                          const PenaltyConfig& pc, const DeviationSearchConfig& cfg) {
  cfg.validate();
  pc.validate();
  check_compatible(candidate, env);
  if (!contains(space, candidate)) {
    throw InvalidArgument(candidate.describe() + " is not a member of space " + to_string(space));
  }
  const double scale = env.max_scale();
  const double tol_eq = cfg.tol_eq * scale * scale;
  const double tol_strict = cfg.tol_strict * scale * scale;
  const std::size_t K = env.size();

  StabilityVerdict verdict;
  verdict.self_fitness = penalized_fitness(candidate, candidate, env, pc);
  const double self = verdict.self_fitness;

  std::vector<Deviator> peaks;
  Deviator best{candidate, self};
  auto consider_best = [&](const Strategy& s, double v) {
    if (v > best.vs_candidate) best = {s, v};
  };

  const bool with_behavioral = space != StrategySpace::Rational;
  const bool with_rational =
      space != StrategySpace::Behavioral;
  const bool with_handshake = space == StrategySpace::CombinedWithHandshake;

  if (with_behavioral) {
    const double lo = cfg.action_min * scale;
    const double hi = cfg.action_max * scale;
    const double step = cfg.action_step * scale;
    auto shared = [&](double a) {
      return safe_fitness(Strategy::behavioral(std::vector<double>(K, a)), candidate, env, pc);
    };
    const GridScan s = scan(shared, lo, hi, step, cfg.refine_iterations);
    for (const Peak& p : s.peaks) {
      peaks.push_back({Strategy::behavioral(std::vector<double>(K, p.x)), p.value});
    }
    consider_best(Strategy::behavioral(std::vector<double>(K, s.best.x)), s.best.value);

    if (K > 1) {
      // Fitness of B(a_1..a_K) separates by game, so each slot is searched alone.
      std::vector<double> split(K);
      for (std::size_t k = 0; k < K; ++k) {
        auto slot = [&](double a) {
          const Strategy probe = Strategy::behavioral(std::vector<double>(K, a));
          try {
            const double other = resolve_action(candidate, probe, env, k);
            return env.proportion(k) * payoff(env.game(k), a, other);
          } catch (const SingularEquilibrium&) {
            return kNegInf;
          }
        };
        split[k] = scan(slot, lo, hi, step, cfg.refine_iterations).best.x;
      }
      Strategy s_split = Strategy::behavioral(split);
      const double v = safe_fitness(s_split, candidate, env, pc);
      peaks.push_back({s_split, v});
      consider_best(s_split, v);
    }
  }

  if (with_rational) {
    auto rational = [&](double beta) {
      return safe_fitness(Strategy::rational(beta), candidate, env, pc);
    };
    const GridScan s = scan(rational, cfg.alpha_min, cfg.alpha_max, cfg.alpha_step,
                            cfg.refine_iterations);
    for (const Peak& p : s.peaks) peaks.push_back({Strategy::rational(p.x), p.value});
    consider_best(Strategy::rational(s.best.x), s.best.value);
  }

  if (with_handshake) {
    const Strategy h = Strategy::handshake();
    const double v = safe_fitness(h, candidate, env, pc);
    peaks.push_back({h, v});
    consider_best(h, v);
  }

  verdict.is_nash = best.vs_candidate <= self + tol_eq;
  if (!verdict.is_nash) {
    verdict.witness = best.strategy;
    verdict.margin = self - best.vs_candidate;
    return verdict;
  }

  verdict.is_nss = true;
  verdict.is_ess = true;
  double margin = std::numeric_limits<double>::infinity();
  double worst_tie = std::numeric_limits<double>::infinity();
  for (const Deviator& d : peaks) {
    if (d.vs_candidate == kNegInf) continue;
    if (same_strategy(d.strategy, candidate, cfg.identity_radius, scale)) continue;
    if (d.vs_candidate < self - tol_eq) {
      margin = std::min(margin, self - d.vs_candidate);
      continue;
    }
    // near-tie: compare against the deviator itself
    const double incumbent = safe_fitness(candidate, d.strategy, env, pc);
    const double mutant = safe_fitness(d.strategy, d.strategy, env, pc);
    const double gap = incumbent - mutant;
    margin = std::min(margin, gap);
    if (gap < worst_tie) {
      worst_tie = gap;
      if (gap < tol_strict) verdict.witness = d.strategy;
    }
  }
  if (worst_tie < -tol_eq) verdict.is_nss = false;
  if (worst_tie < tol_strict) verdict.is_ess = false;
  verdict.margin = margin;
  return verdict;
}

// ---------------------------------------------------------------------------
// Verification reports

namespace {

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> xs;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) xs.push_back(lo + static_cast<double>(i) * step);
  return xs;
}

void check(VerificationReport& r, bool ok, const std::string& what) {
  r.checks.push_back((ok ? "ok: " : "FAIL: ") + what);
  if (!ok) r.pass = false;
}

std::string verdict_text(const StabilityVerdict& v) {
  std::ostringstream os;
  os.precision(6);
  os << (v.is_ess ? "ESS" : v.is_nss ? "NSS" : v.is_nash ? "Nash" : "not Nash")
     << " (margin " << v.margin;
  if (v.witness) os << ", witness " << v.witness->describe();
  os << ")";
  return os.str();
}

// Classifies the behavioral and rational candidate grids of a single game.
struct CandidateSweep {
  std::vector<CandidateFinding> behavioral;
  std::vector<CandidateFinding> rational_in_s;
  std::vector<StabilityVerdict> rational_in_r;
  std::size_t singular = 0;
};

CandidateSweep sweep_candidates(const Environment& env, const PenaltyConfig& pc,
                                const DeviationSearchConfig& cfg, bool with_rational_space) {
  const GameParams& g = env.game(0);
  CandidateSweep out;
  std::vector<double> actions =
      grid(cfg.action_min * g.m, cfg.action_max * g.m, cfg.action_step * g.m);
  // grid points that coincide with the anchor are the anchor
  const double ne0 = base_equilibrium_action(g);
  std::erase_if(actions, [&](double a) { return std::abs(a - ne0) <= cfg.identity_radius * g.m; });
  actions.push_back(ne0);
  for (double a : actions) {
    const Strategy s = Strategy::behavioral({a});
    out.behavioral.push_back({s, classify(s, StrategySpace::Combined, env, pc, cfg)});
  }
  std::vector<double> alphas = grid(cfg.alpha_min, cfg.alpha_max, cfg.alpha_step);
  const double astar = ess_alpha(g);
  std::erase_if(alphas, [&](double a) { return std::abs(a - astar) <= cfg.identity_radius; });
  alphas.push_back(astar);
  for (double alpha : alphas) {
    const Strategy s = Strategy::rational(alpha);
    try {
      StabilityVerdict in_s = classify(s, StrategySpace::Combined, env, pc, cfg);
      if (with_rational_space) {
        out.rational_in_r.push_back(classify(s, StrategySpace::Rational, env, pc, cfg));
      }
      out.rational_in_s.push_back({s, std::move(in_s)});
    } catch (const SingularEquilibrium&) {
      ++out.singular;
    }
  }
  return out;
}

}  // namespace

VerificationReport verify_proposition1(const GameParams& g, const DeviationSearchConfig& cfg) {
  g.validate();
  VerificationReport r;
  r.name = "proposition1";
  r.game = g;
  r.pass = true;
  const Environment env = Environment::single(g);
  const PenaltyConfig pc{};
  const double ne0 = base_equilibrium_action(g);
  const double astar = ess_alpha(g);
  const CandidateSweep sweep = sweep_candidates(env, pc, cfg, true);
  r.candidates_checked = sweep.behavioral.size() + sweep.rational_in_s.size();

  std::size_t spurious_b = 0;
  for (const auto& f : sweep.behavioral) {
    if (f.verdict.is_ess) ++r.ess_found;
    if (!f.verdict.is_nash) continue;
    r.nash.push_back(f);
    if (std::abs(f.strategy.action(0) - ne0) > cfg.identity_radius * g.m) ++spurious_b;
  }
  check(r, spurious_b == 0,
        "no behavioral Nash strategy other than B(NE(0,0)) (" + std::to_string(spurious_b) +
            " found)");

  const StabilityVerdict& b0 = sweep.behavioral.back().verdict;
  check(r, b0.is_nash && b0.is_nss && !b0.is_ess,
        "B(NE(0,0)) is NSS but not ESS in S: " + verdict_text(b0));

  std::size_t nash_mismatch = 0, nss_mismatch = 0;
  for (std::size_t i = 0; i < sweep.rational_in_s.size(); ++i) {
    const auto& in_s = sweep.rational_in_s[i].verdict;
    const auto& in_r = sweep.rational_in_r[i];
    if (in_s.is_ess) ++r.ess_found;
    if (in_s.is_nash) r.nash.push_back(sweep.rational_in_s[i]);
    if (in_s.is_nash != in_r.is_nash) ++nash_mismatch;
    if (in_s.is_nss != in_r.is_nss) ++nss_mismatch;
  }
  check(r, nash_mismatch == 0,
        "R(alpha) is Nash in S iff Nash in R (" + std::to_string(nash_mismatch) + " mismatches)");
  check(r, nss_mismatch == 0,
        "R(alpha) is NSS in S iff NSS in R (" + std::to_string(nss_mismatch) + " mismatches)");

  const StabilityVerdict& rs = sweep.rational_in_s.back().verdict;
  const StabilityVerdict& rr = sweep.rational_in_r.back();
  std::ostringstream what;
  what.precision(6);
  what << "R(" << astar << ") is NSS but not ESS in S: " << verdict_text(rs);
  check(r, rs.is_nss && !rs.is_ess && rr.is_nss, what.str());
  check(r, r.ess_found == 0, "no ESS in S (" + std::to_string(r.ess_found) + " found)");
  return r;
}

VerificationReport verify_proposition2(const GameParams& g, double eps_r,
                                       const DeviationSearchConfig& cfg) {
  g.validate();
  if (!(eps_r > 0.0)) throw InvalidArgument("verify_proposition2: need eps_r > 0");
  VerificationReport r;
  r.name = "proposition2";
  r.game = g;
  r.penalties = PenaltyConfig{eps_r, 0.0, 0.0};
  r.pass = true;
  const Environment env = Environment::single(g);
  const double ne0 = base_equilibrium_action(g);
  const CandidateSweep sweep = sweep_candidates(env, r.penalties, cfg, false);
  r.candidates_checked = sweep.behavioral.size() + sweep.rational_in_s.size();

  std::size_t spurious_b = 0, rational_nash = 0;
  for (const auto& f : sweep.behavioral) {
    if (f.verdict.is_ess) ++r.ess_found;
    if (!f.verdict.is_nash) continue;
    r.nash.push_back(f);
    if (std::abs(f.strategy.action(0) - ne0) > cfg.identity_radius * g.m) ++spurious_b;
  }
  for (const auto& f : sweep.rational_in_s) {
    if (f.verdict.is_ess) ++r.ess_found;
    if (!f.verdict.is_nash) continue;
    r.nash.push_back(f);
    ++rational_nash;
  }
  const StabilityVerdict& b0 = sweep.behavioral.back().verdict;
  check(r, b0.is_ess, "B(NE(0,0)) is an ESS in S under penalties: " + verdict_text(b0));
  check(r, rational_nash == 0,
        "every R(alpha) candidate is rejected as Nash (" + std::to_string(rational_nash) +
            " accepted)");
  check(r, spurious_b == 0,
        "no behavioral Nash strategy other than B(NE(0,0)) (" + std::to_string(spurious_b) +
            " found)");
  return r;
}

VerificationReport verify_handshake_block(const GameParams& g, const PenaltyConfig& pc,
                                          const DeviationSearchConfig& cfg) {
  g.validate();
  pc.validate();
  VerificationReport r;
  r.name = "handshake";
  r.game = g;
  r.penalties = pc;
  r.pass = true;
  const Environment env = Environment::single(g);
  const Strategy b0 = Strategy::behavioral({base_equilibrium_action(g)});
  const StabilityVerdict v = classify(b0, StrategySpace::CombinedWithHandshake, env, pc, cfg);
  r.candidates_checked = 1;
  if (v.is_nash) r.nash.push_back({b0, v});
  if (v.is_ess) r.ess_found = 1;
  r.handshake_margin = penalized_fitness(b0, b0, env, pc) -
                       penalized_fitness(Strategy::handshake(), b0, env, pc);

  const bool precondition = pc.eps_h > pc.eps_r && pc.eps_r > 0.0;
  r.checks.push_back(std::string(precondition ? "ok: " : "note: ") +
                     "eps_h > eps_r > 0 " + (precondition ? "holds" : "does not hold"));
  check(r, v.is_ess, "B(NE(0,0)) is an ESS in S+H: " + verdict_text(v));
  return r;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json strategy_json(const Strategy& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind());
  if (s.is_rational()) j["alpha"] = s.alpha();
  if (s.is_behavioral()) j["actions"] = std::vector<double>(s.actions().begin(), s.actions().end());
  return j;
}

}  // namespace

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os.precision(9);
  os << name << " kappa=" << game.kappa << " m=" << game.m << " eps_r=" << penalties.eps_r
     << " eps_p=" << penalties.eps_p << " eps_h=" << penalties.eps_h << "\n";
  os << "candidates checked: " << candidates_checked << ", ESS found: " << ess_found << "\n";
  for (const auto& f : nash) {
    os << "  nash  " << f.strategy.describe() << "  " << verdict_text(f.verdict) << "\n";
  }
  if (handshake_margin) os << "handshake margin: " << *handshake_margin << "\n";
  for (const auto& c : checks) os << c << "\n";
  os << (pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["kappa"] = game.kappa;
  j["m"] = game.m;
  j["eps_R"] = penalties.eps_r;
  j["eps_P"] = penalties.eps_p;
  j["eps_H"] = penalties.eps_h;
  j["pass"] = pass;
  j["candidates_checked"] = candidates_checked;
  j["ess_found"] = ess_found;
  j["checks"] = checks;
  if (handshake_margin) j["handshake_margin"] = *handshake_margin;
  auto& arr = j["nash"] = nlohmann::json::array();
  for (const auto& f : nash) {
    nlohmann::json e;
    e["strategy"] = strategy_json(f.strategy);
    e["is_nss"] = f.verdict.is_nss;
    e["is_ess"] = f.verdict.is_ess;
    e["margin"] = f.verdict.margin;
    if (f.verdict.witness) e["witness"] = strategy_json(*f.verdict.witness);
    arr.push_back(std::move(e));
  }
  return j.dump(2);
}

}  // namespace evopref
