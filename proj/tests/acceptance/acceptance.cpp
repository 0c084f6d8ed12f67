// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: evopref_acceptance [criterion...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evopref/errors.hpp"
#include "evopref/experiments.hpp"
#include "evopref/externality_game.hpp"
#include "evopref/stability_analysis.hpp"
#include "support/oracles.hpp"

using namespace evopref;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok: " : "FAIL: ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string count_str(int hits, int n) { return fmt("%d/%d", hits, n); }

constexpr int kReplicates = 10;
constexpr int kQuorum = 8;

// Best response and equilibrium against numeric oracles.
Outcome closed_form() {
  Outcome out;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_br = 0.0;
  double worst_ne = 0.0;
  int draws = 0;
  while (draws < 100) {
    GameParams g;
    g.kappa = unit(rng) < 0.5 ? -2.0 + 1.999 * unit(rng) : 0.001 + 0.998 * unit(rng);
    g.m = 0.5 + 1.5 * unit(rng);
    const double ai = -0.9 + 1.8 * unit(rng);
    const double aj = -0.9 + 1.8 * unit(rng);
    const double b = g.m * (-2.0 + 6.0 * unit(rng));
    if (std::abs(4.0 - g.kappa * g.kappa * (1 + ai) * (1 + aj)) < 0.5) continue;
    ++draws;
    const double br = best_response(g, b, ai);
    worst_br = std::max(worst_br, std::abs(br - oracle::best_response(g.kappa, g.m, b, ai)));
    const auto ne = nash_equilibrium(g, ai, aj);
    const auto on = oracle::nash(g.kappa, g.m, ai, aj);
    worst_ne = std::max({worst_ne, std::abs(ne.own - on.own), std::abs(ne.other - on.other)});
  }
  out.require(worst_br <= 1e-3, fmt("best_response max error %.3g over 100 draws", worst_br));
  out.require(worst_ne <= 1e-3, fmt("nash_equilibrium max error %.3g over 100 draws", worst_ne));
  return out;
}

Outcome ess_formula() {
  Outcome out;
  for (double kappa : {-0.5, 0.5, 0.9}) {
    const GameParams g{kappa, 1.0};
    const double target = ess_alpha(g);
    int hits = 0;
    double worst = 0.0;
    for (int r = 0; r < kReplicates; ++r) {
      SimConfig cfg;
      cfg.env = Environment::single(g);
      cfg.pc.eps_r = 1e-5;
      cfg.space = LearningSpace::RationalOnly;
      cfg.seed = 1000 + r;
      const auto tr = run(cfg);
      const double err = std::abs(tr.final_mean_alpha - target);
      if (tr.final_kind == FinalKind::Rational && err <= 0.02) ++hits;
      worst = std::max(worst, std::isnan(err) ? INFINITY : err);
    }
    out.require(hits >= kQuorum, fmt("kappa %g: %s seeds within 0.02 of %.6f (worst %.3g)",
                                     kappa, count_str(hits, kReplicates).c_str(), target, worst));
  }
  return out;
}

Outcome report_check(const VerificationReport& rep) {
  Outcome out;
  out.require(rep.pass, rep.name + fmt(" at kappa %g", rep.game.kappa));
  if (!rep.pass) {
    for (const auto& line : rep.checks) {
      if (line.rfind("FAIL", 0) == 0) out.notes.push_back("  " + line);
    }
  }
  return out;
}

void merge(Outcome& into, const Outcome& from) {
  into.pass = into.pass && from.pass;
  into.notes.insert(into.notes.end(), from.notes.begin(), from.notes.end());
}

Outcome proposition1() {
  Outcome out;
  for (double kappa : {-0.5, 0.5}) {
    const auto rep = verify_proposition1({kappa, 1.0}, {});
    merge(out, report_check(rep));
    out.require(rep.ess_found == 0, fmt("kappa %g: no ESS among %zu candidates", kappa,
                                        rep.candidates_checked));
  }
  return out;
}

Outcome proposition2() {
  Outcome out;
  for (double kappa : {-0.5, 0.5}) {
    const auto rep = verify_proposition2({kappa, 1.0}, 1e-5, {});
    merge(out, report_check(rep));
    out.require(rep.nash.size() == 1, fmt("kappa %g: %zu Nash strategies", kappa,
                                          rep.nash.size()));
  }
  return out;
}

Outcome handshake() {
  Outcome out;
  for (double kappa : {-0.5, 0.5}) {
    const GameParams g{kappa, 1.0};
    const auto rep = verify_handshake_block(g, {1e-5, 0.0, 2e-5}, {});
    merge(out, report_check(rep));
    const Strategy b0 = Strategy::behavioral({base_equilibrium_action(g)});
    const auto v = classify(b0, StrategySpace::CombinedWithHandshake, Environment::single(g),
                            {1e-5, 0.0, 0.0}, {});
    const bool witness_h = v.witness && v.witness->kind() == StrategyKind::Handshake;
    out.require(!v.is_ess && witness_h,
                fmt("kappa %g, eps_h = 0: ess=%d witness=%s", kappa, v.is_ess,
                    v.witness ? v.witness->describe().c_str() : "none"));
  }
  return out;
}

using Records = std::vector<SweepRecord>;

SweepSpec published(ExperimentId id) {
  SweepSpec s = SweepSpec::for_experiment(id);
  s.replicates = kReplicates;
  return s;
}

Records select(const Records& rs, const std::function<bool(const SweepRecord&)>& pred) {
  Records out;
  for (const auto& r : rs) {
    if (pred(r)) out.push_back(r);
  }
  return out;
}

bool one_action_behavioral(const SweepRecord& r) {
  return r.final_kind == FinalKind::Behavioral && r.distinct_actions == 1;
}

bool rational(const SweepRecord& r) {
  return r.final_kind == FinalKind::Rational && !std::isnan(r.mean_alpha);
}

int hits(const Records& rs, const std::function<bool(const SweepRecord&)>& pred) {
  return static_cast<int>(std::count_if(rs.begin(), rs.end(), pred));
}

Outcome fig1() {
  Outcome out;
  const Records rs = run_fig1(published(ExperimentId::Fig1));
  auto at = [&](double k1) { return select(rs, [&](const auto& r) { return r.kappa1 == k1; }); };

  const auto near_zero = at(-0.01);
  const int h0 = hits(near_zero, one_action_behavioral);
  out.require(h0 >= kQuorum, fmt("kappa1 -0.01: %s behavioral one-action",
                                 count_str(h0, kReplicates).c_str()));

  // only rational finals carry an alpha
  for (double k1 : {-0.1, -0.01, 0.1}) {
    const auto rows = at(k1);
    double worst = 0.0;
    const int h = hits(rows, [&](const SweepRecord& r) {
      if (!rational(r)) return true;
      worst = std::max(worst, std::abs(r.mean_alpha));
      return std::abs(r.mean_alpha) < 0.05;
    });
    out.require(h >= kQuorum, fmt("kappa1 %g: %s with |alpha| < 0.05 (max |alpha| %.4f)", k1,
                                  count_str(h, kReplicates).c_str(), worst));
  }

  bool signs = true;
  std::string bad;
  std::map<double, double> mean_alpha;
  for (const auto& [k1, k2] : SweepSpec::for_experiment(ExperimentId::Fig1).kappa_pairs) {
    const auto rows = at(k1);
    const int h = hits(rows, [&](const SweepRecord& r) {
      return !rational(r) || (r.mean_alpha > 0) == (k1 > 0);
    });
    if (h < kQuorum) {
      signs = false;
      bad += fmt(" %g(%s)", k1, count_str(h, kReplicates).c_str());
    }
    double sum = 0.0;
    int n = 0;
    for (const auto& r : rows) {
      if (rational(r)) {
        sum += r.mean_alpha;
        ++n;
      }
    }
    mean_alpha[k1] = n ? sum / n : NAN;
  }
  out.require(signs, "sign(alpha) == sign(kappa1) on every grid point" + bad);
  out.require(mean_alpha[0.9] > mean_alpha[0.5] && mean_alpha[-0.5] > mean_alpha[-0.9],
              fmt("alpha increases with kappa1 (%.4f %.4f %.4f %.4f)", mean_alpha[-0.9],
                  mean_alpha[-0.5], mean_alpha[0.5], mean_alpha[0.9]));
  return out;
}

Outcome fig2() {
  Outcome out;
  const Records rs = run_fig2(published(ExperimentId::Fig2));
  const auto spec = SweepSpec::for_experiment(ExperimentId::Fig2);
  const double p_lo = spec.p_grid.front();
  const double p_hi = spec.p_grid.back();

  for (const auto& [k1, k2] : spec.kappa_pairs) {
    for (double p : {p_lo, p_hi}) {
      const auto rows = select(rs, [&](const SweepRecord& r) {
        return r.kappa1 == k1 && r.kappa2 == k2 && r.p == p;
      });
      const int h = hits(rows, one_action_behavioral);
      out.require(h >= kQuorum, fmt("(%g, %g) p=%g: %s behavioral one-action", k1, k2, p,
                                    count_str(h, kReplicates).c_str()));
    }
  }

  const auto mid = select(rs, [](const SweepRecord& r) {
    return r.kappa1 == -0.5 && r.kappa2 == 0.5 && r.p == 0.5;
  });
  const int hm = hits(mid, [](const SweepRecord& r) { return rational(r) && r.mean_alpha > 0; });
  out.require(hm >= kQuorum, fmt("(-0.5, 0.5) p=0.5: %s with alpha > 0",
                                 count_str(hm, kReplicates).c_str()));

  int neg = 0;
  int flat = 0;
  double widest = 0.0;
  for (int rep = 0; rep < kReplicates; ++rep) {
    const auto rows = select(rs, [&](const SweepRecord& r) {
      return r.kappa1 == -0.75 && r.kappa2 == 0.05 && r.replicate == rep && r.p >= 0.1 - 1e-12 &&
             r.p <= 0.95 + 1e-12;
    });
    bool all_neg = !rows.empty();
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& r : rows) {
      if (!rational(r) || r.mean_alpha >= 0) all_neg = false;
      if (rational(r)) {
        lo = std::min(lo, r.mean_alpha);
        hi = std::max(hi, r.mean_alpha);
      }
    }
    if (all_neg) ++neg;
    const double spread = all_neg ? hi - lo : INFINITY;
    widest = std::max(widest, spread);
    if (spread < 0.05) ++flat;
  }
  out.require(neg >= kQuorum, fmt("(-0.75, 0.05) p in [0.1, 0.95]: %s replicates with alpha < 0",
                                  count_str(neg, kReplicates).c_str()));
  out.require(flat >= kQuorum, fmt("(-0.75, 0.05): %s replicates with spread < 0.05 (max %.4f)",
                                   count_str(flat, kReplicates).c_str(), widest));
  return out;
}

Outcome fig4() {
  Outcome out;
  const Records rs = run_fig4(published(ExperimentId::Fig4));
  for (double p : {0.1, 0.3, 0.5}) {
    const auto rows = select(rs, [&](const SweepRecord& r) { return r.p == p && r.eps_p == 0.0; });
    const int h = hits(rows, [](const SweepRecord& r) {
      return r.final_kind != FinalKind::Rational && r.welfare_norm <= 0.1;
    });
    out.require(h >= kQuorum, fmt("eps_p 0, p=%g: %s non-rational with welfare_norm <= 0.1 "
                                  "(group value %.4f)",
                                  p, count_str(h, kReplicates).c_str(),
                                  rows.empty() ? NAN : rows.front().welfare_norm));
  }
  for (double p : SweepSpec::for_experiment(ExperimentId::Fig4).p_grid) {
    const auto rows =
        select(rs, [&](const SweepRecord& r) { return r.p == p && r.eps_p == 0.0015; });
    const int h = hits(rows, rational);
    out.require(h >= kQuorum, fmt("eps_p 0.0015, p=%g: %s rational", p,
                                  count_str(h, kReplicates).c_str()));
  }
  const auto rows = select(rs, [](const SweepRecord& r) { return r.p == 0.7 && r.eps_p == 0.0015; });
  double sum = 0.0;
  int n = 0;
  const int h = hits(rows, [&](const SweepRecord& r) {
    if (!rational(r) || !r.converged) return false;
    sum += r.mean_alpha;
    ++n;
    return std::abs(r.mean_alpha - 0.0004) <= 0.002;
  });
  out.require(h >= kQuorum, fmt("p=0.7: %s converged with |alpha - 0.0004| <= 0.002 "
                                "(mean converged alpha %.4f)",
                                count_str(h, kReplicates).c_str(), n ? sum / n : NAN));
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome out;
  SweepSpec s = SweepSpec::for_experiment(ExperimentId::Fig2);
  s.replicates = 3;
  s.p_grid = {0.00005, 0.3, 0.5, 0.95};
  const auto dir = std::filesystem::temp_directory_path() /
                   fmt("evopref_acceptance_%d", static_cast<int>(std::random_device{}() & 0xffff));
  std::filesystem::create_directories(dir);
  std::vector<std::string> bytes;
  for (unsigned threads : {1u, 1u, 4u}) {
    s.threads = threads;
    const auto path = dir / fmt("run%zu.csv", bytes.size());
    export_records(run_sweep(s), RecordFormat::Csv, path.string());
    bytes.push_back(slurp(path));
  }
  std::filesystem::remove_all(dir);
  out.require(!bytes[0].empty(), fmt("export wrote %zu bytes", bytes[0].size()));
  out.require(bytes[0] == bytes[1], "two identical runs give byte-identical CSV");
  out.require(bytes[0] == bytes[2], "1 and 4 worker threads give byte-identical CSV");
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "closed-form vs oracle", 5, closed_form},
    {2, "ESS formula under rational-only learning", 30, ess_formula},
    {3, "unpenalised single game: NSS, no ESS", 60, proposition1},
    {4, "rational cost: B(NE(0,0)) unique ESS", 60, proposition2},
    {5, "handshake block", 10, handshake},
    {6, "fig1 qualitative", 600, fig1},
    {7, "fig2 qualitative", 600, fig2},
    {8, "fig4 anchors", 900, fig4},
    {9, "determinism", 600, determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  bool all = true;
  for (const auto& c : kCriteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.limit_s, fmt("runtime %.2f s < %.0f s", secs, c.limit_s));
    std::printf("%s %d %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
