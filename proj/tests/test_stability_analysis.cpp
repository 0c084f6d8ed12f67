#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "evopref/errors.hpp"
#include "evopref/stability_analysis.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace evopref;
using doctest::Approx;

namespace {

struct DenseVerdict {
  bool nash, nss, ess;
};

// Exhaustive fine-grid classification of a single-game candidate. Every
// grid-local maximum of a deviator family is polished by golden section and
// only those polished peaks can be ties.
DenseVerdict dense_classify(const Strategy& s, const Environment& env, const PenaltyConfig& pc,
                            bool handshake = false) {
  const double tol_eq = 1e-7, tol_strict = 1e-6, step = 0.001;
  struct Family {
    double lo, hi;
    Strategy (*make)(double);
  };
  const Family families[] = {
      {-2.0, 4.0, [](double x) { return Strategy::behavioral({x}); }},
      {-2.0, 2.0, [](double x) { return Strategy::rational(x); }},
  };
  auto f = [&](const Strategy& a, const Strategy& b) {
    try {
      return penalized_fitness(a, b, env, pc);
    } catch (const SingularEquilibrium&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  auto is_self = [&](const Strategy& d) {
    if (d.kind() != s.kind()) return false;
    if (d.is_rational()) return std::abs(d.alpha() - s.alpha()) <= 1e-3;
    if (d.is_behavioral()) return std::abs(d.action(0) - s.action(0)) <= 1e-3;
    return true;
  };
  const double self = f(s, s);
  std::vector<Strategy> ties;
  for (const auto& fam : families) {
    auto gain = [&](double x) { return f(fam.make(x), s) - self; };
    const int n = static_cast<int>(std::lround((fam.hi - fam.lo) / step));
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = gain(fam.lo + step * i);
    for (int i = 0; i <= n; ++i) {
      if (g[i] > tol_eq) return {false, false, false};
      const bool peak = (i == 0 || g[i] >= g[i - 1]) && (i == n || g[i] >= g[i + 1]);
      if (!peak) continue;
      const double x0 = fam.lo + step * i;
      const double x = oracle::argmax(gain, std::max(fam.lo, x0 - step),
                                      std::min(fam.hi, x0 + step), step / 10);
      const double gx = gain(x);
      if (gx > tol_eq) return {false, false, false};
      if (gx >= -tol_eq) ties.push_back(fam.make(x));
    }
  }
  if (handshake) {
    const Strategy h = Strategy::handshake();
    const double gh = f(h, s) - self;
    if (gh > tol_eq) return {false, false, false};
    if (gh >= -tol_eq) ties.push_back(h);
  }
  DenseVerdict v{true, true, true};
  for (const auto& d : ties) {
    if (is_self(d)) continue;
    const double gap = f(s, d) - f(d, d);
    if (gap < -tol_eq) v.nss = false;
    if (gap < tol_strict) v.ess = false;
  }
  return v;
}

}  // namespace

TEST_CASE("search config validation") {
  DeviationSearchConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tol_strict = cfg.tol_eq / 2;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.alpha_step = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("spaces") {
  CHECK(contains(StrategySpace::Combined, Strategy::rational(0)));
  CHECK_FALSE(contains(StrategySpace::Combined, Strategy::handshake()));
  CHECK(contains(StrategySpace::CombinedWithHandshake, Strategy::handshake()));
  CHECK_FALSE(contains(StrategySpace::Behavioral, Strategy::rational(0)));
  CHECK_FALSE(contains(StrategySpace::Rational, Strategy::behavioral({1})));
  CHECK(std::string(to_string(StrategySpace::CombinedWithHandshake)) == "S+H");
  auto env = Environment::single({0.5, 1});
  CHECK_THROWS_AS((void)classify(Strategy::rational(0), StrategySpace::Behavioral, env, {}, {}),
                  InvalidArgument);
}

TEST_CASE("base equilibrium strategy without penalties") {
  auto env = Environment::single({0.5, 1.0});
  auto v = classify(Strategy::behavioral({2.0 / 3}), StrategySpace::Combined, env, {}, {});
  CHECK(v.is_nash);
  CHECK(v.is_nss);
  CHECK_FALSE(v.is_ess);
  REQUIRE(v.witness);
  CHECK(v.witness->is_rational());
  CHECK(v.witness->alpha() == Approx(0.0).epsilon(1e-6));
  CHECK(v.self_fitness == Approx(4.0 / 9));
}

TEST_CASE("off-equilibrium behavioral strategy is not Nash") {
  auto env = Environment::single({0.5, 1.0});
  auto v = classify(Strategy::behavioral({2.0 / 3 + 0.1}), StrategySpace::Combined, env, {}, {});
  CHECK_FALSE(v.is_nash);
  CHECK_FALSE(v.is_nss);
  REQUIRE(v.witness);
  CHECK(v.margin < 0);
}

TEST_CASE("penalised base equilibrium is an ESS") {
  for (double k : {-0.5, 0.5}) {
    auto env = Environment::single({k, 1.0});
    auto v = classify(Strategy::behavioral({1.0 / (2 - k)}), StrategySpace::Combined, env,
                      {1e-5, 0, 0}, {});
    CHECK(v.is_ess);
    CHECK(v.margin == Approx(1e-5).epsilon(1e-3));
  }
}

TEST_CASE("rational ESS preference is NSS") {
  auto env = Environment::single({0.5, 1.0});
  auto v = classify(Strategy::rational(1.0 / 3), StrategySpace::Combined, env, {}, {});
  CHECK(v.is_nss);
  CHECK_FALSE(v.is_ess);
  auto r = classify(Strategy::rational(1.0 / 3), StrategySpace::Rational, env, {}, {});
  CHECK(r.is_ess);
  auto off = classify(Strategy::rational(0.0), StrategySpace::Rational, env, {}, {});
  CHECK_FALSE(off.is_nash);
  REQUIRE(off.witness);
  CHECK(off.witness->alpha() > 0);
}

TEST_CASE("handshake invades without its penalty") {
  auto env = Environment::single({0.5, 1.0});
  auto b = Strategy::behavioral({2.0 / 3});
  auto v = classify(b, StrategySpace::CombinedWithHandshake, env, {1e-5, 0, 0}, {});
  CHECK_FALSE(v.is_ess);
  CHECK_FALSE(v.is_nss);
  REQUIRE(v.witness);
  CHECK(v.witness->is_handshake());
  auto w = classify(b, StrategySpace::CombinedWithHandshake, env, {1e-5, 0, 1e-4}, {});
  CHECK(w.is_ess);
}

TEST_CASE("classification agrees with the dense oracle") {
  struct Case {
    double kappa;
    Strategy s;
    PenaltyConfig pc;
  };
  const std::vector<Case> cases{
      {0.5, Strategy::behavioral({2.0 / 3}), {}},
      {0.5, Strategy::behavioral({0.7}), {}},
      {0.5, Strategy::rational(1.0 / 3), {}},
      {0.5, Strategy::rational(0.3), {}},
      {-0.5, Strategy::behavioral({0.4}), {}},
      {-0.5, Strategy::rational(-0.2), {}},
      {-0.5, Strategy::behavioral({0.4}), {1e-5, 0, 0}},
      {-0.5, Strategy::rational(-0.2), {1e-5, 0, 0}},
      {0.9, Strategy::rational(0.9 / 1.1), {}},
      {0.9, Strategy::behavioral({1.0 / 1.1}), {1e-5, 0, 0}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.kappa);
    CAPTURE(c.s.describe());
    auto env = Environment::single({c.kappa, 1.0});
    auto v = classify(c.s, StrategySpace::Combined, env, c.pc, {});
    auto d = dense_classify(c.s, env, c.pc);
    CHECK(v.is_nash == d.nash);
    CHECK(v.is_nss == d.nss);
    CHECK(v.is_ess == d.ess);
  }
}

TEST_CASE("verdicts nest") {
  gen::Gen G(11);
  DeviationSearchConfig cfg;
  cfg.alpha_step = 0.05;
  cfg.action_step = 0.05;
  for (int i = 0; i < 30; ++i) {
    auto env = Environment::single({G.kappa(-1.5, 0.95), 1.0});
    auto s = G.coin() ? G.behavioral(1, -0.5, 2) : G.rational();
    PenaltyConfig pc{G.coin() ? 1e-5 : 0.0, 0, 0};
    StabilityVerdict v;
    try {
      v = classify(s, StrategySpace::Combined, env, pc, cfg);
    } catch (const SingularEquilibrium&) {
      continue;
    }
    if (v.is_ess) CHECK(v.is_nss);
    if (v.is_nss) CHECK(v.is_nash);
    if (!v.is_nash) CHECK(v.witness.has_value());
  }
}

TEST_CASE("two-game behavioral candidate") {
  auto env = Environment::two_games(-0.5, 0.5, 0.5);
  auto split = Strategy::behavioral({0.4, 2.0 / 3});
  auto v = classify(split, StrategySpace::Combined, env, {1e-5, 0.002, 0}, {});
  // R(0) reproduces both actions for one parameter plus eps_r
  CHECK_FALSE(v.is_nash);
  REQUIRE(v.witness);
  CHECK(v.witness->is_rational());
  CHECK(v.witness->alpha() == Approx(0.0).epsilon(1e-6));
  CHECK(v.margin == Approx(-(0.004 - 0.00201)).epsilon(1e-6));
}

TEST_CASE("proposition reports") {
  DeviationSearchConfig cfg;
  for (double k : {-0.5, 0.5, 0.9}) {
    CAPTURE(k);
    auto r = verify_proposition1({k, 1.0}, cfg);
    CHECK(r.pass);
    CHECK(r.ess_found == 0);
    bool saw_rational = false;
    for (const auto& f : r.nash) {
      if (f.strategy.is_rational() && std::abs(f.strategy.alpha() - k / (2 - k)) < 1e-6) {
        saw_rational = true;
        CHECK(f.verdict.is_nss);
      }
    }
    CHECK(saw_rational);
  }
  auto r2 = verify_proposition2({0.5, 1.0}, 1e-5, cfg);
  CHECK(r2.pass);
  REQUIRE(r2.nash.size() == 1);
  CHECK(r2.nash[0].strategy.is_behavioral());
  CHECK(r2.nash[0].verdict.is_ess);
  CHECK_THROWS_AS((void)verify_proposition2({0.5, 1.0}, 0.0, cfg), InvalidArgument);
}

TEST_CASE("handshake report") {
  DeviationSearchConfig cfg;
  auto r = verify_handshake_block({0.5, 1.0}, {1e-5, 0, 1e-4}, cfg);
  CHECK(r.pass);
  REQUIRE(r.handshake_margin);
  CHECK(*r.handshake_margin == Approx(1e-4));
  auto neg = verify_handshake_block({-0.5, 1.0}, {1e-5, 0, 1e-4}, cfg);
  CHECK(neg.pass);
  auto zero = verify_handshake_block({0.5, 1.0}, {1e-5, 0, 0}, cfg);
  CHECK_FALSE(zero.pass);
  REQUIRE(zero.handshake_margin);
  CHECK(*zero.handshake_margin == Approx(0.0));
}

TEST_CASE("report rendering") {
  auto r = verify_proposition2({0.5, 1.0}, 1e-5, {});
  const std::string text = r.to_text();
  CHECK(text.find("PASS") != std::string::npos);
  const std::string json = r.to_json();
  CHECK(json.find("\"pass\": true") != std::string::npos);
}
