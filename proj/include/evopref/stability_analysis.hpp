#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evopref/complexity_penalties.hpp"
#include "evopref/strategy_space.hpp"

namespace evopref {

/// Strategy spaces over which stability is assessed.
enum class StrategySpace {
  Behavioral,             // B_K
  Rational,               // R_K
  Combined,               // S = B_K u R_K
  CombinedWithHandshake,  // S u H
};

[[nodiscard]] const char* to_string(StrategySpace space) noexcept;
[[nodiscard]] bool contains(StrategySpace space, const Strategy& s) noexcept;

/// Grid-plus-refinement deviator search. Action bounds, steps and the
/// identity radius for actions are in units of m; tolerances in units of m^2.
struct DeviationSearchConfig {
  double alpha_min = -2.0;
  double alpha_max = 2.0;
  double alpha_step = 0.01;
  double action_min = -2.0;
  double action_max = 4.0;
  double action_step = 0.01;
  int refine_iterations = 50;
  double tol_eq = 1e-7;
  double tol_strict = 1e-6;
  /// Deviators closer than this to the candidate are the candidate itself.
  double identity_radius = 1e-3;

  void validate() const;
};

struct StabilityVerdict {
  bool is_nash = false;
  bool is_nss = false;
  bool is_ess = false;
  /// Deviator falsifying the first failed condition.
  std::optional<Strategy> witness;
  /// Smallest gap found: f(s,s) - f(s',s) for non-tying deviators, and
  /// f(s,s') - f(s',s') for tying ones. Negative when the candidate is not Nash.
  double margin = 0.0;
  double self_fitness = 0.0;
};

/// Classifies `candidate` as Nash / NSS / ESS within `space` under penalised
/// fitness. Deterministic. Throws InvalidArgument if the candidate is not a
/// member of the space, SearchBudgetExceeded if the search diverges.
[[nodiscard]] StabilityVerdict classify(const Strategy& candidate, StrategySpace space,
                                        const Environment& env, const PenaltyConfig& pc,
                                        const DeviationSearchConfig& cfg);

struct CandidateFinding {
  Strategy strategy;
  StabilityVerdict verdict;
};

/// Outcome of numerically checking one of the stability results.
struct VerificationReport {
  std::string name;
  GameParams game;
  PenaltyConfig penalties;
  bool pass = false;
  std::vector<CandidateFinding> nash;  // every candidate found to be Nash
  std::size_t candidates_checked = 0;
  std::size_t ess_found = 0;
  std::vector<std::string> checks;           // "ok: ..." / "FAIL: ..." lines
  std::optional<double> handshake_margin;    // set by the handshake check

  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] std::string to_json() const;
};

/// Unpenalised single game: B(NE(0,0)) and the rational-space Nash strategies
/// are the only Nash strategies in S, both NSS, and no strategy is an ESS.
[[nodiscard]] VerificationReport verify_proposition1(const GameParams& g,
                                                     const DeviationSearchConfig& cfg);

/// Single game with eps_r > 0: B(NE(0,0)) is the unique Nash strategy in S and
/// it is an ESS.
[[nodiscard]] VerificationReport verify_proposition2(const GameParams& g, double eps_r,
                                                     const DeviationSearchConfig& cfg);

/// B(NE(0,0)) stays an ESS in S u H when eps_h > eps_r > 0; reports the margin
/// f(B,B) - f(H,B), which equals eps_h.
[[nodiscard]] VerificationReport verify_handshake_block(const GameParams& g,
                                                        const PenaltyConfig& pc,
                                                        const DeviationSearchConfig& cfg);

}  // namespace evopref
