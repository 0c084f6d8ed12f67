#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evopref/adaptive_learning.hpp"

namespace evopref {

enum class ExperimentId { Fig1, Fig2, Fig3, Fig4, Custom };

[[nodiscard]] const char* to_string(ExperimentId id) noexcept;
[[nodiscard]] std::optional<ExperimentId> parse_experiment(const std::string& s) noexcept;

/// One grid coordinate: G_{kappa1} with proportion p, G_{kappa2} with 1 - p.
struct SweepPoint {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double p = 0.5;
  double eps_p = 0.0;
};

/// A sweep is the product kappa_pairs x p_grid x eps_p_grid, each point run
/// `replicates` times. `base` supplies every other simulation setting; its
/// environment and eps_p are overwritten per point.
struct SweepSpec {
  ExperimentId experiment = ExperimentId::Custom;
  std::vector<std::pair<double, double>> kappa_pairs;
  std::vector<double> p_grid;
  std::vector<double> eps_p_grid;
  int replicates = 10;
  SimConfig base{};
  double m = 1.0;
  std::string output_path;  ///< partial results are written here on failure
  unsigned threads = 0;     ///< 0 = hardware concurrency

  /// Grids used for the published experiments, eps_r = 1e-5 and m = 1.
  static SweepSpec for_experiment(ExperimentId id);

  [[nodiscard]] std::vector<SweepPoint> points() const;
  void validate() const;
};

struct SweepRecord {
  std::string experiment;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double p = 0.0;
  double eps_p = 0.0;
  double eps_r = 0.0;
  std::uint64_t seed = 0;
  int replicate = 0;
  FinalKind final_kind = FinalKind::Mixed;
  double mean_alpha = 0.0;  ///< NaN when no agent is rational
  std::size_t distinct_actions = 0;
  double welfare_raw = 0.0;
  double welfare_norm = 0.0;
  bool converged = false;
  bool oscillating = false;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

/// Seed of one run, a pure function of the base seed and the grid coordinates.
[[nodiscard]] std::uint64_t point_seed(std::uint64_t base_seed, const SweepPoint& pt,
                                       int replicate) noexcept;

[[nodiscard]] SimConfig point_config(const SweepSpec& spec, const SweepPoint& pt, int replicate);

[[nodiscard]] SweepRecord make_record(const SweepSpec& spec, const SweepPoint& pt, int replicate,
                                      const Trajectory& tr);

/// Runs every point and replicate on a worker pool, sorts by grid coordinates
/// and normalises welfare. Deterministic for a given spec.
[[nodiscard]] std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

using Runner = std::function<Trajectory(const SimConfig&)>;

/// Same, with `runner` in place of run(). If any run throws, the records
/// finished so far go to `<output_path>.partial.csv` before the error is
/// rethrown.
[[nodiscard]] std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const Runner& runner);

/// Runs with the published grids for that experiment; grids already present in
/// `spec` are kept.
[[nodiscard]] std::vector<SweepRecord> run_fig1(SweepSpec spec);
[[nodiscard]] std::vector<SweepRecord> run_fig2(SweepSpec spec);
[[nodiscard]] std::vector<SweepRecord> run_fig3(SweepSpec spec);
[[nodiscard]] std::vector<SweepRecord> run_fig4(SweepSpec spec);

struct NormalizedGroup {
  std::vector<double> values;
  bool degenerate = false;  ///< max == min: every value is 0.5
};

/// Affine rescale to [0, 1]. Throws InvalidArgument on an empty group.
[[nodiscard]] NormalizedGroup normalize_welfare(std::span<const double> welfare);

/// Groups records by (experiment, kappa1, kappa2, p), averages welfare over
/// replicates at each eps_p and writes the normalised group mean into every
/// record's welfare_norm. Returns the number of degenerate groups.
std::size_t apply_welfare_normalization(std::vector<SweepRecord>& records);

struct TuneResult {
  double eps_p = 0.0;  ///< smallest tested value meeting the predicate
  bool bracketed = false;
  std::vector<std::pair<double, double>> evaluations;  ///< (eps_p, rational fraction)
};

/// Bisection for approximately the smallest eps_p at which at least
/// `min_fraction` of replicates end fully rational. Replicate seeds do not
/// depend on eps_p.
[[nodiscard]] TuneResult tune_eps_p(const SweepSpec& spec, double kappa1, double kappa2, double p,
                                    double lo, double hi, int iterations,
                                    double min_fraction = 0.8);

// ---------------------------------------------------------------------------
// Record serialisation

enum class RecordFormat { Csv, Json };

/// Column order of the CSV export and keys of the JSON export.
[[nodiscard]] const std::vector<std::string>& record_columns();

[[nodiscard]] std::string to_csv(std::span<const SweepRecord> records);
[[nodiscard]] std::string to_json(std::span<const SweepRecord> records);
[[nodiscard]] std::vector<SweepRecord> parse_csv(const std::string& text);
[[nodiscard]] std::vector<SweepRecord> parse_json(const std::string& text);

/// Writes records to `path`; throws IoError naming the path on failure.
void export_records(std::span<const SweepRecord> records, RecordFormat format,
                    const std::string& path);

}  // namespace evopref
