#include "evopref/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "evopref/errors.hpp"

namespace evopref {

const char* to_string(ExperimentId id) noexcept {
  switch (id) {
    case ExperimentId::Fig1:
      return "fig1";
    case ExperimentId::Fig2:
      return "fig2";
    case ExperimentId::Fig3:
      return "fig3";
    case ExperimentId::Fig4:
      return "fig4";
    case ExperimentId::Custom:
      return "custom";
  }
  return "custom";
}

std::optional<ExperimentId> parse_experiment(const std::string& s) noexcept {
  for (auto id : {ExperimentId::Fig1, ExperimentId::Fig2, ExperimentId::Fig3, ExperimentId::Fig4,
                  ExperimentId::Custom}) {
    if (s == to_string(id)) return id;
  }
  return std::nullopt;
}

namespace {

// -0.9, ..., -0.1, -0.01, 0.1, ..., 0.9
std::vector<double> kappa1_grid() {
  std::vector<double> g;
  for (int i = 9; i >= 1; --i) g.push_back(-i / 10.0);
  g.push_back(-0.01);
  for (int i = 1; i <= 9; ++i) g.push_back(i / 10.0);
  return g;
}

// 0.00005, 0.05, 0.1, ..., 0.95, 0.99995
std::vector<double> proportion_grid() {
  std::vector<double> g{0.00005};
  for (int i = 1; i <= 19; ++i) g.push_back(i / 20.0);
  g.push_back(0.99995);
  return g;
}

}  // namespace

SweepSpec SweepSpec::for_experiment(ExperimentId id) {
  SweepSpec s;
  s.experiment = id;
  s.base.pc.eps_r = 1e-5;
  switch (id) {
    case ExperimentId::Fig1:
      for (double k : kappa1_grid()) s.kappa_pairs.emplace_back(k, 0.001);
      s.p_grid = {0.5};
      s.eps_p_grid = {0.001};
      break;
    case ExperimentId::Fig2:
      s.kappa_pairs = {{-0.5, 0.5}, {-0.75, 0.05}, {-0.05, 0.75}};
      s.p_grid = proportion_grid();
      s.eps_p_grid = {0.002};
      break;
    case ExperimentId::Fig3:
      for (double k : kappa1_grid()) s.kappa_pairs.emplace_back(k, 0.001);
      s.p_grid = proportion_grid();
      s.eps_p_grid = {0.002};
      break;
    case ExperimentId::Fig4:
      s.kappa_pairs = {{-0.5, 0.5}};
      s.p_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
      for (int i = 0; i <= 20; ++i) s.eps_p_grid.push_back(i / 10000.0);
      break;
    case ExperimentId::Custom:
      break;
  }
  return s;
}

std::vector<SweepPoint> SweepSpec::points() const {
  std::vector<SweepPoint> pts;
  pts.reserve(kappa_pairs.size() * p_grid.size() * eps_p_grid.size());
  for (const auto& [k1, k2] : kappa_pairs) {
    for (double p : p_grid) {
      for (double e : eps_p_grid) pts.push_back({k1, k2, p, e});
    }
  }
  return pts;
}

void SweepSpec::validate() const {
  if (kappa_pairs.empty() || p_grid.empty() || eps_p_grid.empty()) {
    throw InvalidArgument("sweep grids must be non-empty");
  }
  if (replicates < 1) throw InvalidArgument("sweep needs at least one replicate");
  for (const auto& [k1, k2] : kappa_pairs) {
    GameParams{k1, m}.validate();
    GameParams{k2, m}.validate();
  }
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("sweep: p must lie in [0, 1]");
  }
  for (double e : eps_p_grid) {
    if (!(e >= 0.0)) throw InvalidArgument("sweep: eps_p must be nonnegative");
  }
  base.validate();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, double v) noexcept {
  if (v == 0.0) v = 0.0;  // fold -0.0
  return splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
}

}  // namespace

std::uint64_t point_seed(std::uint64_t base_seed, const SweepPoint& pt, int replicate) noexcept {
  std::uint64_t h = splitmix64(base_seed);
  h = mix(h, pt.kappa1);
  h = mix(h, pt.kappa2);
  h = mix(h, pt.p);
  h = mix(h, pt.eps_p);
  return splitmix64(h ^ static_cast<std::uint64_t>(replicate));
}

SimConfig point_config(const SweepSpec& spec, const SweepPoint& pt, int replicate) {
  SimConfig cfg = spec.base;
  cfg.env = Environment::two_games(pt.kappa1, pt.kappa2, pt.p, spec.m);
  cfg.pc.eps_p = pt.eps_p;
  cfg.seed = point_seed(spec.base.seed, pt, replicate);
  return cfg;
}

SweepRecord make_record(const SweepSpec& spec, const SweepPoint& pt, int replicate,
                        const Trajectory& tr) {
  SweepRecord r;
  r.experiment = to_string(spec.experiment);
  r.kappa1 = pt.kappa1;
  r.kappa2 = pt.kappa2;
  r.p = pt.p;
  r.eps_p = pt.eps_p;
  r.eps_r = spec.base.pc.eps_r;
  r.seed = point_seed(spec.base.seed, pt, replicate);
  r.replicate = replicate;
  r.final_kind = tr.final_kind;
  r.mean_alpha = tr.final_mean_alpha;
  r.distinct_actions = tr.final_distinct_actions;
  r.welfare_raw = tr.welfare;
  r.welfare_norm = std::numeric_limits<double>::quiet_NaN();
  r.converged = tr.converged;
  r.oscillating = tr.oscillating;
  return r;
}

namespace {

auto coordinates(const SweepRecord& r) {
  return std::make_tuple(r.kappa1, r.kappa2, r.p, r.eps_p, r.replicate);
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
  return run_sweep(spec, [](const SimConfig& cfg) { return run(cfg); });
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const Runner& runner) {
  spec.validate();
  const std::vector<SweepPoint> pts = spec.points();
  const std::size_t reps = static_cast<std::size_t>(spec.replicates);
  const std::size_t jobs = pts.size() * reps;

  std::vector<std::optional<SweepRecord>> slots(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      const SweepPoint& pt = pts[job / reps];
      const int rep = static_cast<int>(job % reps);
      try {
        slots[job] = make_record(spec, pt, rep, runner(point_config(spec, pt, rep)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned n_threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(jobs)));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }

  std::vector<SweepRecord> records;
  records.reserve(jobs);
  for (auto& s : slots) {
    if (s) records.push_back(std::move(*s));
  }
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return coordinates(a) < coordinates(b);
  });
  if (failure) {
    if (!spec.output_path.empty()) {
      export_records(records, RecordFormat::Csv, spec.output_path + ".partial.csv");
    }
    std::rethrow_exception(failure);
  }
  apply_welfare_normalization(records);
  return records;
}

namespace {

std::vector<SweepRecord> run_with_defaults(SweepSpec spec, ExperimentId id) {
  const SweepSpec d = SweepSpec::for_experiment(id);
  spec.experiment = id;
  if (spec.kappa_pairs.empty()) spec.kappa_pairs = d.kappa_pairs;
  if (spec.p_grid.empty()) spec.p_grid = d.p_grid;
  if (spec.eps_p_grid.empty()) spec.eps_p_grid = d.eps_p_grid;
  return run_sweep(spec);
}

}  // namespace

std::vector<SweepRecord> run_fig1(SweepSpec spec) {
  return run_with_defaults(std::move(spec), ExperimentId::Fig1);
}
std::vector<SweepRecord> run_fig2(SweepSpec spec) {
  return run_with_defaults(std::move(spec), ExperimentId::Fig2);
}
std::vector<SweepRecord> run_fig3(SweepSpec spec) {
  return run_with_defaults(std::move(spec), ExperimentId::Fig3);
}
std::vector<SweepRecord> run_fig4(SweepSpec spec) {
  return run_with_defaults(std::move(spec), ExperimentId::Fig4);
}

NormalizedGroup normalize_welfare(std::span<const double> welfare) {
  if (welfare.empty()) throw InvalidArgument("normalize_welfare: empty group");
  const auto [lo, hi] = std::minmax_element(welfare.begin(), welfare.end());
  NormalizedGroup out;
  out.values.reserve(welfare.size());
  if (*hi - *lo <= 1e-12) {
    out.degenerate = true;
    out.values.assign(welfare.size(), 0.5);
    return out;
  }
  for (double w : welfare) out.values.push_back((w - *lo) / (*hi - *lo));
  return out;
}

std::size_t apply_welfare_normalization(std::vector<SweepRecord>& records) {
  using GroupKey = std::tuple<std::string, double, double, double>;
  // group -> eps_p -> replicate welfare
  std::map<GroupKey, std::map<double, std::vector<double>>> groups;
  for (const auto& r : records) {
    groups[{r.experiment, r.kappa1, r.kappa2, r.p}][r.eps_p].push_back(r.welfare_raw);
  }
  std::map<GroupKey, std::map<double, double>> normalized;
  std::size_t degenerate = 0;
  for (auto& [key, cells] : groups) {
    std::vector<double> means;
    for (auto& [eps, ws] : cells) {
      // sorted so the sum does not depend on record order
      std::sort(ws.begin(), ws.end());
      double sum = 0.0;
      for (double w : ws) sum += w;
      means.push_back(sum / static_cast<double>(ws.size()));
    }
    const NormalizedGroup g = normalize_welfare(means);
    if (g.degenerate) ++degenerate;
    std::size_t i = 0;
    for (const auto& cell : cells) normalized[key][cell.first] = g.values[i++];
  }
  for (auto& r : records) {
    r.welfare_norm = normalized[{r.experiment, r.kappa1, r.kappa2, r.p}][r.eps_p];
  }
  return degenerate;
}

TuneResult tune_eps_p(const SweepSpec& spec, double kappa1, double kappa2, double p, double lo,
                      double hi, int iterations, double min_fraction) {
  if (!(hi > lo && lo >= 0.0)) throw InvalidArgument("tune_eps_p: need 0 <= lo < hi");
  if (iterations < 0) throw InvalidArgument("tune_eps_p: negative iteration count");
  SweepSpec s = spec;
  s.kappa_pairs = {{kappa1, kappa2}};
  s.p_grid = {p};
  s.eps_p_grid = {0.0};
  s.validate();

  TuneResult result;
  auto rational_fraction = [&](double eps) {
    int rational = 0;
    for (int rep = 0; rep < s.replicates; ++rep) {
      // Common random numbers: the seed ignores eps_p.
      SimConfig cfg = point_config(s, {kappa1, kappa2, p, 0.0}, rep);
      cfg.pc.eps_p = eps;
      if (run(cfg).final_kind == FinalKind::Rational) ++rational;
    }
    const double f = static_cast<double>(rational) / s.replicates;
    result.evaluations.emplace_back(eps, f);
    return f;
  };
  if (rational_fraction(hi) < min_fraction) {
    result.eps_p = hi;
    return result;
  }
  result.bracketed = true;
  if (rational_fraction(lo) >= min_fraction) {
    result.eps_p = lo;
    return result;
  }
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rational_fraction(mid) >= min_fraction) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.eps_p = hi;
  return result;
}

}  // namespace evopref
