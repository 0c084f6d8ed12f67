// evopref command-line front end over the C interface.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evopref/evopref.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Status codes caused by bad parameters map to the config exit code.
void check(evopref_status s) {
  if (s == EVOPREF_OK) return;
  std::string msg = std::string(evopref_status_name(s)) + ": " + evopref_last_error();
  if (s == EVOPREF_ERR_INVALID_ARGUMENT) throw ConfigError(msg);
  throw NumericError(msg);
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Sweep = Handle<evopref_sweep, evopref_sweep_destroy>;
using Records = Handle<evopref_records, evopref_records_destroy>;
using Trajectory = Handle<evopref_trajectory, evopref_trajectory_destroy>;
using Report = Handle<evopref_report, evopref_report_destroy>;
using Verdict = Handle<evopref_verdict, evopref_verdict_destroy>;
using Env = Handle<evopref_environment, evopref_environment_destroy>;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { evopref_string_free(p); }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key = value (or key: value) per line, '#' comments. Keys use the long flag
// names; underscores are accepted for dashes.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto sep = line.find_first_of("=:");
    if (sep == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, sep));
    std::string value = trim(line.substr(sep + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    for (auto& c : key)
      if (c == '_') c = '-';
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

// Feeds file values to options the command line left unset.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  for (const auto& [key, value] : read_config(path)) {
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config")
      throw ConfigError("unknown config key '" + key + "' for '" + sub->get_name() + "'");
    if (opt->count() > 0) continue;
    if (opt->get_expected_max() > 1) {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) opt->add_result(trim(item));
    } else {
      opt->add_result(value);
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

evopref_format parse_format(const std::string& f) {
  if (f == "csv") return EVOPREF_CSV;
  if (f == "json") return EVOPREF_JSON;
  throw ConfigError("unknown format '" + f + "'");
}

void emit(const evopref_records* r, evopref_format fmt, const std::string& out) {
  if (out.empty() || out == "-") {
    OwnedString s;
    check(evopref_records_serialize(r, fmt, &s.p));
    const std::size_t n = std::strlen(s.p);
    std::fwrite(s.p, 1, n, stdout);
    if (n == 0 || s.p[n - 1] != '\n') std::fputc('\n', stdout);
  } else {
    check(evopref_records_export(r, fmt, out.c_str()));
  }
}

evopref_strategy_kind kind_of(char c) {
  switch (c) {
    case 'B': return EVOPREF_BEHAVIORAL;
    case 'R': return EVOPREF_RATIONAL;
    default: return EVOPREF_HANDSHAKE;
  }
}

// Candidate syntax: ne0, ess, H, R(alpha), B(a1,...,aK).
void parse_strategy(const std::string& text, const evopref_game& g, evopref_strategy& s,
                    std::vector<double>& storage) {
  s = {};
  storage.clear();
  if (text == "ne0") {
    storage.push_back(g.m / (2.0 - g.kappa));
    s.kind = EVOPREF_BEHAVIORAL;
  } else if (text == "ess") {
    s.kind = EVOPREF_RATIONAL;
    check(evopref_ess_alpha(&g, &s.alpha));
  } else if (text == "H") {
    s.kind = EVOPREF_HANDSHAKE;
  } else if (text.size() > 3 && (text[0] == 'B' || text[0] == 'R') && text[1] == '(' &&
             text.back() == ')') {
    std::stringstream ss(text.substr(2, text.size() - 3));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        storage.push_back(std::stod(trim(item), &used));
        if (used != trim(item).size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("bad number '" + item + "' in strategy '" + text + "'");
      }
    }
    s.kind = kind_of(text[0]);
    if (s.kind == EVOPREF_RATIONAL) {
      if (storage.size() != 1) throw ConfigError("R(alpha) takes one value");
      s.alpha = storage[0];
      storage.clear();
    }
  } else {
    throw ConfigError("unknown strategy '" + text + "' (ne0, ess, H, R(a), B(a,...))");
  }
  s.actions = storage.data();
  s.n_actions = storage.size();
}

evopref_space parse_space(const std::string& s) {
  if (s == "B") return EVOPREF_SPACE_B;
  if (s == "R") return EVOPREF_SPACE_R;
  if (s == "S") return EVOPREF_SPACE_S;
  if (s == "S+H") return EVOPREF_SPACE_S_WITH_H;
  throw ConfigError("unknown strategy space '" + s + "' (B, R, S, S+H)");
}

evopref_learning_space parse_learning(const std::string& s) {
  if (s == "full") return EVOPREF_LEARN_FULL;
  if (s == "rational") return EVOPREF_LEARN_RATIONAL_ONLY;
  if (s == "behavioral") return EVOPREF_LEARN_BEHAVIORAL_ONLY;
  throw ConfigError("unknown learning space '" + s + "' (full, rational, behavioral)");
}

evopref_experiment parse_experiment(const std::string& s) {
  if (s == "fig1") return EVOPREF_FIG1;
  if (s == "fig2") return EVOPREF_FIG2;
  if (s == "fig3") return EVOPREF_FIG3;
  if (s == "fig4") return EVOPREF_FIG4;
  if (s == "custom") return EVOPREF_CUSTOM;
  throw ConfigError("unknown experiment '" + s + "'");
}

// Options shared by every command that runs the learning dynamic.
struct DynamicsOpts {
  std::uint64_t seed = 1;
  int rounds = 30;
  std::size_t pop_size = 10;
  double q1 = 0.01;
  double eps_r = 1e-5;
  double eps_h = 0.0;
  double m = 1.0;
  std::string space = "full";

  void add(CLI::App* sub) {
    sub->add_option("--seed", seed, "Base RNG seed")->capture_default_str();
    sub->add_option("--rounds", rounds, "Rounds per run")->capture_default_str();
    sub->add_option("--pop-size", pop_size, "Population size")->capture_default_str();
    sub->add_option("--q1", q1, "Initial mutation probability")->capture_default_str();
    sub->add_option("--eps-r", eps_r, "Rationality penalty")->capture_default_str();
    sub->add_option("--eps-h", eps_h, "Handshake penalty")->capture_default_str();
    sub->add_option("--m", m, "Payoff scale")->capture_default_str();
    sub->add_option("--space", space, "Learning space: full, rational, behavioral")
        ->capture_default_str();
  }

  evopref_sim_config config() const {
    evopref_sim_config c;
    evopref_sim_config_default(&c);
    c.seed = seed;
    c.rounds = rounds;
    c.population_size = pop_size;
    c.q1 = q1;
    c.penalties.eps_r = eps_r;
    c.penalties.eps_h = eps_h;
    c.m = m;
    c.space = parse_learning(space);
    return c;
  }
};

struct CheckOpts {
  double kappa = 0.5;
  double m = 1.0;
  double eps_r = 0.0;
  double eps_p = 0.0;
  double eps_h = 0.0;
  std::string mode = "auto";
  std::string space = "S";
  std::string strategy = "ne0";
  double alpha_step = 0.01;
  double action_step = 0.01;
  std::string format = "text";
};

int run_check(const CheckOpts& o) {
  evopref_game g{o.kappa, o.m};
  evopref_penalties pc{o.eps_r, o.eps_p, o.eps_h};
  evopref_search_config sc;
  evopref_search_config_default(&sc);
  sc.alpha_step = o.alpha_step;
  sc.action_step = o.action_step;
  if (o.format != "text" && o.format != "json") throw ConfigError("unknown format '" + o.format + "'");
  const bool json = o.format == "json";

  std::string mode = o.mode;
  if (mode == "auto") {
    if (o.eps_h > 0.0) mode = "handshake";
    else if (o.eps_r > 0.0) mode = "prop2";
    else mode = "prop1";
  }

  if (mode == "classify") {
    evopref_strategy s;
    std::vector<double> storage;
    parse_strategy(o.strategy, g, s, storage);
    Env env;
    const double one = 1.0;
    check(evopref_environment_create(&g, &one, 1, &env.p));
    Verdict v;
    check(evopref_classify(&s, parse_space(o.space), env.p, &pc, &sc, &v.p));
    if (json) {
      std::printf("{\"verdict\": \"%s\", \"nash\": %s, \"nss\": %s, \"ess\": %s, \"margin\": %.9g}\n",
                  evopref_verdict_describe(v.p), evopref_verdict_is_nash(v.p) ? "true" : "false",
                  evopref_verdict_is_nss(v.p) ? "true" : "false",
                  evopref_verdict_is_ess(v.p) ? "true" : "false", evopref_verdict_margin(v.p));
    } else {
      std::printf("%s\nmargin %.9g\n", evopref_verdict_describe(v.p), evopref_verdict_margin(v.p));
    }
    return kExitOk;
  }

  Report r;
  if (mode == "prop1") {
    check(evopref_verify_proposition1(&g, &sc, &r.p));
  } else if (mode == "prop2") {
    check(evopref_verify_proposition2(&g, o.eps_r, &sc, &r.p));
  } else if (mode == "handshake") {
    check(evopref_verify_handshake(&g, &pc, &sc, &r.p));
  } else {
    throw ConfigError("unknown mode '" + mode + "' (auto, prop1, prop2, handshake, classify)");
  }
  const std::string body = json ? evopref_report_json(r.p) : evopref_report_text(r.p);
  std::fputs(body.c_str(), stdout);
  if (body.empty() || body.back() != '\n') std::fputc('\n', stdout);
  return evopref_report_passed(r.p) ? kExitOk : kExitNumeric;
}

struct SimulateOpts {
  DynamicsOpts dyn;
  double kappa1 = 0.5;
  std::optional<double> kappa2;
  double p = 0.5;
  double eps_p = 0.0;
  std::string format = "csv";
  std::string out;
  std::string trajectory;
};

int run_simulate(const SimulateOpts& o) {
  evopref_sim_config c = o.dyn.config();
  c.kappa1 = o.kappa1;
  c.single_game = !o.kappa2.has_value();
  c.kappa2 = o.kappa2.value_or(o.kappa1);
  c.p = c.single_game ? 1.0 : o.p;
  c.penalties.eps_p = o.eps_p;
  const evopref_format fmt = parse_format(o.format);

  Trajectory tr;
  check(evopref_simulate(&c, &tr.p));
  if (!o.trajectory.empty()) {
    OwnedString s;
    check(evopref_trajectory_json(tr.p, &s.p));
    std::ofstream f(o.trajectory);
    if (!(f << s.p << '\n')) throw NumericError("cannot write trajectory to '" + o.trajectory + "'");
  }
  Records rec;
  check(evopref_records_from_trajectory(tr.p, &c, &rec.p));
  emit(rec.p, fmt, o.out);
  return kExitOk;
}

struct SweepOpts {
  DynamicsOpts dyn;
  std::string experiment = "fig1";
  std::string out;
  std::string format = "csv";
  int replicates = 10;
  unsigned threads = 0;
  std::vector<double> kappa1;
  std::vector<double> kappa2;
  std::vector<double> p;
  std::vector<double> eps_p;
};

void configure_sweep(evopref_sweep* s, const DynamicsOpts& dyn, int replicates, unsigned threads,
                     const std::vector<double>& k1, const std::vector<double>& k2) {
  evopref_sim_config base = dyn.config();
  check(evopref_sweep_set_base(s, &base));
  check(evopref_sweep_set_replicates(s, replicates));
  check(evopref_sweep_set_threads(s, threads));
  if (!k1.empty() || !k2.empty()) {
    if (k1.size() != k2.size() && k2.size() != 1)
      throw ConfigError("--kappa2 needs one value or as many as --kappa1");
    std::vector<double> b = k2.size() == 1 ? std::vector<double>(k1.size(), k2[0]) : k2;
    check(evopref_sweep_set_kappa_pairs(s, k1.data(), b.data(), k1.size()));
  }
}

int run_sweep(const SweepOpts& o) {
  const evopref_format fmt = parse_format(o.format);
  Sweep s;
  check(evopref_sweep_create(parse_experiment(o.experiment), &s.p));
  configure_sweep(s.p, o.dyn, o.replicates, o.threads, o.kappa1, o.kappa2);
  if (!o.p.empty()) check(evopref_sweep_set_p_grid(s.p, o.p.data(), o.p.size()));
  if (!o.eps_p.empty()) check(evopref_sweep_set_eps_p_grid(s.p, o.eps_p.data(), o.eps_p.size()));
  if (!o.out.empty() && o.out != "-") check(evopref_sweep_set_output_path(s.p, o.out.c_str()));
  if (evopref_sweep_point_count(s.p) == 0)
    throw ConfigError("sweep grid is empty (custom sweeps need --kappa1, --kappa2, --p, --eps-p)");
  Records rec;
  check(evopref_sweep_run(s.p, &rec.p));
  emit(rec.p, fmt, o.out);
  return kExitOk;
}

struct TuneOpts {
  DynamicsOpts dyn;
  double kappa1 = -0.5;
  double kappa2 = 0.5;
  double p = 0.5;
  double lo = 0.0;
  double hi = 0.004;
  int iterations = 8;
  double min_fraction = 0.8;
  int replicates = 10;
};

int run_tune(const TuneOpts& o) {
  Sweep s;
  check(evopref_sweep_create(EVOPREF_CUSTOM, &s.p));
  configure_sweep(s.p, o.dyn, o.replicates, 0, {}, {});
  double eps = 0.0;
  int bracketed = 0;
  check(evopref_tune_eps_p(s.p, o.kappa1, o.kappa2, o.p, o.lo, o.hi, o.iterations, o.min_fraction,
                           &eps, &bracketed));
  std::printf("eps_p %.9g\nbracketed %s\n", eps, bracketed ? "true" : "false");
  if (!bracketed) {
    std::fprintf(stderr, "no eps_p in [%g, %g] reaches a rational fraction of %g\n", o.lo, o.hi,
                 o.min_fraction);
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolution of other-regarding preferences under complexity costs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(evopref_version()));

  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value file; flags override it")
        ->check(CLI::ExistingFile);
  };

  CheckOpts check_o;
  auto* check_cmd = app.add_subcommand("check", "Verify stability results for one game");
  add_config(check_cmd);
  check_cmd->add_option("--kappa", check_o.kappa, "Externality coefficient")->capture_default_str();
  check_cmd->add_option("--m", check_o.m, "Payoff scale")->capture_default_str();
  check_cmd->add_option("--eps-r", check_o.eps_r, "Rationality penalty")->capture_default_str();
  check_cmd->add_option("--eps-p", check_o.eps_p, "Per-parameter penalty")->capture_default_str();
  check_cmd->add_option("--eps-h", check_o.eps_h, "Handshake penalty")->capture_default_str();
  check_cmd->add_option("--mode", check_o.mode, "auto, prop1, prop2, handshake, classify")
      ->capture_default_str();
  check_cmd->add_option("--space", check_o.space, "Space for classify: B, R, S, S+H")
      ->capture_default_str();
  check_cmd->add_option("--strategy", check_o.strategy, "Candidate: ne0, ess, H, R(a), B(a)")
      ->capture_default_str();
  check_cmd->add_option("--alpha-step", check_o.alpha_step, "Deviation grid step in alpha")
      ->capture_default_str();
  check_cmd->add_option("--action-step", check_o.action_step, "Deviation grid step in actions / m")
      ->capture_default_str();
  check_cmd->add_option("--format", check_o.format, "text or json")->capture_default_str();

  SimulateOpts sim_o;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the learning dynamic once");
  add_config(sim_cmd);
  sim_o.dyn.add(sim_cmd);
  sim_cmd->add_option("--kappa1", sim_o.kappa1, "Externality of the first game")
      ->capture_default_str();
  sim_cmd->add_option("--kappa2", sim_o.kappa2, "Externality of the second game (omit: one game)");
  sim_cmd->add_option("--p", sim_o.p, "Proportion of the first game")->capture_default_str();
  sim_cmd->add_option("--eps-p", sim_o.eps_p, "Per-parameter penalty")->capture_default_str();
  sim_cmd->add_option("--format", sim_o.format, "csv or json")->capture_default_str();
  sim_cmd->add_option("--out", sim_o.out, "Record output path (default stdout)");
  sim_cmd->add_option("--trajectory", sim_o.trajectory, "Write the full trajectory as JSON");

  SweepOpts sweep_o;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment grid");
  add_config(sweep_cmd);
  sweep_o.dyn.add(sweep_cmd);
  sweep_cmd->add_option("--experiment", sweep_o.experiment, "fig1, fig2, fig3, fig4, custom")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep_o.out, "Output path (default stdout)");
  sweep_cmd->add_option("--format", sweep_o.format, "csv or json")->capture_default_str();
  sweep_cmd->add_option("--replicates", sweep_o.replicates, "Runs per grid point")
      ->capture_default_str();
  sweep_cmd->add_option("--threads", sweep_o.threads, "Worker threads (0: all cores)")
      ->capture_default_str();
  sweep_cmd->add_option("--kappa1", sweep_o.kappa1, "kappa1 values (paired with --kappa2)")
      ->delimiter(',');
  sweep_cmd->add_option("--kappa2", sweep_o.kappa2, "kappa2 values")->delimiter(',');
  sweep_cmd->add_option("--p", sweep_o.p, "Proportion grid")->delimiter(',');
  sweep_cmd->add_option("--eps-p", sweep_o.eps_p, "Per-parameter penalty grid")->delimiter(',');

  TuneOpts tune_o;
  auto* tune_cmd = app.add_subcommand("tune-eps-p", "Bisect for the smallest eps_p with rational finals");
  add_config(tune_cmd);
  tune_o.dyn.add(tune_cmd);
  tune_cmd->add_option("--kappa1", tune_o.kappa1, "Externality of the first game")->capture_default_str();
  tune_cmd->add_option("--kappa2", tune_o.kappa2, "Externality of the second game")->capture_default_str();
  tune_cmd->add_option("--p", tune_o.p, "Proportion of the first game")->capture_default_str();
  tune_cmd->add_option("--lo", tune_o.lo, "Lower end of the bracket")->capture_default_str();
  tune_cmd->add_option("--hi", tune_o.hi, "Upper end of the bracket")->capture_default_str();
  tune_cmd->add_option("--iterations", tune_o.iterations, "Bisection steps")->capture_default_str();
  tune_cmd->add_option("--min-fraction", tune_o.min_fraction, "Required rational fraction")
      ->capture_default_str();
  tune_cmd->add_option("--replicates", tune_o.replicates, "Runs per tested value")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) apply_config(sub, config_path);
    if (check_cmd->parsed()) return run_check(check_o);
    if (sim_cmd->parsed()) return run_simulate(sim_o);
    if (sweep_cmd->parsed()) return run_sweep(sweep_o);
    if (tune_cmd->parsed()) return run_tune(tune_o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitConfig;
}
