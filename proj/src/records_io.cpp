#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "evopref/errors.hpp"
#include "evopref/experiments.hpp"

namespace evopref {

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols{
      "experiment", "kappa1",     "kappa2",           "p",           "eps_P",
      "eps_R",      "seed",       "replicate",        "final_kind",  "mean_alpha",
      "distinct_actions", "welfare_raw", "welfare_norm", "converged", "oscillating"};
  return cols;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Value as it will read back after 9-significant-digit printing.
double rounded(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(fmt(v).c_str(), nullptr);
}

FinalKind parse_kind(const std::string& s) {
  if (s == "behavioral") return FinalKind::Behavioral;
  if (s == "rational") return FinalKind::Rational;
  if (s == "mixed") return FinalKind::Mixed;
  throw InvalidArgument("unknown final_kind '" + s + "'");
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw InvalidArgument("expected a boolean, got '" + s + "'");
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InvalidArgument("malformed number '" + s + "'");
  return v;
}

}  // namespace

std::string to_csv(std::span<const SweepRecord> records) {
  std::ostringstream os;
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& r : records) {
    os << r.experiment << ',' << fmt(r.kappa1) << ',' << fmt(r.kappa2) << ',' << fmt(r.p) << ','
       << fmt(r.eps_p) << ',' << fmt(r.eps_r) << ',' << r.seed << ',' << r.replicate << ','
       << to_string(r.final_kind) << ',' << fmt(r.mean_alpha) << ',' << r.distinct_actions << ','
       << fmt(r.welfare_raw) << ',' << fmt(r.welfare_norm) << ','
       << (r.converged ? "true" : "false") << ',' << (r.oscillating ? "true" : "false") << "\n";
  }
  return os.str();
}

std::vector<SweepRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("CSV is empty");
  std::string expected;
  for (const auto& c : record_columns()) expected += (expected.empty() ? "" : ",") + c;
  if (line != expected) throw InvalidArgument("CSV header does not match the record schema");
  std::vector<SweepRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != record_columns().size()) {
      throw InvalidArgument("CSV row has " + std::to_string(f.size()) + " fields: " + line);
    }
    SweepRecord r;
    r.experiment = f[0];
    r.kappa1 = parse_double(f[1]);
    r.kappa2 = parse_double(f[2]);
    r.p = parse_double(f[3]);
    r.eps_p = parse_double(f[4]);
    r.eps_r = parse_double(f[5]);
    r.seed = std::stoull(f[6]);
    r.replicate = std::stoi(f[7]);
    r.final_kind = parse_kind(f[8]);
    r.mean_alpha = parse_double(f[9]);
    r.distinct_actions = std::stoull(f[10]);
    r.welfare_raw = parse_double(f[11]);
    r.welfare_norm = parse_double(f[12]);
    r.converged = parse_bool(f[13]);
    r.oscillating = parse_bool(f[14]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string to_json(std::span<const SweepRecord> records) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return rounded(v);
  };
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["experiment"] = r.experiment;
    j["kappa1"] = num(r.kappa1);
    j["kappa2"] = num(r.kappa2);
    j["p"] = num(r.p);
    j["eps_P"] = num(r.eps_p);
    j["eps_R"] = num(r.eps_r);
    j["seed"] = r.seed;
    j["replicate"] = r.replicate;
    j["final_kind"] = to_string(r.final_kind);
    j["mean_alpha"] = num(r.mean_alpha);
    j["distinct_actions"] = r.distinct_actions;
    j["welfare_raw"] = num(r.welfare_raw);
    j["welfare_norm"] = num(r.welfare_norm);
    j["converged"] = r.converged;
    j["oscillating"] = r.oscillating;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::vector<SweepRecord> parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed record JSON: ") + e.what());
  }
  if (!doc.is_array()) throw InvalidArgument("record JSON must be an array");
  auto num = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  std::vector<SweepRecord> out;
  try {
    for (const auto& j : doc) {
      SweepRecord r;
      r.experiment = j.at("experiment").get<std::string>();
      r.kappa1 = num(j.at("kappa1"));
      r.kappa2 = num(j.at("kappa2"));
      r.p = num(j.at("p"));
      r.eps_p = num(j.at("eps_P"));
      r.eps_r = num(j.at("eps_R"));
      r.seed = j.at("seed").get<std::uint64_t>();
      r.replicate = j.at("replicate").get<int>();
      r.final_kind = parse_kind(j.at("final_kind").get<std::string>());
      r.mean_alpha = num(j.at("mean_alpha"));
      r.distinct_actions = j.at("distinct_actions").get<std::size_t>();
      r.welfare_raw = num(j.at("welfare_raw"));
      r.welfare_norm = num(j.at("welfare_norm"));
      r.converged = j.at("converged").get<bool>();
      r.oscillating = j.at("oscillating").get<bool>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("record JSON does not match the schema: ") + e.what());
  }
  return out;
}

void export_records(std::span<const SweepRecord> records, RecordFormat format,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  out << (format == RecordFormat::Csv ? to_csv(records) : to_json(records));
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace evopref
