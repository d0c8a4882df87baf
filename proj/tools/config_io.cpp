#include "config_io.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace wavekernel::cli {

namespace {

using suites::ConfigError;

std::string at(const std::string& key, const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.line < 0) return key;
  return key + " (line " + std::to_string(m.line + 1) + ")";
}

void reject_unknown(const YAML::Node& map, const std::string& prefix, const std::set<std::string>& allowed) {
  if (!map.IsMap()) throw ConfigError(at(prefix.empty() ? "<root>" : prefix, map), "expected a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError(at(prefix.empty() ? key : prefix + "." + key, kv.first), "unknown key");
    }
  }
}

template <class T>
void read(const YAML::Node& map, const std::string& prefix, const char* key, T& out) {
  const YAML::Node v = map[key];
  if (!v) return;
  const std::string name = prefix.empty() ? key : prefix + "." + key;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(at(name, v), "cannot read value '" + YAML::Dump(v) + "'");
  }
}

// Re-runs validation so its field names carry the line of the offending key.
void validate_with_lines(const suites::Config& cfg, const YAML::Node& root) {
  try {
    suites::validate(cfg);
  } catch (const ConfigError& e) {
    YAML::Node node = root;
    std::string path = e.field();
    std::size_t start = 0;
    bool found = true;
    while (found && start <= path.size()) {
      const std::size_t dot = path.find('.', start);
      const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!node.IsMap() || !node[part]) {
        found = false;
        break;
      }
      node = node[part];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    const std::string message = std::string(e.what()).substr(e.field().size() + 2);
    throw ConfigError(found ? at(e.field(), node) : e.field(), message);
  }
}

}  // namespace

Experiment parse_experiment(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<syntax> (line " + std::to_string(e.mark.line + 1) + ")", e.msg);
  }
  Experiment ex;
  if (!root || root.IsNull()) return ex;
  reject_unknown(root, "", {"n", "a", "h", "seed", "threads", "potential", "grid", "fixed_point", "tolerances",
                            "suites", "output"});
  suites::Config& c = ex.config;
  read(root, "", "n", c.n);
  read(root, "", "a", c.a);
  read(root, "", "h", c.h);
  read(root, "", "seed", c.seed);
  read(root, "", "threads", c.threads);
  read(root, "", "suites", ex.suites);
  if (root["output"]) {
    std::string out;
    read(root, "", "output", out);
    ex.output = out;
  }
  if (const YAML::Node p = root["potential"]) {
    reject_unknown(p, "potential", {"delta", "neumann_factor", "coupling"});
    read(p, "potential", "delta", c.delta);
    read(p, "potential", "neumann_factor", c.neumann_factor);
    if (p["coupling"]) {
      double v = 0.0;
      read(p, "potential", "coupling", v);
      c.coupling = v;
    }
  }
  if (const YAML::Node g = root["grid"]) {
    reject_unknown(g, "grid", {"radial_nodes", "r_min", "r_max", "time_extent", "time_intervals", "lambda_nodes"});
    read(g, "grid", "radial_nodes", c.radial_nodes);
    read(g, "grid", "r_min", c.r_min);
    read(g, "grid", "r_max", c.r_max);
    read(g, "grid", "time_extent", c.time_extent);
    read(g, "grid", "time_intervals", c.time_intervals);
    read(g, "grid", "lambda_nodes", c.lambda_nodes);
  }
  if (const YAML::Node f = root["fixed_point"]) {
    reject_unknown(f, "fixed_point", {"h", "time_extent", "time_intervals"});
    read(f, "fixed_point", "h", c.fixed_point_h);
    read(f, "fixed_point", "time_extent", c.fixed_point_extent);
    read(f, "fixed_point", "time_intervals", c.fixed_point_intervals);
  }
  if (const YAML::Node t = root["tolerances"]) {
    reject_unknown(t, "tolerances", {"stability", "slope", "scaling", "transfer", "newton", "t_agreement", "growth",
                                     "fixed_point", "fixed_point_decrease", "cross_oracle"});
    suites::Tolerances& tol = c.tol;
    read(t, "tolerances", "stability", tol.stability);
    read(t, "tolerances", "slope", tol.slope);
    read(t, "tolerances", "scaling", tol.scaling);
    read(t, "tolerances", "transfer", tol.transfer);
    read(t, "tolerances", "newton", tol.newton);
    read(t, "tolerances", "t_agreement", tol.t_agreement);
    read(t, "tolerances", "growth", tol.growth);
    read(t, "tolerances", "fixed_point", tol.fixed_point);
    read(t, "tolerances", "fixed_point_decrease", tol.fixed_point_decrease);
    read(t, "tolerances", "cross_oracle", tol.cross_oracle);
  }
  for (const std::string& s : ex.suites) {
    const auto& names = suites::suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw ConfigError(at("suites", root["suites"]), "unknown suite '" + s + "'");
    }
  }
  validate_with_lines(c, root);
  return ex;
}

Experiment load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str());
}

nlohmann::json to_json(const suites::Config& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["a"] = c.a;
  j["h"] = c.h;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["potential"] = {{"delta", c.delta}, {"neumann_factor", c.neumann_factor}};
  j["potential"]["coupling"] = c.coupling ? nlohmann::json(*c.coupling) : nlohmann::json(nullptr);
  j["grid"] = {{"radial_nodes", c.radial_nodes}, {"r_min", c.r_min},           {"r_max", c.r_max},
               {"time_extent", c.time_extent},   {"time_intervals", c.time_intervals}, {"lambda_nodes", c.lambda_nodes}};
  j["fixed_point"] = {
      {"h", c.fixed_point_h}, {"time_extent", c.fixed_point_extent}, {"time_intervals", c.fixed_point_intervals}};
  const suites::Tolerances& t = c.tol;
  j["tolerances"] = {{"stability", t.stability},     {"slope", t.slope},
                     {"scaling", t.scaling},         {"transfer", t.transfer},
                     {"newton", t.newton},           {"t_agreement", t.t_agreement},
                     {"growth", t.growth},           {"fixed_point", t.fixed_point},
                     {"fixed_point_decrease", t.fixed_point_decrease}, {"cross_oracle", t.cross_oracle}};
  return j;
}

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string csv_name(const std::string& table) {
  std::string s = table;
  for (char& ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') ch = '_';
  }
  return s + ".csv";
}

}  // namespace

nlohmann::json to_json(const suites::SuiteResult& r, const suites::Config& cfg) {
  nlohmann::json j;
  j["suite"] = r.suite;
  j["pass"] = r.pass();
  j["config"] = to_json(cfg);
  j["checks"] = nlohmann::json::array();
  for (const suites::Check& c : r.checks) {
    nlohmann::json m = nlohmann::json::object();
    for (const suites::Metric& x : c.metrics) m[x.key] = number(x.value);
    j["checks"].push_back({{"id", c.id},
                           {"description", c.description},
                           {"criterion", c.criterion},
                           {"pass", c.pass},
                           {"note", c.note},
                           {"metrics", m}});
  }
  j["tables"] = nlohmann::json::array();
  for (const suites::Table& t : r.tables) {
    j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows.size()}, {"csv", csv_name(t.name)}});
  }
  return j;
}

std::string render_text(const suites::SuiteResult& r) {
  std::string out = fmt::format("suite {}: {}\n\n", r.suite, r.pass() ? "PASS" : "FAIL");
  std::size_t width = 0;
  for (const suites::Check& c : r.checks) width = std::max(width, c.id.size());
  for (const suites::Check& c : r.checks) {
    out += fmt::format("  {:<4} {:<{}}  {}\n", c.pass ? "ok" : "FAIL", c.id, width, c.note);
  }
  for (const suites::Table& t : r.tables) {
    out += fmt::format("\n[{}]\n", t.name);
    for (const std::string& col : t.columns) out += fmt::format("{:>14}", col);
    out += '\n';
    for (const auto& row : t.rows) {
      for (double v : row) out += fmt::format("{:>14.6g}", v);
      out += '\n';
    }
  }
  return out;
}

void write_artifacts(const std::filesystem::path& dir, const suites::SuiteResult& r, const suites::Config& cfg) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.json") << to_json(r, cfg).dump(2) << '\n';
  std::ofstream(dir / "tables.txt") << render_text(r);
  for (const suites::Table& t : r.tables) {
    std::ofstream csv(dir / csv_name(t.name));
    for (std::size_t i = 0; i < t.columns.size(); ++i) csv << (i ? "," : "") << t.columns[i];
    csv << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << fmt::format("{:.17g}", row[i]);
      csv << '\n';
    }
  }
}

}  // namespace wavekernel::cli
