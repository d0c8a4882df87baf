// wavekernel <subcommand> --config <path> [--out <dir>] [--threads N] [--n 4|5] [--h ...]
//
// Exit status: 0 all checks pass, 1 a check failed, 2 configuration error,
// 3 numerical failure.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "config_io.hpp"
#include "wavekernel/common.hpp"

namespace fs = std::filesystem;
using namespace wavekernel;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheck = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int run_suites(const std::vector<std::string>& names, const suites::Config& cfg, const fs::path& out) {
  bool all_pass = true;
  for (const std::string& name : names) {
    std::cout << "running " << name << " (n = " << cfg.n << ")" << std::endl;
    const suites::SuiteResult r = suites::run_suite(name, cfg);
    cli::write_artifacts(out / name, r, cfg);
    for (const suites::Check& c : r.checks) {
      std::cout << fmt::format("  {:<4} {}  {}\n", c.pass ? "ok" : "FAIL", c.id, c.note);
    }
    all_pass = all_pass && r.pass();
  }
  return all_pass ? kExitPass : kExitCheck;
}

int report(const fs::path& out, const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const std::string& s : inputs) files.emplace_back(s);
  if (files.empty() && fs::is_directory(out)) {
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
      if (entry.path().filename() == "report.json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) throw suites::ConfigError("--out", "no report.json found under " + out.string());
  bool all_pass = true;
  std::string text = fmt::format("{:<12} {:<4} {:<3} {:<46} {}\n", "suite", "ok", "n", "check", "note");
  nlohmann::json summary = nlohmann::json::array();
  for (const fs::path& f : files) {
    std::ifstream in(f);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw suites::ConfigError(f.string(), e.what());
    }
    const int n = j["config"]["n"].get<int>();
    for (const auto& c : j["checks"]) {
      const bool pass = c["pass"].get<bool>();
      all_pass = all_pass && pass;
      text += fmt::format("{:<12} {:<4} {:<3} {:<46} {}\n", j["suite"].get<std::string>(), pass ? "ok" : "FAIL", n,
                          c["id"].get<std::string>(), c["note"].get<std::string>());
      summary.push_back({{"suite", j["suite"]}, {"n", n}, {"id", c["id"]}, {"criterion", c["criterion"]},
                         {"pass", pass}, {"source", f.string()}});
    }
  }
  fs::create_directories(out);
  std::ofstream(out / "summary.txt") << text;
  std::ofstream(out / "summary.json") << nlohmann::json{{"pass", all_pass}, {"checks", summary}}.dump(2) << '\n';
  std::cout << text;
  return all_pass ? kExitPass : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-frequency wave kernel verification suites"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  int n = 0;
  std::vector<double> hs;
  std::vector<std::string> inputs;

  const auto add_common = [&](CLI::App* sub, bool need_config) {
    sub->set_help_flag("--help", "print this help and exit");  // frees -h for --h
    auto* opt = sub->add_option("--config", config_path, "YAML experiment file");
    if (need_config) opt->required();
    sub->add_option("--out", out_dir, "output directory (default: config 'output' or ./wavekernel-out)");
    sub->add_option("--threads", threads, "cap on parallel width")->check(CLI::PositiveNumber);
    sub->add_option("--n", n, "dimension, overrides the config")->check(CLI::IsMember({4, 5}));
    sub->add_option("--h", hs, "h values, overrides the config")->delimiter(',');
  };
  std::vector<std::pair<std::string, CLI::App*>> subs;
  const std::vector<std::pair<std::string, std::string>> descriptions{
      {"kernel-eval", "dump K_h / A_h grids and cross-check the oscillatory quadrature"},
      {"free-decay", "free-kernel decay and time-integral bounds, low-frequency kernels"},
      {"resolvent", "resolvent at zero, lambda^{1/2} regularity, T solve, integrability checker"},
      {"born", "lambda sweep, U_h, fixed-point residual and h-sweeps"},
      {"scaling", "exact scaling identities of K_h and A_h"},
      {"all", "every suite listed under 'suites' in the config (default: all)"}};
  for (const auto& [name, desc] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, desc);
    add_common(sub, true);
    subs.emplace_back(name, sub);
  }
  CLI::App* rep = app.add_subcommand("report", "aggregate report.json files into a summary table");
  rep->add_option("--out", out_dir, "directory searched for report.json files and receiving the summary");
  rep->add_option("--config", config_path, "unused; accepted for symmetry");
  rep->add_option("inputs", inputs, "explicit report.json files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (rep->parsed()) return report(out_dir.empty() ? fs::path("wavekernel-out") : fs::path(out_dir), inputs);

    cli::Experiment ex = cli::load_experiment(config_path);
    suites::Config& cfg = ex.config;
    if (n != 0) cfg.n = n;
    if (!hs.empty()) cfg.h = hs;
    if (threads != 0) cfg.threads = threads;
    suites::validate(cfg);
    const fs::path out = !out_dir.empty() ? fs::path(out_dir) : fs::path(ex.output.value_or("wavekernel-out"));

    std::vector<std::string> names;
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      if (name == "all") {
        names = ex.suites.empty() ? suites::suite_names() : ex.suites;
      } else {
        names = {name};
      }
    }
    return run_suites(names, cfg, out);
  } catch (const suites::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
