#pragma once

// Named verification suites, shared by the command-line driver and the
// acceptance binary. Each suite returns checks (pass/fail with metrics) and
// plot-ready tables; nothing is printed here.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavekernel/verify.hpp"

namespace wavekernel::suites {

struct Tolerances {
  double stability = verify::kStabilityTolerance;
  double slope = 0.1;
  double scaling = 1e-9;
  double transfer = 1e-6;         // h transfer of time integrals (time_integral rel_tol is 1e-7)
  double newton = 1e-10;
  double t_agreement = 1e-9;      // Neumann series vs direct solve
  double growth = 0.05;           // relative distance of the integrability growth ratio from sqrt 2
  double fixed_point = 1e-4;
  double fixed_point_decrease = 4.0;
  double cross_oracle = 1e-8;
};

struct Config {
  int n = 4;
  double delta = 3.0;
  double neumann_factor = 0.5;
  std::optional<double> coupling;  // overrides neumann_factor when set
  double a = 0.125;
  std::vector<double> h{4.0, 8.0, 16.0, 32.0};
  int radial_nodes = 240;
  double r_min = 1e-3;
  double r_max = 64.0;
  double time_extent = 160.0;  // T_max / h for the free and perturbed time integrals
  int time_intervals = 2048;
  int lambda_nodes = 0;        // 0: default rule
  double fixed_point_h = 16.0;
  double fixed_point_extent = 40.0;
  int fixed_point_intervals = 2048;
  unsigned seed = 20240;
  int threads = 1;
  Tolerances tol;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Throws ConfigError naming the first invalid field.
void validate(const Config& cfg);

struct Metric {
  std::string key;
  double value = 0.0;
};

struct Check {
  std::string id;
  std::string description;
  int criterion = 0;  // acceptance criterion this check belongs to, 0 for none
  bool pass = false;
  std::vector<Metric> metrics;
  std::string note;
  double metric(const std::string& key) const;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  std::vector<Table> tables;
  bool pass() const;
};

SuiteResult run_kernel_eval(const Config& cfg);
SuiteResult run_scaling(const Config& cfg);
SuiteResult run_free_decay(const Config& cfg);
SuiteResult run_resolvent(const Config& cfg);
SuiteResult run_born(const Config& cfg);

const std::vector<std::string>& suite_names();
/// Dispatch by subcommand name (everything except "report").
SuiteResult run_suite(const std::string& name, const Config& cfg);

}  // namespace wavekernel::suites
