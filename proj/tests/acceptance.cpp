// Acceptance gate: runs the suites with the pinned defaults and prints one
// PASS/FAIL line per criterion. Exit status is non-zero when a criterion
// fails, unless it is listed with --known-failure (it is still printed as FAIL).

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <iostream>
#include <map>
#include <set>

#include "wavekernel/suites.hpp"

using namespace wavekernel;

namespace {

struct Criterion {
  int id;
  std::string title;
};

const std::vector<Criterion> kCriteria{
    {1, "scaling laws of K_h and A_h exact to 1e-9 (n = 4, 5)"},
    {2, "free decay slope -(n-1)/2 +- 0.1 on [10, 200]; pointwise K_h bound stable for h in {1, 4, 16}"},
    {3, "time integrals of |t|^s |K_1| vs sigma^{s-(n-1)/2} stable on [0.1, 50]; h transfer"},
    {4, "time integrals of |A_1^{+-}| stable on [0.05, 50]; small-sigma branch stable"},
    {5, "low-frequency kernels (n = 4): log-corrected sup, eps-variant slope, uniform oscillatory bound"},
    {6, "Newtonian kernel at lambda = 0 to 1e-10; lambda^{1/2} regularity of V R_0"},
    {7, "T by Neumann series vs direct to 1e-9, ||T|| <= 1/(1-q), integrability checker"},
    {8, "fixed point <= 1e-4 and 4x under doubling; U_h bounded; contraction < 1; h-slopes"},
    {9, "filon_cc vs adaptive reference to 1e-8 on 20 randomized integrands"},
};

suites::Config config_for(int n) {
  suites::Config c;
  c.n = n;
  if (n == 5) c.delta = 4.0;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance gate"};
  std::vector<int> known;
  app.add_option("--known-failure", known, "criteria whose failure is recorded and does not set the exit status");
  CLI11_PARSE(app, argc, argv);

  struct Job {
    std::string suite;
    int n;
  };
  const std::vector<Job> jobs{{"scaling", 4},  {"scaling", 5},   {"kernel-eval", 4}, {"resolvent", 4},
                              {"free-decay", 4}, {"free-decay", 5}, {"born", 4}};
  std::map<int, std::vector<std::pair<int, suites::Check>>> by_criterion;
  for (const Job& job : jobs) {
    const auto start = std::chrono::steady_clock::now();
    suites::SuiteResult r;
    try {
      r = suites::run_suite(job.suite, config_for(job.n));
    } catch (const std::exception& e) {
      std::cerr << "suite " << job.suite << " (n = " << job.n << ") aborted: " << e.what() << '\n';
      return 3;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << fmt::format("[{} n={} {:.1f} s]\n", job.suite, job.n, secs);
    for (const suites::Check& c : r.checks) {
      if (c.criterion > 0) by_criterion[c.criterion].emplace_back(job.n, c);
    }
  }

  const std::set<int> known_set(known.begin(), known.end());
  int unexpected = 0;
  for (const Criterion& cr : kCriteria) {
    const auto& checks = by_criterion[cr.id];
    bool pass = !checks.empty();
    for (const auto& [n, c] : checks) pass = pass && c.pass;
    const bool excused = !pass && known_set.count(cr.id);
    std::cout << fmt::format("criterion {} {}{}  {}\n", cr.id, pass ? "PASS" : "FAIL", excused ? " (known)" : "",
                             cr.title);
    for (const auto& [n, c] : checks) {
      std::cout << fmt::format("    {:<4} n={} {:<44} {}\n", c.pass ? "ok" : "FAIL", n, c.id, c.note);
    }
    if (!pass && !excused) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
