#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wavekernel/verify.hpp"

using namespace wavekernel;
using namespace wavekernel::verify;

namespace {

kernels::WaveKernelSpec wave(int n, double h = 1.0) {
  kernels::WaveKernelSpec s;
  s.order = SpectralOrder::for_dimension(n);
  s.h = h;
  return s;
}

double angle(double t) { return std::sqrt(1.0 + t * t); }

}  // namespace

TEST_CASE("range points are nested across levels") {
  const Range r{0.1, 100.0, 7, true};
  const auto a = range_points(r, 1);
  const auto b = range_points(r, 2);
  REQUIRE(a.size() == 13);
  REQUIRE(b.size() == 25);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[2 * i] == doctest::Approx(a[i]).epsilon(1e-14));
  CHECK(b.front() == 0.1);
  CHECK(b.back() == 100.0);
  CHECK_THROWS_AS(range_points(Range{-1.0, 1.0, 3, true}, 0), DomainError);
}

TEST_CASE("fit_decay recovers exact power laws") {
  std::vector<double> t;
  std::vector<double> q;
  std::vector<double> ql;
  for (double x = 5.0; x <= 400.0; x *= 1.17) {
    t.push_back(x);
    q.push_back(3.0 * std::pow(x, -2.0));
    ql.push_back(0.5 * std::pow(x, -1.5) * std::log(x + 2.0));
  }
  const DecayFit f = fit_decay(t, q, 10.0, 200.0);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(f.rms < 1e-12);
  const DecayFit g = fit_decay(t, ql, 10.0, 200.0, true);
  CHECK(std::abs(g.slope + 1.5) < 1e-6);
  const DecayFit h = fit_decay([](double x) { return std::pow(x, -2.0); });
  CHECK(std::abs(h.slope + 2.0) < 1e-6);
  CHECK(h.samples == 40);

  CHECK_THROWS_AS(fit_decay(t, q, 2.0, 200.0), DomainError);
  std::vector<double> bad = q;
  bad[5] = 0.0;
  CHECK_THROWS_AS(fit_decay(t, bad, 5.0, 400.0), DomainError);
}

TEST_CASE("sup_ratio of the zero sampler is zero and refinement is enforced") {
  BoundSpec b;
  b.name = "zero";
  b.weight = [](double, double t, double) { return std::pow(angle(t), -1.5); };
  b.sigma = Range{0.1, 10.0, 5, true};
  b.t = Range{1.0, 100.0, 5, true};
  const RowSampler zero = [](double, double, const std::vector<double>& ts) { return std::vector<double>(ts.size()); };
  const BoundReport r = sup_ratio(b, zero);
  CHECK(r.constant == 0.0);
  CHECK(r.stable);
  CHECK(r.levels.size() == 3);

  b.levels = 2;
  CHECK_THROWS_AS(sup_ratio(b, zero), DomainError);
}

TEST_CASE("sup_ratio flags a quantity that outgrows its weight") {
  BoundSpec b;
  b.name = "growing";
  b.weight = [](double, double t, double) { return std::pow(t, -2.0); };
  b.sigma = Range{1.0, 1.0, 1, true};
  b.t = Range{1.0, 100.0, 5, true};
  b.extensions = 2;
  const RowSampler q = [](double, double, const std::vector<double>& ts) {
    std::vector<double> out;
    for (double t : ts) out.push_back(std::pow(t, -1.5));
    return out;
  };
  const BoundReport r = sup_ratio(b, q);
  CHECK(r.relative_change < 1e-12);
  CHECK(r.extension_change > 0.2);
  CHECK_FALSE(r.stable);
}

TEST_CASE("sup over sigma finds the light-cone peak") {
  const RowSampler q = free_kernel_sampler(wave(4));
  const double t = 120.0;
  double brute = 0.0;
  for (double s = t - 6.0; s <= t + 6.0; s += 0.02) brute = std::max(brute, q(s, 1.0, {t})[0]);
  const double found = sup_over_sigma(q, 0.1, 400.0, 60, 1.0, {t})[0];
  CHECK(found >= brute * (1.0 - 1e-4));
  CHECK(found <= brute * (1.0 + 1e-2));
}

TEST_CASE("weighted K_1 bound with s = (n-1)/2 is stable") {
  const double half = 1.5;
  BoundSpec b;
  b.name = "K1 weighted";
  b.weight = [half](double, double t, double) { return std::pow(angle(t), -half); };
  b.sigma = Range{0.1, 100.0, 7, true};
  b.t = Range{0.5, 200.0, 7, true};
  const BoundReport r = sup_ratio(b, free_kernel_sampler(wave(4)));
  CHECK(r.stable);
  CHECK(r.constant > 0.0);
}

TEST_CASE("K_2 bound off the diagonal strip is stable") {
  kernels::AppendixSpec spec;
  BoundSpec b;
  b.name = "K2 off strip";
  b.weight = [](double, double t, double) { return std::pow(std::abs(t), -1.5); };
  b.sigma = Range{1.0, 1.0, 1, true};
  b.t = Range{4.0, 200.0, 9, true};
  b.extensions = 1;
  const SigmaIntervals off = [](double t) {
    return std::vector<std::pair<double, double>>{{0.01, 0.5 * t}, {2.0 * t, 4.0 * t + 50.0}};
  };
  const BoundReport r = sup_ratio(b, interval_sup_sampler(appendix_sampler(spec, kernels::AppendixVariant::K2), off));
  CHECK(r.stable);
  CHECK(r.constant > 0.0);
}

TEST_CASE("K_2 bounds on the diagonal strip, with and without eps") {
  kernels::AppendixSpec spec;
  kernels::AppendixSpec eps = spec;
  eps.epsilon = 0.05;
  const SigmaIntervals strip = [](double t) { return std::vector<std::pair<double, double>>{{0.5 * t, 2.0 * t}}; };
  BoundSpec b;
  b.name = "K2 strip";
  b.weight = [](double, double t, double) { return std::pow(t, -1.5) * std::log(t); };
  b.sigma = Range{1.0, 1.0, 1, true};
  b.t = Range{4.0, 200.0, 9, true};
  b.extensions = 1;
  const BoundReport with_log =
      sup_ratio(b, interval_sup_sampler(appendix_sampler(spec, kernels::AppendixVariant::K2), strip));
  CHECK(with_log.stable);
  // Without the log the ratio approaches its constant like 1 - t^{-2 eps}; the
  // range must reach t = 400 before a dyadic extension moves it by < 10%.
  b.name = "K2 eps strip";
  b.weight = [](double, double t, double) { return std::pow(t, -1.5); };
  b.t = Range{4.0, 400.0, 9, true};
  const BoundReport no_log = sup_ratio(b, interval_sup_sampler(appendix_sampler(eps, kernels::AppendixVariant::K2), strip));
  CHECK(no_log.stable);
}

TEST_CASE("log-corrected bound on the low-frequency sup over sigma is stable") {
  kernels::AppendixSpec spec;
  BoundSpec b;
  b.name = "low-frequency sup";
  b.weight = [](double, double t, double) { return std::pow(angle(t), -1.5) * std::log(std::abs(t) + 2.0); };
  b.sigma = Range{1.0, 1.0, 1, true};
  b.t = Range{2.0, 200.0, 9, true};
  b.extensions = 1;
  const BoundReport r = sup_ratio(b, sup_sigma_sampler(appendix_sampler(spec, kernels::AppendixVariant::Full), 0.01, 400.0));
  CHECK(r.stable);
}

TEST_CASE("K_1 time integral with s = 0 at sample sigmas and the h transfer") {
  const auto spec = wave(4);
  double lo = 1e300;
  double hi = 0.0;
  for (double sigma : {0.2, 1.0, 5.0, 20.0}) {
    const double r = kernel_time_integral(TimeBound::FreeKernel, spec, sigma, 0.0) /
                     time_bound_weight(TimeBound::FreeKernel, spec.order, sigma, 0.0, 1.0);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi / lo < 100.0);

  const BoundReport r = time_integral_bound(TimeBound::FreeKernel, spec, Range{0.2, 20.0, 5, true}, 0.0);
  CHECK(r.stable);

  // int |t|^s |K_h(sigma, t)| dt = h^{s+1-n} int |t|^s |K_1(sigma/h, t)| dt
  const double h = 4.0;
  for (double s : {0.0, 1.5}) {
    for (double sigma : {2.0, 12.0}) {
      const double lhs = kernel_time_integral(TimeBound::FreeKernel, wave(4, h), sigma, s);
      const double rhs = std::pow(h, s + 1.0 - 4.0) * kernel_time_integral(TimeBound::FreeKernel, spec, sigma / h, s);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
  }
}

TEST_CASE("A_1 time integral: each branch is stable") {
  for (int n : {4, 5}) {
    const auto spec = wave(n);
    const BoundReport small = time_integral_bound(TimeBound::AKernel, spec, Range{0.05, 0.2, 3, true}, 0.0);
    const BoundReport large = time_integral_bound(TimeBound::AKernel, spec, Range{15.0, 60.0, 3, true}, 0.0);
    CHECK(small.stable);
    CHECK(large.stable);
    const BoundReport branch =
        time_integral_bound(TimeBound::AKernelSmallSigma, spec, Range{0.05, 0.5, 5, true}, 0.0, 3, Sign::Plus, 2, false);
    CHECK(branch.stable);
    // The sup sits at the top of the branch: the bound is not sharp as sigma -> 0.
    CHECK(branch.profile_ratio.front() < branch.profile_ratio.back());
  }
}

TEST_CASE("oscillatory integral with g(sigma lambda) decays uniformly in sigma") {
  kernels::AppendixSpec spec;
  for (double k : {1.0, 1.5, 2.0}) {
    const BoundReport r = lemma_A2_check(spec, k, Range{0.01, 100.0, 9, true}, Range{10.0, 100.0, 7, true});
    CHECK(r.stable);
    CHECK(r.constant > 0.0);
    CHECK(std::isfinite(r.constant));
  }
}

TEST_CASE("low-frequency kernel decay exponents") {
  kernels::AppendixSpec spec;
  const std::vector<double> ts = range_points(Range{10.0, 200.0, 24, true}, 0);
  const auto sup = sup_over_sigma(appendix_sampler(spec, kernels::AppendixVariant::Full), 0.01, 400.0, 60, 1.0, ts);
  const DecayFit with_log = fit_decay(ts, sup, 10.0, 200.0, true);
  MESSAGE("log-corrected slope " << with_log.slope);
  CHECK(std::abs(with_log.slope + 1.5) < 0.1);

  kernels::AppendixSpec eps = spec;
  eps.epsilon = 0.05;
  const auto sup_eps = sup_over_sigma(appendix_sampler(eps, kernels::AppendixVariant::Full), 0.01, 400.0, 60, 1.0, ts);
  const DecayFit plain = fit_decay(ts, sup_eps, 10.0, 200.0);
  MESSAGE("epsilon slope " << plain.slope);
  CHECK(std::abs(plain.slope + 1.5) < 0.1);
}
