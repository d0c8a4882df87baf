#include <doctest.h>

#include <cmath>

#include "wavekernel/cutoffs.hpp"

using namespace wavekernel;

TEST_CASE("chi1 profile") {
  CutoffFamily f;
  CHECK(f.eval(Member::Chi1, 0.5) == 0.0);
  CHECK(f.eval(Member::Chi1, 3.0) == 1.0);
  CHECK(f.eval(Member::Chi1, 1.5) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double v = f.eval(Member::Chi1, 0.8 + 1.4 * i / 400.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("partition of unity") {
  CutoffFamily unit({1.0, 0.25, 2.0});
  CHECK(unit.eval(Member::EtaA, 0.7) + unit.eval(Member::ChiA, 0.7) == doctest::Approx(1.0));
  CutoffFamily f;
  for (int i = 1; i <= 300; ++i) {
    const double s = 0.001 * i;
    CHECK(f.eval(Member::EtaA, s) + f.eval(Member::ChiA, s) == 1.0);
  }
}

TEST_CASE("derivatives match centred differences") {
  CutoffFamily f;
  const double step = 1e-5;
  struct Probe {
    Member m;
    double s;
  };
  const Probe probes[] = {{Member::Chi1, 1.3},      {Member::Chi1, 1.8},     {Member::ChiA, 0.15},
                          {Member::EtaA, 0.2},      {Member::Phi, 1.4},      {Member::Phi, -1.6},
                          {Member::Psi, 0.4},       {Member::Psi, 1.3},      {Member::Psi1, 0.2},
                          {Member::Psi1, 3.0},      {Member::Phi1, 0.6},     {Member::Phi1, 1.2},
                          {Member::Phi1Tilde, 0.4}, {Member::Phi1Tilde, 2.0}, {Member::PsiTilde, 0.35},
                          {Member::Psi1Tilde, 0.2}};
  for (const Probe& p : probes) {
    const double fp = f.eval(p.m, p.s + step);
    const double fm = f.eval(p.m, p.s - step);
    const double f0 = f.eval(p.m, p.s);
    const double d1 = (fp - fm) / (2 * step);
    const double d2 = (fp - 2 * f0 + fm) / (step * step);
    INFO(member_name(p.m), " at ", p.s);
    CHECK(f.eval(p.m, p.s, 1) == doctest::Approx(d1).epsilon(1e-6));
    // Second differences lose about eight digits to rounding.
    CHECK(f.eval(p.m, p.s, 2) == doctest::Approx(d2).epsilon(1e-4));
  }
  CHECK_THROWS_AS(f.eval(Member::Psi, 1.0, 3), DomainError);
}

TEST_CASE("members vanish with derivatives at their support edges") {
  CutoffFamily f;
  for (Member m : {Member::Psi, Member::Psi1, Member::Phi1, Member::Phi1Tilde, Member::PsiTilde,
                   Member::Psi1Tilde}) {
    const auto [lo, hi] = f.support(m);
    for (double s : {lo - 1e-6, lo + 1e-6, hi - 1e-6, hi + 1e-6}) {
      for (int d = 0; d <= 2; ++d) CHECK(std::abs(f.eval(m, s, d)) < 1e-12);
    }
  }
  const auto [elo, ehi] = f.support(Member::EtaA);
  for (int d = 0; d <= 2; ++d) CHECK(std::abs(f.eval(Member::EtaA, ehi - 1e-6, d)) < 1e-12);
}

TEST_CASE("nested plateaus") {
  CutoffFamily f;
  for (int i = 0; i <= 200; ++i) {
    const double s = 0.25 + 1.75 * i / 200.0;
    CHECK(f.eval(Member::Psi1, s) == 1.0);
    if (f.eval(Member::Psi, s) != 0.0) {
      CHECK(f.eval(Member::Psi1Tilde, s) * f.eval(Member::PsiTilde, s) ==
            doctest::Approx(f.eval(Member::Psi, s)).epsilon(1e-12));
    }
    const double lam = 0.5 + (std::sqrt(2.0) - 0.5) * i / 200.0;
    CHECK(f.eval(Member::Phi1Tilde, lam) == 1.0);
    CHECK(f.eval(Member::Phi1, lam) == doctest::Approx(lam * f.eval(Member::Psi, lam * lam)));
  }
  CHECK(f.eval(Member::Phi, 0.9) == 1.0);
  CHECK(f.eval(Member::Phi, -2.1) == 0.0);
}

TEST_CASE("member names") {
  CHECK(parse_member("phi1_tilde") == Member::Phi1Tilde);
  CHECK(member_name(Member::EtaA) == "eta_a");
  CHECK_THROWS_AS(parse_member("omega"), DomainError);
  CHECK(all_members().size() == 10);
}

TEST_CASE("dyadic identity") {
  CutoffFamily unit({1.0, 0.25, 2.0});
  auto r = unit.dyadic_identity_check(1.0, 4, {0.5});
  CHECK(r.converged);
  CHECK(r.max_defect <= 1e-8);
  r = unit.dyadic_identity_check(1.0, 4, {2.5});
  CHECK(r.max_defect == 0.0);
  CutoffFamily quarter({0.25, 0.25, 2.0});
  r = quarter.dyadic_identity_check(0.5, 4, {0.3});
  CHECK(r.max_defect <= 1e-8);
  std::vector<double> grid;
  for (int i = 1; i <= 50; ++i) grid.push_back(0.005 * i);
  CutoffFamily def;
  for (int n : {4, 5}) {
    r = def.dyadic_identity_check(0.75, n, grid);
    CHECK(r.converged);
    CHECK(r.max_defect <= 1e-8);
  }
  CHECK_THROWS_AS(def.dyadic_identity_check(1.5, 4, grid), DomainError);
}

TEST_CASE("L1 norm of the Fourier transform of phi_h is h-independent") {
  CutoffFamily f;
  const FourierL1 one = f.fourier_transform_l1(1.0);
  CHECK(one.value > 0.0);
  CHECK(std::isfinite(one.value));
  for (double h : {4.0, 10.0}) {
    CHECK(f.fourier_transform_l1(h).value == doctest::Approx(one.value).epsilon(1e-6));
  }
  CHECK_THROWS_AS(f.fourier_transform_l1(0.0), DomainError);
}
