#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wavekernel/duhamel.hpp"
#include "wavekernel/quadrature.hpp"
#include "wavekernel/specfun.hpp"

using namespace wavekernel;
using namespace wavekernel::duhamel;

namespace {

struct Setup {
  GridPtr grid;
  RadialPotential v;
  potentials::TSolve t;
};

Setup small_setup(double q, int n = 4, double delta = 3.0) {
  auto grid = RadialGrid::geometric(n, 1e-3, 32.0, 120);
  const double c = potentials::coupling_for_neumann_factor(q, delta, grid);
  RadialPotential v{n, c, delta};
  return {grid, v, potentials::solve_t(potentials::assemble_v_delta_inv(v, grid))};
}

DuhamelSpec spec_at(double h, int n = 4) {
  DuhamelSpec s;
  s.wave.h = h;
  s.wave.order = SpectralOrder::for_dimension(n);
  return s;
}

double max_entry(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("perturbation norm is O(lambda^{1/2})") {
  auto grid = RadialGrid::geometric(4);
  RadialPotential v{4, 1.0, 3.0};
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    std::vector<double> ratios;
    for (double lambda : {0.1, 0.025, 0.00625}) {
      ratios.push_back(lambda_perturbation_norm(v, grid, lambda, s) / std::sqrt(lambda));
    }
    // On a finite grid the norm falls faster than the upper rate; the ratio must not grow.
    MESSAGE("norm / lambda^{1/2}: " << ratios[0] << " " << ratios[1] << " " << ratios[2]);
    CHECK(ratios[0] > 0.0);
    CHECK(ratios[1] <= ratios[0]);
    CHECK(ratios[2] <= ratios[1]);
    for (double lambda : {1.0, 0.3, 0.1, 0.01, 0.001}) CHECK(resolvent_norm(v, grid, lambda, s) < 10.0);
  }
  CHECK(lambda_perturbation_norm(RadialPotential{4, 0.0, 3.0}, grid, 0.1, Sign::Plus) == 0.0);
  CHECK_THROWS_AS(lambda_perturbation_norm(v, grid, 1.5, Sign::Plus), DomainError);
  CHECK_THROWS_AS(lambda_perturbation_norm(v, grid, 0.0, Sign::Plus), DomainError);
}

TEST_CASE("resolvent at zero energy is minus V Delta^{-1}") {
  auto grid = RadialGrid::geometric(5, 1e-3, 32.0, 80);
  RadialPotential v{5, 0.7, 4.0};
  const ComplexMatrix r0 = resolvent_operator(v, grid, 0.0, Sign::Minus).matrix();
  const Eigen::MatrixXd vd = potentials::assemble_v_delta_inv(v, grid).matrix();
  CHECK(max_entry(r0 + vd.cast<Complex>()) <= 1e-12 * vd.cwiseAbs().maxCoeff());
}

TEST_CASE("lambda sweep") {
  const Setup s = small_setup(0.5);
  const double h = 8.0;
  const LambdaSweep sweep = build_lambda_sweep(s.v, s.t.t, spec_at(h), Sign::Plus);
  CHECK(sweep.max_residual() <= 1e-10);
  CHECK(sweep.interpolation_error() <= 1e-8);
  CHECK(sweep.lambdas().size() >= 33);
  CHECK(sweep.lo() == doctest::Approx(0.5 / h));
  CHECK(sweep.hi() == doctest::Approx(std::sqrt(2.0) / h));

  // Interpolant reproduces node values.
  const double mid = sweep.lambdas()[sweep.lambdas().size() / 2];
  const NodeInverse node = invert_at(s.v, s.t.t, mid, Sign::Plus);
  CHECK(max_entry(sweep.interpolate(mid) - node.m) <= 1e-10 * max_entry(node.m));

  // T - M = T D M
  const ComplexMatrix tc = s.t.t.matrix().cast<Complex>();
  const ComplexMatrix d = perturbation_operator(s.v, s.grid, mid, Sign::Plus).matrix();
  CHECK(max_entry(tc - node.m - tc * d * node.m) <= 1e-9 * max_entry(tc));

  // First-order Neumann bound at the smallest node.
  const double lmin = sweep.lambdas().front();
  const NodeInverse first = invert_at(s.v, s.t.t, lmin, Sign::Plus);
  const double pert = lambda_perturbation_norm(s.v, s.grid, lmin, Sign::Plus);
  const double tn = s.t.t.l1_norm();
  CHECK(first.q < 1.0);
  const ComplexRadialOperator diff(s.grid, first.m - tc);
  CHECK(diff.l1_norm() <= tn * tn * pert / (1.0 - first.q));

  // M(lambda) -> T no slower than lambda^{1/2}
  double prev = INFINITY;
  for (double lambda : {0.1, 0.025, 0.00625}) {
    const NodeInverse m = invert_at(s.v, s.t.t, lambda, Sign::Minus);
    const double ratio = ComplexRadialOperator(s.grid, m.m - tc).l1_norm() / std::sqrt(lambda);
    CHECK(ratio > 0.0);
    CHECK(ratio <= prev);
    prev = ratio;
  }

  CHECK_THROWS_AS(sweep.interpolate(2.0 / h), DomainError);
}

TEST_CASE("zero potential gives the cutoff transform") {
  auto grid = RadialGrid::geometric(4, 1e-3, 32.0, 60);
  RadialPotential zero{4, 0.0, 3.0};
  const RadialOperator t = RadialOperator::identity(grid);
  const DuhamelSpec spec = spec_at(4.0);
  const LambdaSweep sweep = build_lambda_sweep(zero, t, spec, Sign::Minus);
  for (std::size_t k = 0; k < sweep.lambdas().size(); ++k) CHECK(sweep.contraction()[k] == 0.0);
  const auto slice = kernels::cutoff_transform_slice(spec.wave, false);
  const auto id = ComplexMatrix::Identity(grid->size(), grid->size());
  for (double time : {0.0, 3.0, -10.0, 40.0}) {
    const Complex phi = slice(time).value;
    CHECK(max_entry(U_h_pm(sweep, time).matrix() - phi * id) <= 1e-12);
  }
  const TimeGrid tg = TimeGrid::make(4.0, spec.wave.cutoffs, 40.0, 512);
  const auto inputs = std::vector<Eigen::VectorXd>{radial_bump(*grid, 1.0)};
  const FixedPointReport rep = fixed_point_residual(zero, t, sweep, tg, inputs, {0, 1, -3});
  CHECK(rep.residual <= 1e-12);
}

TEST_CASE("U operator: filon sampling, FFT sampling and conjugation") {
  const Setup s = small_setup(0.5);
  const DuhamelSpec spec = spec_at(8.0);
  const LambdaSweep plus = build_lambda_sweep(s.v, s.t.t, spec, Sign::Plus);
  const LambdaSweep minus = build_lambda_sweep(s.v, s.t.t, spec, Sign::Minus);
  const TimeGrid tg = TimeGrid::make(8.0, spec.wave.cutoffs, 40.0, 1024);
  const Eigen::VectorXd f = radial_bump(*s.grid, 1.0);
  const ComplexMatrix cols = apply_U(plus, tg, f);
  for (double time : {0.0, 8.0, -40.0, 100.0}) {
    const std::size_t j = tg.nearest(time);
    const ComplexMatrix u = U_h_pm(plus, tg.t(j)).matrix();
    const Eigen::VectorXcd direct = u * f.cast<Complex>();
    CHECK((cols.col(static_cast<Eigen::Index>(j)) - direct).cwiseAbs().maxCoeff() <=
          1e-9 * cols.cwiseAbs().maxCoeff());
    const ComplexMatrix um = U_h_pm(minus, -tg.t(j)).matrix();
    CHECK(max_entry(u - um.conjugate()) <= 1e-10 * max_entry(u));
  }
}

TEST_CASE("time lattice") {
  const CutoffFamily c;
  const TimeGrid g = TimeGrid::make(4.0, c, 40.0, 2048);
  CHECK(g.size() == 2049);
  CHECK(g.extent() == doctest::Approx(160.0));
  CHECK(g.t(g.half()) == 0.0);
  CHECK(g.t(0) == doctest::Approx(-160.0));
  CHECK(g.nearest(1e9) == g.size() - 1);
  CHECK(g.nearest(0.01) == g.half());
  double sum = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) sum += g.weight(j);
  CHECK(sum == doctest::Approx(320.0));
  CHECK_THROWS_AS(TimeGrid::make(4.0, c, 400.0, 64), DomainError);
  CHECK_THROWS_AS(TimeGrid::make(4.0, c, 40.0, 1023), DomainError);
}

TEST_CASE("fixed point of the Duhamel identity") {
  const Setup s = small_setup(0.5);
  const double h = 16.0;
  const std::vector<Eigen::VectorXd> inputs{radial_bump(*s.grid, 1.0), radial_delta(*s.grid, 60)};
  const std::vector<double> times{0, 1, -5, 20};

  DuhamelSpec coarse = spec_at(h);
  coarse.lambda_nodes = 33;
  const LambdaSweep sweep = build_lambda_sweep(s.v, s.t.t, coarse, Sign::Plus);
  const FixedPointReport r1 =
      fixed_point_residual(s.v, s.t.t, sweep, TimeGrid::make(h, coarse.wave.cutoffs, 40.0, 2048), inputs, times, 33);

  DuhamelSpec fine = coarse;
  fine.lambda_nodes = 66;
  const LambdaSweep sweep2 = build_lambda_sweep(s.v, s.t.t, fine, Sign::Plus);
  const FixedPointReport r2 =
      fixed_point_residual(s.v, s.t.t, sweep2, TimeGrid::make(h, fine.wave.cutoffs, 80.0, 4096), inputs, times, 66);
  MESSAGE("fixed-point residual " << r1.residual << " -> " << r2.residual);
  CHECK(r1.residual <= 1e-4);
  CHECK(r2.residual * 4.0 <= r1.residual);
  CHECK(r1.times.size() == times.size());
}

TEST_CASE("A-kernel time integral table") {
  const CutoffFamily c;
  for (int n : {4, 5}) {
    const SpectralOrder order = SpectralOrder::for_dimension(n);
    const AKernelL1 table(order, c);
    kernels::WaveKernelSpec spec;
    spec.order = order;
    for (double sigma : {0.037, 0.5, 3.3, 71.0}) {
      const double direct = kernels::time_integral(kernels::a_kernel_slice(spec, sigma, Sign::Minus), 0.0).value;
      CHECK(table(sigma) == doctest::Approx(direct).epsilon(2e-4));
    }
    // h-transfer: int |A_h(sigma, t)| dt = h^{2-n} L(sigma / h)
    spec.h = 4.0;
    const double direct = kernels::time_integral(kernels::a_kernel_slice(spec, 2.0, Sign::Plus), 0.0).value;
    CHECK(table.scaled(2.0, 4.0) == doctest::Approx(direct).epsilon(2e-4));
    // power continuation outside the table is continuous
    CHECK(table(0.02 * (1 - 1e-9)) == doctest::Approx(table(0.02 * (1 + 1e-9))).epsilon(1e-6));
    CHECK(table(1e-3) / table(2e-3) == doctest::Approx(std::pow(2.0, n - 2.5)));
  }
}

TEST_CASE("free estimate against nested quadrature") {
  const int n = 4;
  const SpectralOrder order = SpectralOrder::for_dimension(n);
  const double area = order.sphere_area();
  auto grid = RadialGrid::geometric(n);
  RadialPotential v{n, 1.0, 3.0};
  kernels::WaveKernelSpec spec;
  spec.h = 1.0;
  const CutoffFamily& c = spec.cutoffs;
  const TimeGrid tg = TimeGrid::make(1.0, c, 160.0, 2048);
  const FreeEstimate est = estimate_2_10(v, grid, spec, radial_bump(*grid, 1.0), tg);

  // Continuum bump, its transform, and the evolution at each radius by
  // Gauss-Legendre in lambda; radial and time integrals by fixed rules.
  auto bump = [](double r) {
    const double x = (r - 1.0) / 0.25;
    return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
  };
  const double fnorm = area * quad::adaptive([&](double r) { return r * r * r * bump(r); }, 0.75, 1.25);
  oscint::Amplitude fa;
  fa.lo = 0.5;
  fa.hi = std::sqrt(2.0);
  fa.g = [&](double l) {
    return Complex(area *
                   quad::adaptive([&](double r) { return r * r * r * bump(r) * specfun::jnu_over_power(order, l * r); },
                                  0.75, 1.25) /
                   fnorm);
  };
  const oscint::PiecewiseChebyshev big_f = oscint::fit(fa);
  const double pref = std::pow(2.0 * kPi, -(order.nu() + 1.0)) * specfun::jnu_normalization(order);
  const double dt = 0.05;
  const std::size_t count = 6401;
  auto profile = [&](double r) {
    oscint::Amplitude a = fa;
    a.g = [&](double l) {
      return pref * l * l * l * c.eval(Member::Psi, l * l) * specfun::jnu_over_power(order, l * r) *
             big_f.evaluate(l);
    };
    const std::vector<Complex> u = oscint::sample_uniform(oscint::fit(a), -160.0, dt, count);
    double s = 0.0;
    for (std::size_t j = 0; j < count; ++j) s += (j == 0 || j + 1 == count ? 0.5 : 1.0) * dt * std::abs(u[j]);
    return s;
  };
  const std::vector<double> pieces{0.0, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  const quad::Rule& rule = quad::gauss_legendre(16);
  double oracle = 0.0;
  for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
    const double mid = 0.5 * (pieces[p] + pieces[p + 1]);
    const double half = 0.5 * (pieces[p + 1] - pieces[p]);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double r = mid + half * rule.nodes[k];
      oracle += half * rule.weights[k] * area * r * r * r * std::abs(v(r)) * profile(r);
    }
  }
  MESSAGE("grid " << est.main << " oracle " << oracle);
  CHECK(est.main == doctest::Approx(oracle).epsilon(0.01));
  CHECK(est.time_tail < 0.01 * est.main);

  CHECK(estimate_2_10(RadialPotential{n, 0.0, 3.0}, grid, spec, radial_bump(*grid, 1.0), tg).value == 0.0);
}

TEST_CASE("free estimate decays like h^{-(n-1)/2}") {
  auto grid = RadialGrid::geometric(4);
  RadialPotential v{4, 1.0, 3.0};
  const Eigen::VectorXd f = radial_bump(*grid, 1.0);
  double prev = INFINITY;
  for (double h : {1.0, 4.0, 16.0}) {
    kernels::WaveKernelSpec spec;
    spec.h = h;
    const FreeEstimate e = estimate_2_10(v, grid, spec, f, TimeGrid::make(h, spec.cutoffs, 160.0, 2048));
    const double scaled = e.value * std::pow(h, 1.5);
    MESSAGE("h = " << h << " value h^{3/2} = " << scaled);
    CHECK(std::isfinite(scaled));
    CHECK(scaled <= prev);
    prev = scaled;
  }
  // Borderline decay makes the spatial tail diverge.
  kernels::WaveKernelSpec spec5;
  spec5.order = SpectralOrder::for_dimension(5);
  auto grid5 = RadialGrid::geometric(5, 1e-3, 32.0, 80);
  const FreeEstimate e5 = estimate_2_10(RadialPotential{5, 1.0, 3.0}, grid5, spec5, radial_bump(*grid5, 1.0),
                                        TimeGrid::make(1.0, spec5.cutoffs, 160.0, 1024));
  CHECK(std::isinf(e5.spatial_tail));
}

TEST_CASE("perturbed estimate") {
  const DuhamelSpec spec = spec_at(8.0);
  const TimeGrid tg = TimeGrid::make(8.0, spec.wave.cutoffs, 160.0, 2048);
  const AKernelL1 table(SpectralOrder::for_dimension(4), spec.wave.cutoffs);

  // Weak coupling: the perturbed quantity agrees with the free one to first order.
  {
    const Setup s = small_setup(0.01);
    const Eigen::VectorXd f = radial_bump(*s.grid, 1.0);
    const LambdaSweep p = build_lambda_sweep(s.v, s.t.t, spec, Sign::Plus);
    const LambdaSweep m = build_lambda_sweep(s.v, s.t.t, spec, Sign::Minus);
    const PerturbedEstimate e = estimate_2_11(s.v, s.t.t, p, m, tg, f, table);
    const FreeEstimate free = estimate_2_10(s.v, s.grid, spec.wave, f, tg);
    MESSAGE("weak coupling " << e.value << " vs free " << free.main + free.time_tail);
    CHECK(e.value == doctest::Approx(free.main + free.time_tail).epsilon(0.03));
  }

  const Setup s = small_setup(0.5);
  const Eigen::VectorXd f = radial_bump(*s.grid, 2.0);
  const LambdaSweep p = build_lambda_sweep(s.v, s.t.t, spec, Sign::Plus);
  const LambdaSweep m = build_lambda_sweep(s.v, s.t.t, spec, Sign::Minus);
  const PerturbedEstimate e = estimate_2_11(s.v, s.t.t, p, m, tg, f, table);
  CHECK(e.value > 0.0);
  CHECK(e.value - e.time_tail <= e.middle_bound);
  CHECK(e.u_l1[0] == doctest::Approx(e.u_l1[1]).epsilon(1e-8));
  CHECK(e.contraction == doctest::Approx(e.t_norm * e.q_a / (2.0 * kPi)));
  CHECK(e.contraction < 1.0);
  CHECK_THROWS_AS(estimate_2_11(s.v, s.t.t, m, p, tg, f, table), DomainError);
}
