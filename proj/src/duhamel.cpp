#include "wavekernel/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavekernel/quadrature.hpp"
#include "wavekernel/specfun.hpp"

namespace wavekernel::duhamel {
namespace {

using Matrix = Eigen::MatrixXd;

template <class Derived>
double l1_operator_norm(const RadialGrid& grid, const Eigen::MatrixBase<Derived>& m) {
  const auto& w = grid.weights();
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::abs(m(i, j)) * w[i];
    best = std::max(best, s / w[j]);
  }
  return best;
}

template <class Vec>
double grid_l1(const RadialGrid& grid, const Vec& f) {
  const auto& w = grid.weights();
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += w[i] * std::abs(f[i]);
  return s;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !(lambda <= 1.0)) throw DomainError("lambda must lie in (0, 1]");
}

// x in [-1, 1] -> T_k(x); zero outside so a vanishing cutoff stays zero.
double cheb_t(int k, double x) {
  if (x > 1.0 || x < -1.0) return 0.0;
  return std::cos(k * std::acos(x));
}

struct ChebFit {
  double lo;
  double hi;
  std::vector<ComplexMatrix> coeffs;
};

// Nodes x_m = cos(pi (m + 1/2) / K) mapped to [lo, hi], m = 0..K-1.
double cheb_lambda(double lo, double hi, int count, int m) {
  const double x = std::cos(kPi * (m + 0.5) / count);
  return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
}

ChebFit fit_matrices(double lo, double hi, const std::vector<ComplexMatrix>& values) {
  const int count = static_cast<int>(values.size());
  ChebFit out{lo, hi, {}};
  out.coeffs.assign(count, ComplexMatrix::Zero(values[0].rows(), values[0].cols()));
  for (int k = 0; k < count; ++k) {
    for (int m = 0; m < count; ++m) {
      out.coeffs[k] += std::cos(kPi * k * (m + 0.5) / count) * values[m];
    }
    out.coeffs[k] *= (k == 0 ? 1.0 : 2.0) / count;
  }
  return out;
}

double to_x(double lo, double hi, double lambda) { return (2.0 * lambda - lo - hi) / (hi - lo); }

ComplexMatrix evaluate_fit(const std::vector<ComplexMatrix>& coeffs, double x) {
  ComplexMatrix out = ComplexMatrix::Zero(coeffs[0].rows(), coeffs[0].cols());
  for (std::size_t k = 0; k < coeffs.size(); ++k) out += cheb_t(static_cast<int>(k), x) * coeffs[k];
  return out;
}

// Rows k of the result: int e^{i t_j lambda} c(lambda) T_k(x(lambda)) d lambda on
// the lattice t_j = t0 + j dt, j < count, for the cutoff c on [lo, hi].
ComplexMatrix basis_transforms(const std::function<double(double)>& cutoff, double lo, double hi, int kcount,
                               double t0, double dt, std::size_t count, double window) {
  const oscint::FftGrid g = oscint::make_fft_grid(lo, hi, t0, dt, count, window);
  ComplexMatrix out(kcount, static_cast<Eigen::Index>(count));
  std::vector<double> c(g.m_count);
  std::vector<double> x(g.m_count);
  for (std::size_t m = 0; m < g.m_count; ++m) {
    const double l = g.lambda(m);
    c[m] = l <= hi ? cutoff(l) : 0.0;
    x[m] = std::clamp(to_x(lo, hi, l), -1.0, 1.0);
  }
  std::vector<Complex> samples(g.m_count);
  for (int k = 0; k < kcount; ++k) {
    for (std::size_t m = 0; m < g.m_count; ++m) samples[m] = c[m] == 0.0 ? 0.0 : c[m] * cheb_t(k, x[m]);
    const std::vector<Complex> row = oscint::fft_transform(g, samples);
    for (std::size_t j = 0; j < count; ++j) out(k, static_cast<Eigen::Index>(j)) = row[j];
  }
  return out;
}

}  // namespace

ComplexRadialOperator perturbation_operator(const RadialPotential& v, GridPtr grid, double lambda, Sign sign) {
  if (v.n != grid->dimension()) throw DomainError("potential and grid dimensions differ");
  const SpectralOrder order = SpectralOrder::for_dimension(v.n);
  return potentials::assemble<Complex>(std::move(grid), [&](double r, double rho) {
    return v(r) * kernels::averaged_resolvent_difference(order, lambda, r, rho, sign);
  });
}

ComplexRadialOperator resolvent_operator(const RadialPotential& v, GridPtr grid, double lambda, Sign sign) {
  if (v.n != grid->dimension()) throw DomainError("potential and grid dimensions differ");
  const SpectralOrder order = SpectralOrder::for_dimension(v.n);
  return potentials::assemble<Complex>(std::move(grid), [&](double r, double rho) {
    return v(r) * kernels::averaged_resolvent(order, lambda, r, rho, sign);
  });
}

double lambda_perturbation_norm(const RadialPotential& v, GridPtr grid, double lambda, Sign sign) {
  check_lambda(lambda);
  return perturbation_operator(v, std::move(grid), lambda, sign).l1_norm();
}

double resolvent_norm(const RadialPotential& v, GridPtr grid, double lambda, Sign sign) {
  check_lambda(lambda);
  return resolvent_operator(v, std::move(grid), lambda, sign).l1_norm();
}

NodeInverse invert_at(const RadialPotential& v, const RadialOperator& t, double lambda, Sign sign) {
  const GridPtr& grid = t.grid();
  const auto size = static_cast<Eigen::Index>(grid->size());
  const ComplexMatrix d = perturbation_operator(v, grid, lambda, sign).matrix();
  const Matrix t_inv = Matrix::Identity(size, size) - potentials::assemble_v_delta_inv(v, grid).matrix();
  const ComplexMatrix a = t_inv.cast<Complex>() + d;

  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw NumericalError("1 + (V R0(lambda) - V R0(0)) T is singular at lambda = " + std::to_string(lambda), rcond);
  }
  NodeInverse out;
  out.lambda = lambda;
  out.m = lu.solve(ComplexMatrix::Identity(size, size));
  out.residual = l1_operator_norm(*grid, (a * out.m - ComplexMatrix::Identity(size, size)).eval());
  out.q = l1_operator_norm(*grid, (d * t.matrix().cast<Complex>()).eval());
  return out;
}

std::vector<double> chebyshev_nodes(double lo, double hi, int count) {
  if (count < 1) throw DomainError("chebyshev_nodes: count must be positive");
  std::vector<double> out(count);
  for (int m = 0; m < count; ++m) out[count - 1 - m] = cheb_lambda(lo, hi, count, m);
  return out;
}

int default_lambda_nodes(double width, double r_max) {
  // M(lambda) carries phases up to e^{2 i lambda r_max}.
  return std::max(33, static_cast<int>(std::ceil(0.6 * 2.0 * r_max * width)) + 20);
}

double LambdaSweep::max_residual() const {
  return residuals_.empty() ? 0.0 : *std::max_element(residuals_.begin(), residuals_.end());
}

double LambdaSweep::max_contraction() const { return q_.empty() ? 0.0 : *std::max_element(q_.begin(), q_.end()); }

ComplexMatrix LambdaSweep::interpolate(double lambda) const {
  if (lambda < lo_ || lambda > hi_) throw DomainError("LambdaSweep::interpolate: lambda outside the sweep");
  return evaluate_fit(coeffs_, to_x(lo_, hi_, lambda));
}

double LambdaSweep::cutoff(double lambda) const { return wave_.cutoffs.eval(Member::Phi1, h_ * lambda); }

LambdaSweep build_lambda_sweep(const RadialPotential& v, const RadialOperator& t, const DuhamelSpec& spec,
                               Sign sign) {
  const double h = spec.wave.h;
  if (!(h > 0.0)) throw DomainError("build_lambda_sweep: h must be positive");
  const auto [slo, shi] = spec.wave.cutoffs.support(Member::Phi1);
  LambdaSweep out;
  out.sign_ = sign;
  out.h_ = h;
  out.lo_ = slo / h;
  out.hi_ = shi / h;
  out.grid_ = t.grid();
  out.wave_ = spec.wave;
  const int count =
      spec.lambda_nodes > 0 ? spec.lambda_nodes : default_lambda_nodes(out.hi_ - out.lo_, out.grid_->r_max());

  std::vector<ComplexMatrix> values(count);
  out.lambdas_.assign(count, 0.0);
  out.residuals_.assign(count, 0.0);
  out.q_.assign(count, 0.0);
  for (int m = 0; m < count; ++m) {
    const double lambda = cheb_lambda(out.lo_, out.hi_, count, m);
    NodeInverse inv = invert_at(v, t, lambda, sign);
    if (!(inv.residual <= 1e-10)) {
      throw NumericalError("inversion residual " + std::to_string(inv.residual) + " at lambda = " +
                               std::to_string(lambda),
                           inv.residual);
    }
    // stored ascending in lambda
    out.lambdas_[count - 1 - m] = lambda;
    out.residuals_[count - 1 - m] = inv.residual;
    out.q_[count - 1 - m] = inv.q;
    values[m] = std::move(inv.m);
  }
  out.coeffs_ = fit_matrices(out.lo_, out.hi_, values).coeffs;

  // Compare with direct inversions at extrema of T_K, which sit between nodes.
  double err = 0.0;
  for (int j : {count / 3, (2 * count) / 3}) {
    const double x = std::cos(kPi * j / count);
    const double lambda = 0.5 * (out.lo_ + out.hi_) + 0.5 * (out.hi_ - out.lo_) * x;
    const ComplexMatrix direct = invert_at(v, t, lambda, sign).m;
    const ComplexMatrix interp = evaluate_fit(out.coeffs_, x);
    err = std::max(err, (interp - direct).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff());
  }
  out.interp_error_ = err;
  if (!(err <= 1e-8)) {
    throw NumericalError("lambda interpolation error " + std::to_string(err) + " with " + std::to_string(count) +
                             " nodes; increase lambda_nodes",
                         err);
  }
  return out;
}

TimeGrid TimeGrid::make(double h, const CutoffFamily& cutoffs, double extent_factor, int intervals) {
  if (!(h > 0.0) || !(extent_factor > 0.0)) throw DomainError("TimeGrid: h and extent must be positive");
  if (intervals < 2 || intervals % 2 != 0) throw DomainError("TimeGrid: interval count must be even and >= 2");
  TimeGrid g;
  g.half_ = static_cast<std::size_t>(intervals / 2);
  g.dt_ = extent_factor * h / static_cast<double>(g.half_);
  const double lambda_sup = cutoffs.support(Member::Phi1).second;
  if (g.dt_ > kPi * h / (4.0 * lambda_sup)) {
    throw DomainError("TimeGrid: dt = " + std::to_string(g.dt_) + " does not resolve the fastest oscillation");
  }
  return g;
}

std::size_t TimeGrid::nearest(double t) const {
  const double j = std::round(t / dt_) + static_cast<double>(half_);
  return static_cast<std::size_t>(std::clamp(j, 0.0, static_cast<double>(2 * half_)));
}

ComplexRadialOperator U_h_pm(const LambdaSweep& sweep, double t) {
  const auto& coeffs = sweep.coefficients();
  ComplexMatrix u = ComplexMatrix::Zero(coeffs[0].rows(), coeffs[0].cols());
  const double lo = sweep.lo();
  const double hi = sweep.hi();
  std::vector<double> knots = sweep.wave().cutoffs.knots(Member::Phi1);
  for (double& k : knots) k /= sweep.h();
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    oscint::Amplitude a;
    a.lo = lo;
    a.hi = hi;
    a.breakpoints = knots;
    a.smoothness_hint = 2;
    a.g = [&sweep, k, lo, hi](double l) {
      return Complex(sweep.cutoff(l) * cheb_t(static_cast<int>(k), std::clamp(to_x(lo, hi, l), -1.0, 1.0)));
    };
    u += oscint::filon_cc(a, t, sweep.wave().quad).value * coeffs[k];
  }
  return ComplexRadialOperator(sweep.grid(), std::move(u));
}

ComplexMatrix apply_U(const LambdaSweep& sweep, const TimeGrid& grid, const Eigen::VectorXd& f) {
  const auto& coeffs = sweep.coefficients();
  const int kcount = static_cast<int>(coeffs.size());
  const ComplexMatrix w = basis_transforms([&sweep](double l) { return sweep.cutoff(l); }, sweep.lo(), sweep.hi(),
                                           kcount, grid.t(0), grid.dt(), grid.size(), grid.extent());
  ComplexMatrix cf(f.size(), kcount);
  const Eigen::VectorXcd fc = f.cast<Complex>();
  for (int k = 0; k < kcount; ++k) cf.col(k) = coeffs[k] * fc;
  return cf * w;
}

Eigen::VectorXd radial_bump(const RadialGrid& grid, double r0, double width) {
  if (!(width > 0.0)) throw DomainError("radial_bump: width must be positive");
  Eigen::VectorXd f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = (grid.nodes()[i] - r0) / width;
    f[i] = std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
  }
  const double norm = grid_l1(grid, f);
  if (!(norm > 0.0)) throw DomainError("radial_bump: no grid node inside the bump");
  return f / norm;
}

Eigen::VectorXd radial_delta(const RadialGrid& grid, std::size_t j) {
  if (j >= grid.size()) throw DomainError("radial_delta: index out of range");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(grid.size());
  f[j] = 1.0 / grid.weights()[j];
  return f;
}

std::vector<Eigen::VectorXd> default_inputs(const RadialGrid& grid) {
  std::vector<Eigen::VectorXd> out;
  for (double r0 : {0.5, 1.0, 2.0, 4.0}) out.push_back(radial_bump(grid, r0, 0.25));
  const auto& r = grid.nodes();
  for (double target : {0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    if (target > grid.r_max()) continue;
    const auto it = std::lower_bound(r.begin(), r.end(), target);
    out.push_back(radial_delta(grid, static_cast<std::size_t>(std::min<std::ptrdiff_t>(
                                         it - r.begin(), static_cast<std::ptrdiff_t>(r.size()) - 1))));
  }
  return out;
}

FixedPointReport fixed_point_residual(const RadialPotential& v, const RadialOperator& t, const LambdaSweep& sweep,
                                      const TimeGrid& time, const std::vector<Eigen::VectorXd>& inputs,
                                      const std::vector<double>& times_over_h, int p_nodes) {
  const GridPtr& grid = sweep.grid();
  const double h = sweep.h();
  const CutoffFamily& cutoffs = sweep.wave().cutoffs;
  const auto [slo, shi] = cutoffs.support(Member::Phi1Tilde);
  const double lo = slo / h;
  const double hi = shi / h;
  const int kp = p_nodes > 0 ? p_nodes : default_lambda_nodes(hi - lo, grid->r_max());

  // Chebyshev coefficients of D on supp phi1~(h .)
  std::vector<ComplexMatrix> d_values(kp);
  for (int m = 0; m < kp; ++m) {
    d_values[m] = perturbation_operator(v, grid, cheb_lambda(lo, hi, kp, m), sweep.sign()).matrix();
  }
  const std::vector<ComplexMatrix> b = fit_matrices(lo, hi, d_values).coeffs;
  d_values.clear();

  // Basis transforms on every lattice difference s = (m - 2 half) dt.
  const std::size_t half = time.half();
  const std::size_t lcount = time.size();
  const ComplexMatrix what = basis_transforms(
      [&cutoffs, h](double l) { return cutoffs.eval(Member::Phi1Tilde, h * l); }, lo, hi, kp,
      -2.0 * static_cast<double>(half) * time.dt(), time.dt(), 4 * half + 1, time.extent());

  FixedPointReport rep;
  rep.p_nodes = kp;
  std::vector<std::size_t> idx;
  for (double s : times_over_h) {
    idx.push_back(time.nearest(s * h));
    rep.times.push_back(time.t(idx.back()));
  }
  const auto scount = static_cast<Eigen::Index>(idx.size());
  rep.defects.assign(idx.size(), 0.0);

  kernels::WaveKernelSpec wave = sweep.wave();
  const kernels::KernelSlice phi_hat = kernels::cutoff_transform_slice(wave, false);
  std::vector<Complex> phi_values;
  for (double s : rep.times) phi_values.push_back(phi_hat(s).value);

  const ComplexMatrix tc = t.matrix().cast<Complex>();
  for (const Eigen::VectorXd& f : inputs) {
    const double fnorm = grid_l1(*grid, f);
    const ComplexMatrix u = apply_U(sweep, time, f);

    ComplexMatrix acc = ComplexMatrix::Zero(u.rows(), scount);
    ComplexMatrix g(static_cast<Eigen::Index>(lcount), scount);
    for (int k = 0; k < kp; ++k) {
      for (Eigen::Index i = 0; i < scount; ++i) {
        for (std::size_t l = 0; l < lcount; ++l) {
          g(static_cast<Eigen::Index>(l), i) = time.weight(l) * what(k, static_cast<Eigen::Index>(idx[i] + 2 * half - l));
        }
      }
      acc.noalias() += b[k] * (u * g);
    }
    const Eigen::VectorXcd tf = tc * f.cast<Complex>();
    const ComplexMatrix rhs_conv = tc * acc / (2.0 * kPi);
    for (Eigen::Index i = 0; i < scount; ++i) {
      const Eigen::VectorXcd rhs = phi_values[i] * tf - rhs_conv.col(i);
      const double defect = grid_l1(*grid, (u.col(static_cast<Eigen::Index>(idx[i])) - rhs).eval()) / fnorm;
      rep.defects[i] = std::max(rep.defects[i], defect);
    }
    double peak = 0.0;
    for (std::size_t l = 0; l < lcount; ++l) peak = std::max(peak, grid_l1(*grid, u.col(static_cast<Eigen::Index>(l))));
    const double edge = std::max(grid_l1(*grid, u.col(0)), grid_l1(*grid, u.col(static_cast<Eigen::Index>(lcount - 1))));
    if (peak > 0.0) rep.tail = std::max(rep.tail, edge / peak);
  }
  rep.residual = rep.defects.empty() ? 0.0 : *std::max_element(rep.defects.begin(), rep.defects.end());
  return rep;
}

FreeEstimate estimate_2_10(const RadialPotential& v, GridPtr grid, const kernels::WaveKernelSpec& spec,
                           const Eigen::VectorXd& f, const TimeGrid& time) {
  if (v.n != grid->dimension() || spec.order.n() != v.n) throw DomainError("dimension mismatch");
  const SpectralOrder order = spec.order;
  const int n = order.n();
  const double h = spec.h;
  const double fnorm = grid_l1(*grid, f);
  if (!(fnorm > 0.0)) throw DomainError("estimate_2_10: f must be non-zero");
  FreeEstimate out;
  if (v.coupling == 0.0) return out;

  const CutoffFamily& c = spec.cutoffs;
  const double lo = std::sqrt(c.params().psi_lo) / h;
  const double hi = std::sqrt(c.params().psi_hi) / h;
  const double pref = std::pow(2.0 * kPi, -(order.nu() + 1.0)) * specfun::jnu_normalization(order);
  const oscint::FftGrid g = oscint::make_fft_grid(lo, hi, time.t(0), time.dt(), time.size(), time.extent());

  const auto& r = grid->nodes();
  const auto& w = grid->weights();
  std::vector<double> base(g.m_count, 0.0);
  for (std::size_t m = 0; m < g.m_count; ++m) {
    const double l = g.lambda(m);
    if (l >= hi) continue;
    double big_f = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) big_f += w[j] * f[j] * specfun::jnu_over_power(order, l * r[j]);
    base[m] = pref * std::pow(l, n - 1) * c.eval(Member::Psi, h * h * l * l) * big_f;
  }

  std::vector<Complex> samples(g.m_count);
  double main = 0.0;
  double edge = 0.0;
  double last_profile = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t m = 0; m < g.m_count; ++m) {
      samples[m] = base[m] == 0.0 ? 0.0 : base[m] * specfun::jnu_over_power(order, g.lambda(m) * r[i]);
    }
    const std::vector<Complex> u = oscint::fft_transform(g, samples);
    double profile = 0.0;
    for (std::size_t l = 0; l < u.size(); ++l) profile += time.weight(l) * std::abs(u[l]);
    const double vw = w[i] * std::abs(v(r[i]));
    main += vw * profile;
    edge += vw * std::max(std::abs(u.front()), std::abs(u.back()));
    last_profile = profile;
  }
  out.main = main / fnorm;
  // ||u(t)|| <= edge (T/|t|)^{(n-1)/2} beyond T
  const double rate = (n - 1) / 2.0;
  out.time_tail = 2.0 * edge * time.extent() / (rate - 1.0) / fnorm;

  // int_{|x| > R} |V| r^{-(n-1)/2}, scaled to the profile at R
  const double rmax = grid->r_max();
  const double area = order.sphere_area();
  if (v.delta > (n + 1) / 2.0) {
    auto integrand = [&](double x) {
      if (x <= 0.0) return 0.0;
      const double rr = rmax / x;
      return std::pow(rr, n - 1 - rate) * std::abs(v(rr)) * rmax / (x * x);
    };
    out.spatial_tail = area * last_profile * std::pow(rmax, rate) * quad::adaptive(integrand, 0.0, 1.0, 1e-10) / fnorm;
  } else {
    out.spatial_tail = std::numeric_limits<double>::infinity();
  }
  out.value = out.main + out.time_tail + out.spatial_tail;
  return out;
}

AKernelL1::AKernelL1(SpectralOrder order, const CutoffFamily& cutoffs, double sigma_min, double sigma_max, int nodes)
    : order_(order), log_lo_(std::log(sigma_min)), log_hi_(std::log(sigma_max)) {
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min) || nodes < 4) throw DomainError("AKernelL1: bad table range");
  kernels::WaveKernelSpec spec;
  spec.order = order;
  spec.cutoffs = cutoffs;
  spec.h = 1.0;
  const double step = (log_hi_ - log_lo_) / (nodes - 1);
  std::vector<double> logs(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double sigma = std::exp(log_lo_ + i * step);
    const kernels::TimeIntegral ti = kernels::time_integral(kernels::a_kernel_slice(spec, sigma, Sign::Plus), 0.0);
    if (!ti.converged || !(ti.value > 0.0)) {
      throw NumericalError("A-kernel time integral did not converge at sigma = " + std::to_string(sigma), ti.value);
    }
    logs[i] = std::log(ti.value);
  }
  value_lo_ = std::exp(logs.front());
  value_hi_ = std::exp(logs.back());
  spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(logs.begin(), logs.end(), log_lo_, step);
}

double AKernelL1::operator()(double sigma) const {
  if (!(sigma > 0.0)) throw DomainError("AKernelL1: sigma must be positive");
  const double ls = std::log(sigma);
  const int n = order_.n();
  if (ls <= log_lo_) return value_lo_ * std::exp((2.5 - n) * (ls - log_lo_));
  if (ls >= log_hi_) return value_hi_ * std::exp(-0.5 * (n - 1) * (ls - log_hi_));
  return std::exp(spline_(ls));
}

double AKernelL1::scaled(double sigma, double h) const { return std::pow(h, 2.0 - order_.n()) * (*this)(sigma / h); }

RadialOperator a_h_operator(const RadialPotential& v, GridPtr grid, const AKernelL1& a_l1, double h) {
  const int n = grid->dimension();
  if (a_l1.order().n() != n) throw DomainError("a_h_operator: dimension mismatch");
  const auto& r = grid->nodes();
  const auto& w = grid->weights();
  const auto size = static_cast<Eigen::Index>(r.size());
  auto kernel = [&a_l1, h](double u) { return a_l1.scaled(u, h); };
  Matrix a(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = i; j < size; ++j) {
      a(i, j) = a(j, i) = potentials::angular_average(kernel, r[i], r[j], n, n - 2.5);
    }
  }
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) a(i, j) *= std::abs(v(r[i])) * w[j];
  }
  return RadialOperator(std::move(grid), std::move(a));
}

PerturbedEstimate estimate_2_11(const RadialPotential& v, const RadialOperator& t, const LambdaSweep& plus,
                                const LambdaSweep& minus, const TimeGrid& time, const Eigen::VectorXd& f,
                                const AKernelL1& a_l1) {
  if (plus.sign() != Sign::Plus || minus.sign() != Sign::Minus) throw DomainError("estimate_2_11: sweep signs");
  if (plus.h() != minus.h()) throw DomainError("estimate_2_11: sweeps at different h");
  const GridPtr& grid = t.grid();
  const double h = plus.h();
  const int n = grid->dimension();
  const double fnorm = grid_l1(*grid, f);
  if (!(fnorm > 0.0)) throw DomainError("estimate_2_11: f must be non-zero");

  PerturbedEstimate out;
  out.t_norm = t.l1_norm();
  const ComplexMatrix up = apply_U(plus, time, f);
  const ComplexMatrix um = apply_U(minus, time, f);
  const std::size_t lcount = time.size();

  double main = 0.0;
  for (std::size_t l = 0; l < lcount; ++l) {
    const auto col = static_cast<Eigen::Index>(l);
    main += time.weight(l) * grid_l1(*grid, (up.col(col) - um.col(col)).eval());
  }
  const double edge = std::max(grid_l1(*grid, (up.col(0) - um.col(0)).eval()),
                               grid_l1(*grid, (up.col(static_cast<Eigen::Index>(lcount - 1)) -
                                               um.col(static_cast<Eigen::Index>(lcount - 1)))
                                                  .eval()));
  const double rate = (n - 1) / 2.0;
  out.time_tail = 2.0 * edge * time.extent() / (rate - 1.0) / (kPi * h * fnorm);
  out.value = main / (kPi * h * fnorm) + out.time_tail;

  const RadialOperator a = a_h_operator(v, grid, a_l1, h);
  out.q_a = a.l1_norm();
  out.contraction = out.t_norm * out.q_a / (2.0 * kPi);

  double middle = 0.0;
  const ComplexMatrix* us[2] = {&up, &um};
  for (int s = 0; s < 2; ++s) {
    Eigen::VectorXd profile = Eigen::VectorXd::Zero(up.rows());
    for (std::size_t l = 0; l < lcount; ++l) {
      profile += time.weight(l) * us[s]->col(static_cast<Eigen::Index>(l)).cwiseAbs();
    }
    out.u_l1[s] = grid_l1(*grid, profile) / fnorm;
    middle += grid_l1(*grid, (a.matrix() * profile).eval());
  }
  out.middle_bound = out.t_norm * middle / (kPi * h * 2.0 * kPi * fnorm);
  out.chain_factor = std::pow(h, 1.5) * out.middle_bound / (out.u_l1[0] + out.u_l1[1]);
  return out;
}

}  // namespace wavekernel::duhamel
