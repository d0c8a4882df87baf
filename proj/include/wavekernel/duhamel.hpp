#pragma once

// Perturbed low-frequency evolution on radial L1 data.
//
// For real V and G = -Delta + V the resolvent identity gives
//   V R^{+-}(lambda) = 1 - M^{+-}(lambda),
//   M^{+-}(lambda)   = (1 + V R0^{+-}(lambda))^{-1}
//                    = T (1 + D^{+-}(lambda) T)^{-1} = (T^{-1} + D^{+-})^{-1},
// with D^{+-}(lambda) = V (R0^{+-}(lambda) - R0^{+-}(0)) and T^{-1} = 1 - V Delta^{-1}.
// U_h^{+-}(t) = int e^{it lambda} phi_h(lambda) M^{+-}(lambda) d lambda, and
// Stone's formula turns this into
//   V e^{it sqrt G} psi(h^2 G) = -(i pi h)^{-1} (U_h^+(t) - U_h^-(t)).
//
// All operators are nodal matrices on a RadialGrid (see potentials.hpp).

#include <Eigen/Dense>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <memory>
#include <string>
#include <vector>

#include "wavekernel/kernels.hpp"
#include "wavekernel/potentials.hpp"

namespace wavekernel::duhamel {

using potentials::ComplexRadialOperator;
using potentials::RadialGrid;
using potentials::RadialOperator;
using potentials::RadialPotential;
using GridPtr = std::shared_ptr<const RadialGrid>;
using ComplexMatrix = Eigen::MatrixXcd;

/// D^{+-}(lambda) = V (R0(lambda) - R0(0)) on the grid.
ComplexRadialOperator perturbation_operator(const RadialPotential& v, GridPtr grid, double lambda, Sign sign);
/// V R0^{+-}(lambda) on the grid.
ComplexRadialOperator resolvent_operator(const RadialPotential& v, GridPtr grid, double lambda, Sign sign);

/// || V R0(lambda) - V R0(0) ||_{L1 -> L1}; requires 0 < lambda <= 1.
double lambda_perturbation_norm(const RadialPotential& v, GridPtr grid, double lambda, Sign sign);
/// || V R0(lambda) ||_{L1 -> L1}; requires 0 < lambda <= 1.
double resolvent_norm(const RadialPotential& v, GridPtr grid, double lambda, Sign sign);

struct NodeInverse {
  double lambda = 0.0;
  ComplexMatrix m;        // M(lambda)
  double residual = 0.0;  // || (T^{-1} + D) M - 1 ||
  double q = 0.0;         // || D T ||
};

/// M^{+-}(lambda) by an LU solve of T^{-1} + D. Throws NumericalError naming
/// lambda if the system is singular.
NodeInverse invert_at(const RadialPotential& v, const RadialOperator& t, double lambda, Sign sign);

struct DuhamelSpec {
  kernels::WaveKernelSpec wave;
  int lambda_nodes = 0;          // 0 picks a count from the oscillation of M across supp phi_h
  double extent_factor = 160.0;  // T_max / h
  int time_intervals = 2048;
};

/// Chebyshev nodes of the first kind on [lo, hi] (descending in x, so ascending in lambda).
std::vector<double> chebyshev_nodes(double lo, double hi, int count);

/// Default number of lambda nodes for an interval of width `width` on a grid
/// reaching out to r_max.
int default_lambda_nodes(double width, double r_max);

class LambdaSweep {
 public:
  Sign sign() const { return sign_; }
  double h() const { return h_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<double>& residuals() const { return residuals_; }
  const std::vector<double>& contraction() const { return q_; }
  double max_residual() const;
  double max_contraction() const;
  /// Relative error of the interpolant against direct inversions between nodes.
  double interpolation_error() const { return interp_error_; }
  /// Chebyshev coefficients C_k of M in x = (2 lambda - lo - hi) / (hi - lo).
  const std::vector<ComplexMatrix>& coefficients() const { return coeffs_; }
  const GridPtr& grid() const { return grid_; }
  const kernels::WaveKernelSpec& wave() const { return wave_; }

  /// Interpolated M(lambda), lambda in [lo, hi].
  ComplexMatrix interpolate(double lambda) const;
  /// phi_h(lambda)
  double cutoff(double lambda) const;

 private:
  friend LambdaSweep build_lambda_sweep(const RadialPotential&, const RadialOperator&, const DuhamelSpec&, Sign);
  Sign sign_ = Sign::Plus;
  double h_ = 1.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> lambdas_;
  std::vector<double> residuals_;
  std::vector<double> q_;
  std::vector<ComplexMatrix> coeffs_;
  double interp_error_ = 0.0;
  GridPtr grid_;
  kernels::WaveKernelSpec wave_;
};

/// Inverts at Chebyshev nodes on supp phi_h and builds the interpolant.
/// Throws NumericalError if a node residual exceeds 1e-10 or the interpolant
/// misses direct inversions by more than 1e-8 relative.
LambdaSweep build_lambda_sweep(const RadialPotential& v, const RadialOperator& t, const DuhamelSpec& spec, Sign sign);

/// Symmetric lattice t_j = (j - half) dt, j = 0..2 half, with trapezoid weights.
class TimeGrid {
 public:
  /// extent = extent_factor h, 2 half = intervals. Throws DomainError if dt
  /// exceeds pi h / (4 lambda_sup), lambda_sup = sup supp phi1.
  static TimeGrid make(double h, const CutoffFamily& cutoffs, double extent_factor = 160.0, int intervals = 2048);
  double dt() const { return dt_; }
  std::size_t half() const { return half_; }
  std::size_t size() const { return 2 * half_ + 1; }
  double extent() const { return dt_ * static_cast<double>(half_); }
  double t(std::size_t j) const { return (static_cast<double>(j) - static_cast<double>(half_)) * dt_; }
  double weight(std::size_t j) const { return (j == 0 || j + 1 == size()) ? 0.5 * dt_ : dt_; }
  /// Index of the lattice point nearest to t (clamped).
  std::size_t nearest(double t) const;

 private:
  double dt_ = 0.0;
  std::size_t half_ = 0;
};

/// U_h(t) as an operator: entrywise filon_cc on the Chebyshev interpolant.
ComplexRadialOperator U_h_pm(const LambdaSweep& sweep, double t);

/// Columns U_h(t_j) f for every lattice point (N x size). Uses the trapezoid
/// FFT in lambda, valid because phi_h vanishes smoothly at both ends.
ComplexMatrix apply_U(const LambdaSweep& sweep, const TimeGrid& grid, const Eigen::VectorXd& f);

/// Smooth radial bump around r0 of the given width, normalized to grid L1 norm 1.
Eigen::VectorXd radial_bump(const RadialGrid& grid, double r0, double width = 0.25);
/// e_j / w_j, an approximate delta on the sphere |x| = r_j with grid L1 norm 1.
Eigen::VectorXd radial_delta(const RadialGrid& grid, std::size_t j);

/// Default inputs for operator-norm sampling: bumps at r0 in {0.5, 1, 2, 4}
/// and grid deltas near r in {0.05, 0.2, 0.5, 1, 2, 4, 8, 16}.
std::vector<Eigen::VectorXd> default_inputs(const RadialGrid& grid);

struct FixedPointReport {
  double residual = 0.0;           // max over inputs and times of ||u - rhs||_{L1} / ||f||
  std::vector<double> times;       // sampled t (snapped to the lattice)
  std::vector<double> defects;     // max over inputs, per time
  double tail = 0.0;               // max over inputs of ||u(+-T_max)|| / max_t ||u(t)||
  int p_nodes = 0;
};

/// Checks U(t) f = phi_h^(t) T f - (2 pi)^{-1} int T P(t - tau) U(tau) f d tau
/// with P(s) = int e^{is lambda} phi1~(h lambda) D(lambda) d lambda evaluated
/// from a separate Chebyshev fit of D on supp phi1~(h .), and the tau
/// integral as a trapezoid sum on the time lattice. `p_nodes` = 0 picks the
/// count as for the sweep. Times are multiples of h.
FixedPointReport fixed_point_residual(const RadialPotential& v, const RadialOperator& t, const LambdaSweep& sweep,
                                      const TimeGrid& grid, const std::vector<Eigen::VectorXd>& inputs,
                                      const std::vector<double>& times_over_h = {0, 1, -1, 2, -2, 5, -5, 10, -10, 20,
                                                                                 -20},
                                      int p_nodes = 0);

struct FreeEstimate {
  double value = 0.0;          // main + tails
  double main = 0.0;           // int over the lattice and the grid ball, divided by ||f||
  double spatial_tail = 0.0;   // |x| > R_max, from the r^{-(n-1)/2} profile
  double time_tail = 0.0;      // |t| > T_max, from the t^{-(n-1)/2} rate
};

/// int || V e^{it sqrt G0} psi(h^2 G0) f ||_{L1} dt / ||f||. The free
/// evolution of radial f is evaluated through the Bessel product formula
///   u(r, t) = (2 pi)^{-(nu+1)} kappa int e^{it lambda} lambda^{n-1} psi(h^2 lambda^2) j(lambda r) F(lambda) d lambda,
///   F(lambda) = sum_j w_j f_j j(lambda r_j),   j(z) = J_nu(z) / z^nu,  kappa = 2^nu Gamma(nu+1).
FreeEstimate estimate_2_10(const RadialPotential& v, GridPtr grid, const kernels::WaveKernelSpec& spec,
                           const Eigen::VectorXd& f, const TimeGrid& time);

/// Time-integrated L1 norm of the A_1 kernel: L(sigma) = int |A_1(sigma, t)| dt,
/// tabulated on a log grid and interpolated by a cubic B-spline in log-log,
/// with power-law continuation sigma^{5/2-n} below and sigma^{-(n-1)/2} above.
class AKernelL1 {
 public:
  AKernelL1(SpectralOrder order, const CutoffFamily& cutoffs, double sigma_min = 0.02, double sigma_max = 200.0,
            int nodes = 49);
  double operator()(double sigma) const;
  /// int |A_h(sigma, t)| dt = h^{2-n} L(sigma / h).
  double scaled(double sigma, double h) const;
  SpectralOrder order() const { return order_; }

 private:
  SpectralOrder order_;
  double log_lo_;
  double log_hi_;
  double value_lo_;
  double value_hi_;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

struct PerturbedEstimate {
  double value = 0.0;          // int || V e^{it sqrt G} psi(h^2 G) f || dt / ||f||
  double time_tail = 0.0;      // edge-rate bound beyond T_max (included in value)
  double u_l1[2] = {0, 0};     // int int |U_h^{+-} f| dt dx / ||f||, index 0 = +
  double q_a = 0.0;            // || |V| a_h ||, a_h(r, rho) = avg int |A_h^{+-}(|x - y|, t)| dt
  double contraction = 0.0;    // ||T|| q_a / (2 pi): coefficient of the self-referential term
  double middle_bound = 0.0;   // (pi h)^{-1} (2 pi)^{-1} ||T|| sum_+- int int |V| a_h int |U^{+-} f| / ||f||,
                               // an upper bound for the main part of value
  double chain_factor = 0.0;   // h^{3/2} middle_bound / (u_l1[0] + u_l1[1])
  double t_norm = 0.0;
};

/// Sets value from the two sweeps through Stone's formula and the auxiliary
/// quantities of the Duhamel bound.
PerturbedEstimate estimate_2_11(const RadialPotential& v, const RadialOperator& t, const LambdaSweep& plus,
                                const LambdaSweep& minus, const TimeGrid& time, const Eigen::VectorXd& f,
                                const AKernelL1& a_l1);

/// Nodal matrix of |V(r)| a_h(r, rho).
RadialOperator a_h_operator(const RadialPotential& v, GridPtr grid, const AKernelL1& a_l1, double h);

}  // namespace wavekernel::duhamel
