#pragma once

// Radial potentials and integral operators on radial functions in R^n.
//
// A radial function is stored by its values at the grid nodes. Grid weights
// include the sphere area, so sum_i w_i f_i approximates the integral of f
// over the ball of radius R_max. An operator with kernel k(r, rho) (already
// averaged over the sphere |y| = rho) is the nodal matrix M_ij = k(r_i, r_j) w_j.

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wavekernel/common.hpp"

namespace wavekernel::potentials {

struct RadialPotential {
  int n = 4;
  double coupling = 1.0;
  double delta = 3.0;

  /// V(r) = c (1 + r^2)^{-delta/2}
  double operator()(double r) const { return coupling * std::pow(1.0 + r * r, -0.5 * delta); }
};

class RadialGrid {
 public:
  /// Geometric nodes on [r_min, r_max]; trapezoid weights in s = rho^n / n,
  /// the first cell extended down to 0, so the ball volume is exact.
  static std::shared_ptr<const RadialGrid> geometric(int n, double r_min = 1e-3, double r_max = 64.0,
                                                     int nodes = 240);
  /// Same weight rule on arbitrary increasing nodes.
  static std::shared_ptr<const RadialGrid> from_nodes(int n, std::vector<double> nodes);

  int dimension() const { return n_; }
  std::size_t size() const { return r_.size(); }
  const std::vector<double>& nodes() const { return r_; }
  const std::vector<double>& weights() const { return w_; }
  double r_max() const { return r_.back(); }
  double volume() const;

  /// sum_i w_i |f_i|
  template <class Vec>
  double l1_norm(const Vec& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < r_.size(); ++i) s += w_[i] * std::abs(f[i]);
    return s;
  }

 private:
  RadialGrid(int n, std::vector<double> r);
  int n_;
  std::vector<double> r_;
  std::vector<double> w_;
};

template <class Scalar>
class RadialOperatorT {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  RadialOperatorT(std::shared_ptr<const RadialGrid> grid, Matrix m) : grid_(std::move(grid)), m_(std::move(m)) {}

  static RadialOperatorT identity(std::shared_ptr<const RadialGrid> grid) {
    const auto n = static_cast<Eigen::Index>(grid->size());
    return RadialOperatorT(grid, Matrix::Identity(n, n));
  }
  static RadialOperatorT zero(std::shared_ptr<const RadialGrid> grid) {
    const auto n = static_cast<Eigen::Index>(grid->size());
    return RadialOperatorT(grid, Matrix::Zero(n, n));
  }

  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }
  const std::shared_ptr<const RadialGrid>& grid() const { return grid_; }

  /// L1 -> L1 norm: max_j sum_i |M_ij| w_i / w_j.
  double l1_norm() const {
    const auto& w = grid_->weights();
    double best = 0.0;
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < m_.rows(); ++i) s += std::abs(m_(i, j)) * w[i];
      best = std::max(best, s / w[j]);
    }
    return best;
  }

 private:
  std::shared_ptr<const RadialGrid> grid_;
  Matrix m_;
};

using RadialOperator = RadialOperatorT<double>;
using ComplexRadialOperator = RadialOperatorT<Complex>;

/// Nodal matrix of the operator with sphere-averaged kernel k(r, rho).
template <class Scalar>
RadialOperatorT<Scalar> assemble(std::shared_ptr<const RadialGrid> grid,
                                 const std::function<Scalar(double, double)>& kernel) {
  const auto& r = grid->nodes();
  const auto& w = grid->weights();
  const auto n = static_cast<Eigen::Index>(r.size());
  typename RadialOperatorT<Scalar>::Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = kernel(r[i], r[j]) * w[j];
  }
  return RadialOperatorT<Scalar>(std::move(grid), std::move(m));
}

/// (1/|S^{n-1}|) int_{S^{n-1}} f(|r e1 - rho w|) dw, by Gauss-Legendre in the
/// polar angle on panels refined geometrically towards theta = 0.
/// `singular_power` is the exponent alpha of a u^{-alpha} singularity of f at
/// u = 0; r = rho with alpha >= n - 1 is rejected.
double angular_average(const std::function<double(double)>& f, double r, double rho, int n,
                       double singular_power = 0.0);

/// Increment ratio at or above which check_condition_12 reports divergence.
inline constexpr double kGrowthFlagThreshold = 0.95;

struct Condition12Report {
  double sup_value = 0.0;           // sup over |y| of the integral at the largest radius
  bool divergence_flag = false;     // set when the value keeps growing with the radius
  double growth_ratio = 0.0;        // (I(4R) - I(2R)) / (I(2R) - I(R)) for the total
  double newton_growth_ratio = 0.0;     // same for the |x-y|^{2-n} term alone
  double dispersive_growth_ratio = 0.0; // same for the |x-y|^{-(n-1)/2} term alone
  std::vector<double> radii;        // R, 2R, 4R
  std::vector<double> values;       // sup over |y| at each radius
  std::vector<double> y_radii;
};

/// sup_y int_{|x| < R} (|x-y|^{2-n} + |x-y|^{-(n-1)/2}) |V(x)| dx at R, 2R, 4R.
Condition12Report check_condition_12(const RadialPotential& v, const std::vector<double>& y_radii, double r_max);

/// V Delta^{-1}: kernel -V(r) c_N max(r, rho)^{2-n} (the sphere area sits in the weights).
RadialOperator assemble_v_delta_inv(const RadialPotential& v, std::shared_ptr<const RadialGrid> grid);

/// Delta^{-1} applied to nodal values f and evaluated at an arbitrary radius r.
double newton_potential(const RadialGrid& grid, const std::vector<double>& f, double r);

struct TSolve {
  RadialOperator t;
  double neumann_q = 0.0;
  std::string method;          // "series" or "direct"
  double series_direct_diff = 0.0;  // max entry difference, when both ran
  double residual = 0.0;       // || T - I - M T ||_{L1 -> L1}
  std::string caveat;
};

/// T = (1 - M)^{-1}. With q = ||M|| < 1 both the Neumann series (binary
/// splitting) and an LU solve are run; otherwise LU only.
TSolve solve_t(const RadialOperator& m);

/// Coupling c for which ||V Delta^{-1}||_{L1->L1} equals q_target.
double coupling_for_neumann_factor(double q_target, double delta, std::shared_ptr<const RadialGrid> grid);

}  // namespace wavekernel::potentials
