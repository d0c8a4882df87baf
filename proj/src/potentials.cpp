#include "wavekernel/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "wavekernel/quadrature.hpp"

namespace wavekernel::potentials {

RadialGrid::RadialGrid(int n, std::vector<double> r) : n_(n), r_(std::move(r)) {
  SpectralOrder::for_dimension(n);
  if (r_.size() < 2) throw DomainError("radial grid needs at least two nodes");
  if (r_.front() <= 0.0) throw DomainError("radial nodes must be positive");
  for (std::size_t i = 1; i < r_.size(); ++i) {
    if (!(r_[i] > r_[i - 1])) throw DomainError("radial nodes must be strictly increasing");
  }
  const double area = SpectralOrder::for_dimension(n).sphere_area();
  std::vector<double> s(r_.size());
  for (std::size_t i = 0; i < r_.size(); ++i) s[i] = std::pow(r_[i], n) / n;
  const std::size_t m = r_.size();
  w_.assign(m, 0.0);
  w_[0] = s[0] + 0.5 * (s[1] - s[0]);
  for (std::size_t i = 1; i + 1 < m; ++i) w_[i] = 0.5 * (s[i + 1] - s[i - 1]);
  w_[m - 1] = 0.5 * (s[m - 1] - s[m - 2]);
  for (double& w : w_) w *= area;
}

std::shared_ptr<const RadialGrid> RadialGrid::geometric(int n, double r_min, double r_max, int nodes) {
  if (!(r_min > 0.0) || !(r_max > r_min) || nodes < 2) {
    throw DomainError("geometric grid needs 0 < r_min < r_max and at least two nodes");
  }
  std::vector<double> r(nodes);
  const double ratio = std::log(r_max / r_min) / (nodes - 1);
  for (int i = 0; i < nodes; ++i) r[i] = r_min * std::exp(ratio * i);
  r.back() = r_max;
  return from_nodes(n, std::move(r));
}

std::shared_ptr<const RadialGrid> RadialGrid::from_nodes(int n, std::vector<double> nodes) {
  return std::shared_ptr<const RadialGrid>(new RadialGrid(n, std::move(nodes)));
}

double RadialGrid::volume() const {
  double v = 0.0;
  for (double w : w_) v += w;
  return v;
}

double angular_average(const std::function<double(double)>& f, double r, double rho, int n,
                       double singular_power) {
  if (!(r >= 0.0) || !(rho >= 0.0)) throw DomainError("angular_average needs r, rho >= 0");
  SpectralOrder::for_dimension(n);
  if (r == rho && singular_power >= n - 1) {
    throw DomainError("angular_average: non-integrable singularity at r = rho");
  }
  if (r == 0.0 || rho == 0.0) return f(std::max(r, rho));

  const double norm = std::sqrt(kPi) * std::tgamma((n - 1) / 2.0) / std::tgamma(n / 2.0);
  const double diff2 = (r - rho) * (r - rho);
  const double prod4 = 4.0 * r * rho;
  auto integrand = [&](double theta) {
    const double s = std::sin(0.5 * theta);
    const double u = std::sqrt(diff2 + prod4 * s * s);
    return f(u) * std::pow(std::sin(theta), n - 2);
  };

  // Panels [pi/2^{k+1}, pi/2^k] down to a fraction of the scale where u stops
  // being dominated by |r - rho|.
  const double theta_scale = std::abs(r - rho) / std::sqrt(r * rho);
  const double floor = std::max(theta_scale / 16.0, 1e-15);
  std::vector<double> breaks{kPi, 0.75 * kPi, 0.5 * kPi};
  while (breaks.back() * 0.5 > floor) breaks.push_back(breaks.back() * 0.5);
  breaks.push_back(0.0);

  const quad::Rule& rule = quad::gauss_legendre(24);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double hi = breaks[p];
    const double lo = breaks[p + 1];
    const double mid = 0.5 * (hi + lo);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) sum += rule.weights[j] * integrand(mid + half * rule.nodes[j]);
    total += half * sum;
  }
  return total / norm;
}

namespace {

struct Pieces {
  double newton = 0.0;
  double dispersive = 0.0;
};

// |S| int_a^b r^{n-1} |V(r)| [max(r,rho)^{2-n} + avg u^{-(n-1)/2}] dr
Pieces condition_pieces(const RadialPotential& v, double rho, double a, double b) {
  const int n = v.n;
  const double alpha = (n - 1) / 2.0;
  const double area = SpectralOrder::for_dimension(n).sphere_area();
  auto power = [alpha](double u) { return std::pow(u, -alpha); };

  std::vector<double> pts{a};
  if (rho > a && rho < b) {
    // Refine around the kink of the averaged kernel at r = rho.
    for (double d : {0.5, 0.25, 0.125}) {
      if (rho - d * rho > a) pts.push_back(rho - d * rho);
    }
    pts.push_back(rho);
    for (double d : {0.125, 0.25, 0.5}) {
      if (rho + d * rho < b) pts.push_back(rho + d * rho);
    }
  }
  for (double x = 1.0; x < b; x *= 2.0) {
    if (x > a) pts.push_back(x);
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto newton = [&](double r) {
    return std::pow(r, n - 1) * std::abs(v(r)) * std::pow(std::max(r, rho), 2.0 - n);
  };
  auto dispersive = [&](double r) {
    const double avg = angular_average(power, r, rho, n, alpha);
    return std::pow(r, n - 1) * std::abs(v(r)) * avg;
  };
  Pieces out;
  out.newton = area * quad::adaptive_split(newton, pts, 1e-10);
  out.dispersive = area * quad::adaptive_split(dispersive, pts, 1e-10);
  return out;
}

}  // namespace

Condition12Report check_condition_12(const RadialPotential& v, const std::vector<double>& y_radii, double r_max) {
  if (!(r_max > 0.0)) throw DomainError("check_condition_12 needs R_max > 0");
  if (y_radii.empty()) throw DomainError("check_condition_12 needs at least one |y|");
  SpectralOrder::for_dimension(v.n);

  Condition12Report rep;
  rep.y_radii = y_radii;
  rep.radii = {r_max, 2.0 * r_max, 4.0 * r_max};
  rep.values.assign(3, 0.0);
  if (v.coupling == 0.0) return rep;

  struct Row {
    double newton[3];
    double dispersive[3];
  };
  std::vector<Row> rows;
  for (double rho : y_radii) {
    if (rho < 0.0) throw DomainError("|y| must be non-negative");
    Row row{};
    double lo = 0.0;
    double acc_n = 0.0;
    double acc_d = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Pieces p = condition_pieces(v, rho, lo, rep.radii[k]);
      acc_n += p.newton;
      acc_d += p.dispersive;
      row.newton[k] = acc_n;
      row.dispersive[k] = acc_d;
      lo = rep.radii[k];
    }
    rows.push_back(row);
  }

  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      rep.values[k] = std::max(rep.values[k], rows[i].newton[k] + rows[i].dispersive[k]);
    }
    if (rows[i].newton[2] + rows[i].dispersive[2] > rows[best].newton[2] + rows[best].dispersive[2]) best = i;
  }
  rep.sup_value = rep.values[2];

  auto ratio = [](double a, double b, double c) {
    const double d1 = b - a;
    const double d2 = c - b;
    return d1 > 0.0 ? d2 / d1 : 0.0;
  };
  rep.growth_ratio = ratio(rep.values[0], rep.values[1], rep.values[2]);
  const Row& r = rows[best];
  rep.newton_growth_ratio = ratio(r.newton[0], r.newton[1], r.newton[2]);
  rep.dispersive_growth_ratio = ratio(r.dispersive[0], r.dispersive[1], r.dispersive[2]);
  // A convergent tail shrinks its dyadic increments geometrically; a
  // logarithmic or power divergence keeps them at ratio >= 1.
  rep.divergence_flag = rep.growth_ratio >= kGrowthFlagThreshold;
  return rep;
}

RadialOperator assemble_v_delta_inv(const RadialPotential& v, std::shared_ptr<const RadialGrid> grid) {
  if (v.n != grid->dimension()) throw DomainError("potential and grid dimensions differ");
  const SpectralOrder order = SpectralOrder::for_dimension(v.n);
  const double cn = order.newton_constant();
  const int n = v.n;
  return assemble<double>(std::move(grid), [&](double r, double rho) {
    return -v(r) * cn * std::pow(std::max(r, rho), 2.0 - n);
  });
}

double newton_potential(const RadialGrid& grid, const std::vector<double>& f, double r) {
  if (f.size() != grid.size()) throw DomainError("newton_potential: size mismatch");
  const int n = grid.dimension();
  const double cn = SpectralOrder::for_dimension(n).newton_constant();
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    sum += grid.weights()[j] * std::pow(std::max(r, grid.nodes()[j]), 2.0 - n) * f[j];
  }
  return -cn * sum;
}

TSolve solve_t(const RadialOperator& m) {
  using Matrix = RadialOperator::Matrix;
  const auto& grid = m.grid();
  const auto size = m.matrix().rows();
  const Matrix id = Matrix::Identity(size, size);

  TSolve out{RadialOperator::identity(grid), 0.0, "", 0.0, 0.0, ""};
  out.neumann_q = m.l1_norm();

  Eigen::PartialPivLU<Matrix> lu(id - m.matrix());
  const double rcond = lu.rcond();
  const bool singular = !(rcond > 1e-14);
  Matrix direct;
  if (!singular) direct = lu.solve(id);

  if (out.neumann_q < 1.0) {
    // (1 - M)^{-1} = prod_k (1 + M^{2^k})
    Matrix t = id + m.matrix();
    Matrix p = m.matrix();
    for (int k = 0; k < 64; ++k) {
      p = (p * p).eval();
      if (RadialOperator(grid, p).l1_norm() < 1e-18) break;
      t = (t + t * p).eval();
    }
    out.t = RadialOperator(grid, t);
    out.method = "series";
    if (!singular) out.series_direct_diff = (t - direct).cwiseAbs().maxCoeff();
  } else {
    if (singular) {
      throw NumericalError("1 - V Delta^{-1} is singular on this grid (rcond " + std::to_string(rcond) + ")",
                           rcond);
    }
    out.t = RadialOperator(grid, direct);
    out.method = "direct";
    out.caveat = "Neumann factor >= 1; invertibility rests on the LU solve alone";
  }
  const Matrix defect = out.t.matrix() - id - m.matrix() * out.t.matrix();
  out.residual = RadialOperator(grid, defect).l1_norm();
  return out;
}

double coupling_for_neumann_factor(double q_target, double delta, std::shared_ptr<const RadialGrid> grid) {
  RadialPotential unit{grid->dimension(), 1.0, delta};
  const double q1 = assemble_v_delta_inv(unit, std::move(grid)).l1_norm();
  return q_target / q1;
}

}  // namespace wavekernel::potentials
