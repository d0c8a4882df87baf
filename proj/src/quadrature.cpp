#include "wavekernel/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace wavekernel::quad {
namespace {

Rule build_gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(build_gauss_legendre(n));
  return *slot;
}

double adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                double* error) {
  if (a == b) {
    if (error) *error = 0.0;
    return 0.0;
  }
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, rel_tol, &err);
  if (error) *error = err;
  return value;
}

double adaptive_split(const std::function<double(double)>& f, std::span<const double> points,
                      double rel_tol, double* error) {
  double total = 0.0;
  double err_total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    double err = 0.0;
    total += adaptive(f, points[i], points[i + 1], rel_tol, &err);
    err_total += err;
  }
  if (error) *error = err_total;
  return total;
}

double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels,
                       int order) {
  const Rule& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double sum = 0.0;
    for (int j = 0; j < order; ++j) sum += rule.weights[j] * f(mid + 0.5 * width * rule.nodes[j]);
    total += 0.5 * width * sum;
  }
  return total;
}

}  // namespace wavekernel::quad
