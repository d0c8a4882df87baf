#pragma once

// Non-oscillatory quadrature helpers shared by the modules.

#include <functional>
#include <span>
#include <vector>

namespace wavekernel::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; cached, thread-safe.
const Rule& gauss_legendre(int n);

/// Adaptive Gauss-Kronrod (61 point, bisection depth <= 15) on [a, b].
/// `error` (if given) receives the estimated absolute error.
double adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12,
                double* error = nullptr);

/// Adaptive integration split at the given interior breakpoints.
double adaptive_split(const std::function<double(double)>& f, std::span<const double> points,
                      double rel_tol = 1e-12, double* error = nullptr);

/// Fixed composite Gauss-Legendre over equal panels.
double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels,
                       int order = 20);

}  // namespace wavekernel::quad
