#pragma once

// Oscillatory integrals  int e^{i t lambda} g(lambda) d lambda  over a finite
// support, evaluated by Filon-Clenshaw-Curtis quadrature: g is replaced by a
// piecewise Chebyshev interpolant and each panel is integrated against the
// exponential with exact Chebyshev moments. The interpolant does not depend
// on t, so one fit serves every frequency.

#include <functional>
#include <span>
#include <vector>

#include "wavekernel/common.hpp"

namespace wavekernel::oscint {

struct Amplitude {
  std::function<Complex(double)> g;
  double lo = 0.0;
  double hi = 0.0;
  /// Interior points where g is not analytic (cutoff transition edges).
  std::vector<double> breakpoints;
  int smoothness_hint = 0;
};

struct QuadConfig {
  /// Relative to the L1 norm of the amplitude.
  double target_tol = 1e-12;
  /// Coarse Chebyshev degree d; panels are sampled at 2d+1 points.
  int panel_degree = 16;
  int max_panels = 4000;
};

struct OscResult {
  Complex value;
  /// |value(degree d) - value(degree 2d)|
  double error = 0.0;
  bool converged = true;
};

/// Moments I_k = int_{-1}^{1} T_k(x) e^{i omega x} dx for k = 0..out.size()-1.
void chebyshev_moments(double omega, std::span<Complex> out);

class PiecewiseChebyshev {
 public:
  struct Panel {
    double lo;
    double hi;
    std::vector<Complex> coeffs;  // degree 2d interpolant
    std::vector<Complex> diff;    // degree 2d minus degree d coefficients
    double error_bound;           // t-uniform bound on the panel's doubling difference
    double l1;                    // estimate of int |g| over the panel
  };

  OscResult integrate(double t) const;
  Complex evaluate(double lambda) const;

  double l1_norm() const { return l1_; }
  double error_bound() const { return error_bound_; }
  bool converged() const { return converged_; }
  const std::vector<Panel>& panels() const { return panels_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  friend PiecewiseChebyshev fit(const Amplitude&, const QuadConfig&);
  std::vector<Panel> panels_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double l1_ = 0.0;
  double error_bound_ = 0.0;
  bool converged_ = true;
};

/// Adaptive piecewise Chebyshev approximation of the amplitude. Panels are
/// bisected (largest error first) until the total doubling difference is
/// below target_tol times the L1 norm, or max_panels is reached.
PiecewiseChebyshev fit(const Amplitude& amplitude, const QuadConfig& cfg = {});

/// Gauss-Legendre nodes on [lo, hi] (split at `breaks`) whose sub-panels are
/// short enough that e^{i t lambda} with |t| <= max_abs_t is integrated to
/// near machine precision against a smooth amplitude.
struct NodeSet {
  std::vector<double> nodes;
  std::vector<double> weights;
};
NodeSet oscillatory_nodes(double lo, double hi, std::span<const double> breaks, double max_abs_t);

/// Values  sum_q w_q e^{i t_j x_q} a_q  for t_j = t0 + j dt, j < count.
/// Phases are advanced by recurrence and re-anchored periodically.
std::vector<Complex> uniform_sum(const NodeSet& set, std::span<const Complex> amplitude, double t0, double dt,
                                 std::size_t count);

/// int e^{i t_j lambda} p(lambda) d lambda on t_j = t0 + j dt for the fitted
/// interpolant p of `fit`.
std::vector<Complex> sample_uniform(const PiecewiseChebyshev& fit, double t0, double dt, std::size_t count);

/// Uniform lambda grid lo + m dl (m < m_count) paired with a time lattice
/// t0 + j dt (j < count) so that the trapezoid sum
///   sum_m dl a(lambda_m) e^{i t_j lambda_m}
/// is one FFT of length len. Aliases of the transform sit at multiples of
/// len dt, at least `window` beyond every requested t. The lambda spacing is
/// refined until at least `min_samples` points fall in [lo, hi].
struct FftGrid {
  double lo = 0.0;
  double dl = 0.0;
  std::size_t m_count = 0;
  std::size_t len = 0;
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t count = 0;
  double lambda(std::size_t m) const { return lo + static_cast<double>(m) * dl; }
};
inline constexpr std::size_t kFftMinSamples = 512;
FftGrid make_fft_grid(double lo, double hi, double t0, double dt, std::size_t count, double window,
                      std::size_t min_samples = kFftMinSamples);

/// Trapezoid-FFT transform of samples a(lambda_m), m < grid.m_count.
std::vector<Complex> fft_transform(const FftGrid& grid, std::span<const Complex> samples);

/// Same values as sample_uniform, from a trapezoid sum in lambda evaluated by
/// one FFT. Valid only when the amplitude vanishes smoothly at both ends of
/// its support (the trapezoid rule is then spectrally accurate). `window`
/// is a time beyond which the transform is negligible; the lambda spacing
/// keeps aliases at least that far from every requested t.
std::vector<Complex> sample_uniform_fft(const PiecewiseChebyshev& fit, double t0, double dt, std::size_t count,
                                        double window);

/// Filon-Clenshaw-Curtis value of int e^{i t lambda} g(lambda) d lambda.
OscResult filon_cc(const Amplitude& amplitude, double t, const QuadConfig& cfg = {});

/// Independent oracle: adaptive Gauss-Kronrod on panels no wider than three
/// oscillation periods. Requires |t| (hi - lo) <= 1e6.
Complex adaptive_reference(const Amplitude& amplitude, double t, double tol = 1e-12);

}  // namespace wavekernel::oscint
