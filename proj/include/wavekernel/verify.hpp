#pragma once

// Numerical verdicts on kernel bounds.
//
// "Bounded" means: the sup over a parameter grid of |quantity| / weight
// changes by less than 10% between the last two of at least three nested
// grid refinements (and, when requested, between the last two dyadic
// extensions of the parameter range).

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wavekernel/kernels.hpp"

namespace wavekernel::verify {

inline constexpr double kStabilityTolerance = 0.10;

struct Range {
  double lo = 1.0;
  double hi = 10.0;
  int points = 9;
  bool log_spaced = true;
};

/// Points of a range at refinement level `level`: (points - 1) 2^level + 1,
/// nested across levels.
std::vector<double> range_points(const Range& r, int level);

/// |quantity(sigma, t_j, h)| for every t_j. One call per (sigma, h) so a
/// kernel slice can be reused across t.
using RowSampler = std::function<std::vector<double>(double sigma, double h, const std::vector<double>& ts)>;

struct BoundSpec {
  std::string name;
  /// Right-hand side shape w(sigma, t, h) > 0.
  std::function<double(double sigma, double t, double h)> weight;
  Range sigma;
  Range t;
  std::vector<double> h_values{1.0};
  /// Optional restriction of the (sigma, t) domain.
  std::function<bool(double sigma, double t)> region;
  int levels = 3;
  int extensions = 0;  // dyadic extensions of both upper range ends, at level 0
};

struct BoundLevel {
  std::size_t samples = 0;
  double sup_ratio = 0.0;
  double arg_sigma = 0.0;
  double arg_t = 0.0;
  double arg_h = 0.0;
};

struct BoundReport {
  std::string name;
  std::vector<BoundLevel> levels;      // one per refinement level
  std::vector<BoundLevel> extensions;  // level 0 on the original and each extended range
  bool stable = false;
  double relative_change = 0.0;  // between the last two refinement levels
  double extension_change = 0.0;
  double constant = 0.0;         // sup ratio at the finest level
  /// sup over t and h of the ratio, per sigma, at the finest level.
  std::vector<double> profile_sigma;
  std::vector<double> profile_ratio;
};

/// Relative change |b - a| / max(|a|, |b|), zero when both vanish.
double relative_change(double a, double b);

BoundReport sup_ratio(const BoundSpec& bound, const RowSampler& quantity);

// ---- samplers -----------------------------------------------------------------

/// |K_h(sigma, t)|, with base.h replaced by the requested h.
RowSampler free_kernel_sampler(const kernels::WaveKernelSpec& base);
/// |A_h^{+-}(sigma, t)|.
RowSampler a_kernel_sampler(const kernels::WaveKernelSpec& base, Sign sign);
/// |K(sigma, t)| for a low-frequency kernel variant; h is ignored.
RowSampler appendix_sampler(const kernels::AppendixSpec& spec, kernels::AppendixVariant variant);
/// |int e^{it lambda} lambda^{k-1} eta_a(lambda^2) g(sigma lambda) d lambda|; h is ignored.
RowSampler lemma_a2_sampler(const kernels::AppendixSpec& spec, double k);

/// sup over sigma in [sigma_lo, sigma_hi] of the sampler at each t: a log
/// grid of `points`, a uniform scan of step h/4 over the light-cone window
/// |sigma - |t|| <= cone_halfwidth h, then a golden-section search around
/// the best point for each t.
std::vector<double> sup_over_sigma(const RowSampler& quantity, double sigma_lo, double sigma_hi, int points,
                                   double h, const std::vector<double>& ts, double cone_halfwidth = 8.0);

/// Row sampler of t -> sup over sigma of `quantity` (the sigma argument is
/// ignored), for bounds in t alone.
RowSampler sup_sigma_sampler(RowSampler quantity, double sigma_lo, double sigma_hi, int points = 60);

using SigmaIntervals = std::function<std::vector<std::pair<double, double>>(double t)>;

/// As sup_sigma_sampler, the sup taken over t-dependent sigma intervals
/// (empty intervals are skipped).
RowSampler interval_sup_sampler(RowSampler quantity, SigmaIntervals intervals, int points = 40);

// ---- time integrals ---------------------------------------------------------------

enum class TimeBound {
  FreeKernel,  // int |t|^s |K_h| dt <= C h^{-(n-1)/2} sigma^{s-(n-1)/2}
  AKernel,     // int |A_h| dt <= C h^{-1/2} (sigma^{-n+5/2} + sigma^{-(n-1)/2})
  AKernelSmallSigma,  // the first branch alone, h^{-1/2} sigma^{-n+5/2}
};

/// Bound shape of a time-integral estimate.
double time_bound_weight(TimeBound bound, SpectralOrder order, double sigma, double s, double h);

/// sup over the sigma range (log spaced, refined with the level) of
/// int |t|^s |kernel| dt / weight, the time step halving with each level
/// (dt = 0.5 / lambda_max at level 0). Each of `extensions` halves the lower
/// end of the range and, with extend_upper, doubles the upper end. Throws
/// NumericalError when a time integral does not converge at its maximal extent.
BoundReport time_integral_bound(TimeBound bound, const kernels::WaveKernelSpec& spec, const Range& sigma, double s,
                                int levels = 3, Sign sign = Sign::Plus, int extensions = 0,
                                bool extend_upper = true);

/// int |t|^s |kernel(sigma, t)| dt at one sigma (default time step).
double kernel_time_integral(TimeBound bound, const kernels::WaveKernelSpec& spec, double sigma, double s,
                            Sign sign = Sign::Plus);

// ---- decay fits ---------------------------------------------------------------------

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  // residual RMS in log space
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool log_correction = false;
  std::size_t samples = 0;
};

/// Least squares of log y against log x; no window restriction.
DecayFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Least squares of log(q / log(t + 2)^{[log_correction]}) against log t over
/// the samples with t_lo <= t <= t_hi. The window must exclude t < 5.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& q, double t_lo, double t_hi,
                   bool log_correction = false);

/// Samples `quantity` at `points` log-spaced t in [t_lo, t_hi] and fits.
DecayFit fit_decay(const std::function<double(double)>& quantity, double t_lo = 10.0, double t_hi = 200.0,
                   int points = 40, bool log_correction = false);

/// Uniform oscillatory bound: sup over (sigma, t) of |t|^k |int e^{it lambda} lambda^{k-1} eta_a g(sigma lambda)|.
BoundReport lemma_A2_check(const kernels::AppendixSpec& spec, double k, const Range& sigma, const Range& t,
                           int levels = 3);

}  // namespace wavekernel::verify
