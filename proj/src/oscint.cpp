#include "wavekernel/oscint.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fftw3.h>

#include "wavekernel/quadrature.hpp"

namespace wavekernel::oscint {
namespace {

constexpr double kEps = 2.220446049250313e-16;

// Chebyshev-point data for a degree N interpolant on x_j = cos(j pi / N).
struct ChebyshevTables {
  int degree;
  std::vector<double> nodes;
  std::vector<double> transform;  // (N+1)x(N+1): coeffs = transform * values
  std::vector<double> cc_weights;
};

ChebyshevTables build_tables(int n) {
  ChebyshevTables tab;
  tab.degree = n;
  tab.nodes.resize(n + 1);
  for (int j = 0; j <= n; ++j) tab.nodes[j] = std::cos(kPi * j / n);
  tab.transform.assign((n + 1) * (n + 1), 0.0);
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= n; ++j) {
      double w = 2.0 / n * std::cos(kPi * j * k / n);
      if (j == 0 || j == n) w *= 0.5;
      if (k == 0 || k == n) w *= 0.5;
      tab.transform[k * (n + 1) + j] = w;
    }
  }
  tab.cc_weights.assign(n + 1, 0.0);
  for (int k = 0; k <= n; k += 2) {
    const double moment = 2.0 / (1.0 - double(k) * k);
    for (int j = 0; j <= n; ++j) tab.cc_weights[j] += moment * tab.transform[k * (n + 1) + j];
  }
  return tab;
}

const ChebyshevTables& tables(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<ChebyshevTables>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<ChebyshevTables>(build_tables(n));
  return *slot;
}

void validate(const Amplitude& a) {
  if (!a.g) throw DomainError("oscint: amplitude has no callable");
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.lo < 0.0 || !(a.lo < a.hi)) {
    throw DomainError("oscint: invalid support [" + std::to_string(a.lo) + ", " +
                      std::to_string(a.hi) + "]");
  }
}

PiecewiseChebyshev::Panel make_panel(const Amplitude& a, double lo, double hi, int degree) {
  const int n = 2 * degree;
  const ChebyshevTables& fine = tables(n);
  const ChebyshevTables& coarse = tables(degree);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::vector<Complex> values(n + 1);
  for (int j = 0; j <= n; ++j) {
    values[j] = a.g(mid + half * fine.nodes[j]);
    if (!is_finite(values[j])) {
      throw NumericalError("oscint: amplitude not finite at lambda = " +
                           std::to_string(mid + half * fine.nodes[j]));
    }
  }

  PiecewiseChebyshev::Panel panel{lo, hi, std::vector<Complex>(n + 1), std::vector<Complex>(n + 1),
                                  0.0, 0.0};
  for (int k = 0; k <= n; ++k) {
    Complex c = 0.0;
    const double* row = &fine.transform[k * (n + 1)];
    for (int j = 0; j <= n; ++j) c += row[j] * values[j];
    panel.coeffs[k] = c;
  }
  // Coarse interpolant uses the even-indexed nodes (nested Clenshaw-Curtis points).
  for (int k = 0; k <= degree; ++k) {
    Complex c = 0.0;
    const double* row = &coarse.transform[k * (degree + 1)];
    for (int j = 0; j <= degree; ++j) c += row[j] * values[2 * j];
    panel.diff[k] = panel.coeffs[k] - c;
  }
  for (int k = degree + 1; k <= n; ++k) panel.diff[k] = panel.coeffs[k];

  double diff_sum = 0.0;
  for (const Complex& d : panel.diff) diff_sum += std::abs(d);
  // |I_k| <= 2, so the doubling difference is at most half * 2 * sum |diff|.
  panel.error_bound = 2.0 * half * diff_sum;
  double l1 = 0.0;
  for (int j = 0; j <= n; ++j) l1 += fine.cc_weights[j] * std::abs(values[j]);
  panel.l1 = half * l1;
  return panel;
}

// Moments by Gauss-Legendre when |omega| is small compared with the degree.
void moments_by_quadrature(double omega, std::span<Complex> out) {
  const int n = static_cast<int>(out.size()) - 1;
  const int m = static_cast<int>(std::ceil(0.5 * (n + 2.72 * std::abs(omega)))) + 20;
  const quad::Rule& rule = quad::gauss_legendre(m);
  std::fill(out.begin(), out.end(), Complex(0.0));
  for (int q = 0; q < m; ++q) {
    const double x = rule.nodes[q];
    const Complex e = rule.weights[q] * std::polar(1.0, omega * x);
    double t0 = 1.0;
    double t1 = x;
    out[0] += e;
    if (n >= 1) out[1] += e * x;
    for (int k = 2; k <= n; ++k) {
      const double t2 = 2.0 * x * t1 - t0;
      out[k] += e * t2;
      t0 = t1;
      t1 = t2;
    }
  }
}

void moments_by_recurrence(double omega, std::span<Complex> out) {
  const int n = static_cast<int>(out.size()) - 1;
  const double s = std::sin(omega);
  const double c = std::cos(omega);
  const Complex i_omega(0.0, omega);
  const Complex i0 = 2.0 * s / omega;
  const Complex i1 = (2.0 * c - i0) / i_omega;
  out[0] = i0;
  if (n >= 1) out[1] = i1;
  if (n >= 2) {
    const Complex x2 = 2.0 * s / omega - 2.0 * i1 / i_omega;
    out[2] = 2.0 * x2 - i0;
  }
  const Complex b_even(0.0, 2.0 * s);  // e^{iw} - e^{-iw}
  const Complex b_odd(2.0 * c, 0.0);   // e^{iw} + e^{-iw}
  for (int k = 2; k < n; ++k) {
    const Complex b = ((k + 1) % 2 == 0) ? b_even : b_odd;
    out[k + 1] = Complex(0.0, 2.0 * (k + 1) / omega) * out[k] +
                 ((k + 1.0) / (k - 1.0)) * out[k - 1] + b * (-2.0 / (k - 1.0)) / i_omega;
  }
}

}  // namespace

void chebyshev_moments(double omega, std::span<Complex> out) {
  if (out.empty()) return;
  const int n = static_cast<int>(out.size()) - 1;
  if (std::abs(omega) <= std::max(2.0 * n, 24.0)) {
    moments_by_quadrature(omega, out);
  } else {
    moments_by_recurrence(omega, out);
  }
}

PiecewiseChebyshev fit(const Amplitude& amplitude, const QuadConfig& cfg) {
  validate(amplitude);
  if (cfg.panel_degree < 8) throw DomainError("oscint: panel_degree must be >= 8");
  if (!(cfg.target_tol > 0.0)) throw DomainError("oscint: target_tol must be positive");

  std::vector<double> cuts{amplitude.lo, amplitude.hi};
  for (double b : amplitude.breakpoints) {
    if (b > amplitude.lo && b < amplitude.hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<PiecewiseChebyshev::Panel> panels;
  std::vector<bool> alive;
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> queue;
  double total_error = 0.0;
  double total_l1 = 0.0;
  auto push = [&](PiecewiseChebyshev::Panel&& p) {
    total_error += p.error_bound;
    total_l1 += p.l1;
    queue.emplace(p.error_bound, panels.size());
    panels.push_back(std::move(p));
    alive.push_back(true);
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    push(make_panel(amplitude, cuts[i], cuts[i + 1], cfg.panel_degree));
  }

  const double min_width = 1e-15 * (amplitude.hi - amplitude.lo);
  const double tol = std::max(cfg.target_tol, 64.0 * kEps);
  int live = static_cast<int>(panels.size());
  bool converged = true;
  while (total_error > tol * total_l1 && !queue.empty()) {
    if (live >= cfg.max_panels) {
      converged = false;
      break;
    }
    const auto [err, idx] = queue.top();
    queue.pop();
    if (!alive[idx]) continue;
    const double lo = panels[idx].lo;
    const double hi = panels[idx].hi;
    if (hi - lo < min_width) {
      converged = false;
      break;
    }
    alive[idx] = false;
    total_error -= panels[idx].error_bound;
    total_l1 -= panels[idx].l1;
    const double mid = 0.5 * (lo + hi);
    push(make_panel(amplitude, lo, mid, cfg.panel_degree));
    push(make_panel(amplitude, mid, hi, cfg.panel_degree));
    ++live;
  }

  PiecewiseChebyshev result;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    if (alive[i]) result.panels_.push_back(std::move(panels[i]));
  }
  std::sort(result.panels_.begin(), result.panels_.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo; });
  result.lo_ = amplitude.lo;
  result.hi_ = amplitude.hi;
  result.l1_ = 0.0;
  result.error_bound_ = 0.0;
  for (const auto& p : result.panels_) {
    result.l1_ += p.l1;
    result.error_bound_ += p.error_bound;
  }
  result.converged_ = converged;
  return result;
}

OscResult PiecewiseChebyshev::integrate(double t) const {
  Complex value = 0.0;
  Complex diff = 0.0;
  std::vector<Complex> moments;
  for (const Panel& p : panels_) {
    const double mid = 0.5 * (p.lo + p.hi);
    const double half = 0.5 * (p.hi - p.lo);
    moments.resize(p.coeffs.size());
    chebyshev_moments(t * half, moments);
    Complex v = 0.0;
    Complex d = 0.0;
    for (std::size_t k = 0; k < moments.size(); ++k) {
      v += p.coeffs[k] * moments[k];
      d += p.diff[k] * moments[k];
    }
    const Complex scale = half * std::polar(1.0, t * mid);
    value += scale * v;
    diff += scale * d;
  }
  return {value, std::abs(diff), converged_};
}

Complex PiecewiseChebyshev::evaluate(double lambda) const {
  if (lambda < lo_ || lambda > hi_) return 0.0;
  auto it = std::upper_bound(panels_.begin(), panels_.end(), lambda,
                             [](double x, const Panel& p) { return x < p.lo; });
  if (it != panels_.begin()) --it;
  const Panel& p = *it;
  const double x = (2.0 * lambda - p.lo - p.hi) / (p.hi - p.lo);
  // Clenshaw recurrence.
  Complex b1 = 0.0;
  Complex b2 = 0.0;
  for (std::size_t k = p.coeffs.size(); k-- > 1;) {
    const Complex b0 = p.coeffs[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return p.coeffs[0] + x * b1 - b2;
}

NodeSet oscillatory_nodes(double lo, double hi, std::span<const double> breaks, double max_abs_t) {
  if (!(hi > lo)) throw DomainError("oscillatory_nodes: empty interval");
  std::vector<double> pts{lo};
  for (double b : breaks) {
    if (b > lo && b < hi) pts.push_back(b);
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  constexpr int kOrder = 24;
  // A half-phase of 8 radians keeps the Taylor tail of the exponential
  // within the exactness degree of the 24-point rule.
  constexpr double kHalfPhase = 8.0;
  const quad::Rule& rule = quad::gauss_legendre(kOrder);
  NodeSet set;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double width = pts[i + 1] - pts[i];
    if (width <= 0.0) continue;
    const int sub = std::max(1, static_cast<int>(std::ceil(0.5 * width * std::abs(max_abs_t) / kHalfPhase)));
    const double w = width / sub;
    for (int s = 0; s < sub; ++s) {
      const double mid = pts[i] + (s + 0.5) * w;
      for (int j = 0; j < kOrder; ++j) {
        set.nodes.push_back(mid + 0.5 * w * rule.nodes[j]);
        set.weights.push_back(0.5 * w * rule.weights[j]);
      }
    }
  }
  return set;
}

std::vector<Complex> uniform_sum(const NodeSet& set, std::span<const Complex> amplitude, double t0, double dt,
                                 std::size_t count) {
  if (amplitude.size() != set.nodes.size()) throw DomainError("uniform_sum: size mismatch");
  constexpr std::size_t kAnchor = 64;
  std::vector<Complex> out(count, Complex(0.0));
  for (std::size_t q = 0; q < set.nodes.size(); ++q) {
    const Complex a = set.weights[q] * amplitude[q];
    if (a == Complex(0.0)) continue;
    const double x = set.nodes[q];
    const Complex step = std::polar(1.0, dt * x);
    Complex z;
    for (std::size_t j = 0; j < count; ++j) {
      if (j % kAnchor == 0) z = a * std::polar(1.0, (t0 + static_cast<double>(j) * dt) * x);
      out[j] += z;
      z *= step;
    }
  }
  return out;
}

std::vector<Complex> sample_uniform(const PiecewiseChebyshev& fit, double t0, double dt, std::size_t count) {
  if (count == 0) return {};
  const double t_last = t0 + static_cast<double>(count - 1) * dt;
  const double max_t = std::max(std::abs(t0), std::abs(t_last));
  std::vector<double> breaks;
  for (const auto& p : fit.panels()) breaks.push_back(p.lo);
  const NodeSet set = oscillatory_nodes(fit.lo(), fit.hi(), breaks, max_t);
  std::vector<Complex> amp(set.nodes.size());
  for (std::size_t q = 0; q < amp.size(); ++q) amp[q] = fit.evaluate(set.nodes[q]);
  return uniform_sum(set, amp, t0, dt, count);
}

FftGrid make_fft_grid(double lo, double hi, double t0, double dt, std::size_t count, double window,
                      std::size_t min_samples) {
  if (count == 0) throw DomainError("make_fft_grid: empty time lattice");
  if (!(dt > 0.0)) throw DomainError("make_fft_grid: dt must be positive");
  if (!(hi > lo)) throw DomainError("make_fft_grid: empty lambda interval");
  FftGrid g;
  g.lo = lo;
  g.t0 = t0;
  g.dt = dt;
  g.count = count;
  const double t_last = t0 + static_cast<double>(count - 1) * dt;
  const double reach = std::max(std::abs(t0), std::abs(t_last));
  g.len = 1024;
  while (static_cast<double>(g.len) * dt < 2.0 * reach + 2.0 * std::max(window, 0.0) || g.len < count) g.len *= 2;
  g.dl = 2.0 * kPi / (static_cast<double>(g.len) * dt);
  g.m_count = static_cast<std::size_t>(std::ceil((hi - lo) / g.dl)) + 1;
  while (g.m_count > g.len || g.m_count < min_samples) {
    g.len *= 2;
    g.dl *= 0.5;
    g.m_count = static_cast<std::size_t>(std::ceil((hi - lo) / g.dl)) + 1;
  }
  return g;
}

std::vector<Complex> fft_transform(const FftGrid& g, std::span<const Complex> samples) {
  if (samples.size() != g.m_count) throw DomainError("fft_transform: sample count mismatch");
  static std::mutex plan_mutex;
  std::vector<Complex> buf(g.len, Complex(0.0));
  for (std::size_t m = 0; m < g.m_count; ++m) {
    buf[m] = g.dl * samples[m] * std::polar(1.0, g.t0 * static_cast<double>(m) * g.dl);
  }
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(g.len), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  std::vector<Complex> out(g.count);
  for (std::size_t j = 0; j < g.count; ++j) {
    const double t = g.t0 + static_cast<double>(j) * g.dt;
    out[j] = buf[j] * std::polar(1.0, t * g.lo);
  }
  return out;
}

std::vector<Complex> sample_uniform_fft(const PiecewiseChebyshev& fit, double t0, double dt, std::size_t count,
                                        double window) {
  if (count == 0) return {};
  const FftGrid g = make_fft_grid(fit.lo(), fit.hi(), t0, dt, count, window);
  std::vector<Complex> samples(g.m_count);
  for (std::size_t m = 0; m < g.m_count; ++m) samples[m] = fit.evaluate(g.lambda(m));
  return fft_transform(g, samples);
}

OscResult filon_cc(const Amplitude& amplitude, double t, const QuadConfig& cfg) {
  return fit(amplitude, cfg).integrate(t);
}

Complex adaptive_reference(const Amplitude& amplitude, double t, double tol) {
  validate(amplitude);
  const double width = amplitude.hi - amplitude.lo;
  if (std::abs(t) * width > 1e6) {
    throw DomainError("adaptive_reference: |t| * support width exceeds the 1e6 cost guard");
  }
  std::vector<double> cuts{amplitude.lo, amplitude.hi};
  for (double b : amplitude.breakpoints) {
    if (b > amplitude.lo && b < amplitude.hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Panels span at most three periods, giving >= 20 Kronrod points per period.
  const double max_panel = std::abs(t) > 0.0 ? 3.0 * 2.0 * kPi / std::abs(t) : width;
  std::vector<double> points{cuts.front()};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((cuts[i + 1] - cuts[i]) / max_panel)));
    for (int p = 1; p <= pieces; ++p) points.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * p / pieces);
  }

  auto f = [&](double x) { return std::polar(1.0, t * x) * amplitude.g(x); };
  struct Piece {
    double lo, hi;
    Complex value;
    double error, l1;
  };
  auto eval = [&](double lo, double hi) {
    double err = 0.0;
    double l1 = 0.0;
    const Complex v =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 0, 0.0, &err, &l1);
    return Piece{lo, hi, v, err, l1};
  };

  // Global bisection of the worst panel until the summed error estimate
  // falls below tol times the L1 norm of the integrand.
  std::vector<Piece> pieces;
  std::priority_queue<std::pair<double, std::size_t>> queue;
  double total_error = 0.0;
  double total_l1 = 0.0;
  auto push = [&](Piece&& p) {
    total_error += p.error;
    total_l1 += p.l1;
    queue.emplace(p.error, pieces.size());
    pieces.push_back(p);
  };
  for (std::size_t i = 0; i + 1 < points.size(); ++i) push(eval(points[i], points[i + 1]));
  const std::size_t max_pieces = 200000;
  while (total_error > std::max(tol, 1e-15) * total_l1 && pieces.size() < max_pieces) {
    const auto [err, idx] = queue.top();
    queue.pop();
    const Piece worst = pieces[idx];
    if (worst.hi - worst.lo < 1e-14 * width) break;
    total_error -= worst.error;
    total_l1 -= worst.l1;
    pieces[idx].value = 0.0;
    pieces[idx].error = 0.0;
    const double mid = 0.5 * (worst.lo + worst.hi);
    push(eval(worst.lo, mid));
    push(eval(mid, worst.hi));
  }
  Complex total = 0.0;
  for (const Piece& p : pieces) total += p.value;
  return total;
}

}  // namespace wavekernel::oscint
