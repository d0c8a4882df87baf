#include "wavekernel/verify.hpp"

#include <algorithm>
#include <cmath>

namespace wavekernel::verify {
namespace {

std::vector<double> evaluate_row(const kernels::KernelSlice& slice, const std::vector<double>& ts) {
  std::vector<double> out(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) out[j] = std::abs(slice(ts[j]).value);
  return out;
}

Range extended(const Range& r, int e) {
  if (e == 0 || r.points <= 1) return r;
  Range out = r;
  const double factor = std::pow(2.0, e);
  out.hi = r.hi * factor;
  if (r.log_spaced) {
    const double per_unit = (r.points - 1) / std::log(r.hi / r.lo);
    out.points = static_cast<int>(std::ceil(per_unit * std::log(out.hi / out.lo))) + 1;
  } else {
    const double spacing = (r.hi - r.lo) / (r.points - 1);
    out.points = static_cast<int>(std::ceil((out.hi - out.lo) / spacing)) + 1;
  }
  return out;
}

struct Sweep {
  BoundLevel level;
  std::vector<double> profile;
};

Sweep sweep(const BoundSpec& b, const RowSampler& q, const Range& sr, const Range& tr, int level) {
  const std::vector<double> sigmas = range_points(sr, level);
  const std::vector<double> all_t = range_points(tr, level);
  Sweep out;
  out.profile.assign(sigmas.size(), 0.0);
  for (double h : b.h_values) {
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      const double sigma = sigmas[i];
      std::vector<double> ts;
      for (double t : all_t) {
        if (!b.region || b.region(sigma, t)) ts.push_back(t);
      }
      if (ts.empty()) continue;
      const std::vector<double> row = q(sigma, h, ts);
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const double w = b.weight(sigma, ts[j], h);
        if (!(w > 0.0)) throw DomainError(b.name + ": bound weight must be positive");
        const double ratio = row[j] / w;
        ++out.level.samples;
        out.profile[i] = std::max(out.profile[i], ratio);
        if (ratio > out.level.sup_ratio) {
          out.level.sup_ratio = ratio;
          out.level.arg_sigma = sigma;
          out.level.arg_t = ts[j];
          out.level.arg_h = h;
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> range_points(const Range& r, int level) {
  if (r.points < 1 || level < 0) throw DomainError("range_points: bad point count or level");
  if (r.points == 1) return {r.lo};
  if (!(r.hi > r.lo)) throw DomainError("range_points: empty range");
  if (r.log_spaced && !(r.lo > 0.0)) throw DomainError("range_points: log range must be positive");
  const int count = (r.points - 1) * (1 << level) + 1;
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double u = static_cast<double>(i) / (count - 1);
    out[i] = r.log_spaced ? r.lo * std::pow(r.hi / r.lo, u) : r.lo + (r.hi - r.lo) * u;
  }
  out.back() = r.hi;
  return out;
}

double relative_change(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : std::abs(b - a) / m;
}

BoundReport sup_ratio(const BoundSpec& b, const RowSampler& q) {
  if (b.levels < 3) throw DomainError(b.name + ": at least three refinement levels are required");
  if (!b.weight) throw DomainError(b.name + ": missing bound weight");
  BoundReport rep;
  rep.name = b.name;
  for (int level = 0; level < b.levels; ++level) {
    Sweep s = sweep(b, q, b.sigma, b.t, level);
    rep.levels.push_back(s.level);
    if (level + 1 == b.levels) {
      rep.profile_sigma = range_points(b.sigma, level);
      rep.profile_ratio = std::move(s.profile);
    }
  }
  const std::size_t m = rep.levels.size();
  rep.relative_change = relative_change(rep.levels[m - 2].sup_ratio, rep.levels[m - 1].sup_ratio);
  rep.constant = rep.levels[m - 1].sup_ratio;
  rep.stable = rep.relative_change < kStabilityTolerance;
  if (b.extensions > 0) {
    for (int e = 0; e <= b.extensions; ++e) {
      rep.extensions.push_back(sweep(b, q, extended(b.sigma, e), extended(b.t, e), 0).level);
    }
    const std::size_t k = rep.extensions.size();
    rep.extension_change = relative_change(rep.extensions[k - 2].sup_ratio, rep.extensions[k - 1].sup_ratio);
    rep.stable = rep.stable && rep.extension_change < kStabilityTolerance;
  }
  return rep;
}

RowSampler free_kernel_sampler(const kernels::WaveKernelSpec& base) {
  return [base](double sigma, double h, const std::vector<double>& ts) {
    kernels::WaveKernelSpec spec = base;
    spec.h = h;
    return evaluate_row(kernels::free_kernel_slice(spec, sigma), ts);
  };
}

RowSampler a_kernel_sampler(const kernels::WaveKernelSpec& base, Sign sign) {
  return [base, sign](double sigma, double h, const std::vector<double>& ts) {
    kernels::WaveKernelSpec spec = base;
    spec.h = h;
    return evaluate_row(kernels::a_kernel_slice(spec, sigma, sign), ts);
  };
}

RowSampler appendix_sampler(const kernels::AppendixSpec& spec, kernels::AppendixVariant variant) {
  return [spec, variant](double sigma, double, const std::vector<double>& ts) {
    return evaluate_row(kernels::appendix_slice(spec, sigma, variant), ts);
  };
}

RowSampler lemma_a2_sampler(const kernels::AppendixSpec& spec, double k) {
  return [spec, k](double sigma, double, const std::vector<double>& ts) {
    return evaluate_row(kernels::lemma_a2_slice(spec, sigma, k), ts);
  };
}

std::vector<double> sup_over_sigma(const RowSampler& q, double sigma_lo, double sigma_hi, int points, double h,
                                   const std::vector<double>& ts, double cone_halfwidth) {
  const std::vector<double> sigmas = range_points(Range{sigma_lo, sigma_hi, points, true}, 0);
  std::vector<double> best(ts.size(), 0.0);
  std::vector<double> arg(ts.size(), sigma_lo);
  for (double sg : sigmas) {
    const std::vector<double> row = q(sg, h, ts);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (row[j] > best[j]) {
        best[j] = row[j];
        arg[j] = sg;
      }
    }
  }
  const double step = 0.25 * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const std::vector<double> tj{ts[j]};
    auto f = [&](double sg) { return q(sg, h, tj)[0]; };
    if (cone_halfwidth > 0.0) {
      const double c = std::abs(ts[j]);
      for (double sg = std::max(sigma_lo, c - cone_halfwidth * h); sg <= std::min(sigma_hi, c + cone_halfwidth * h);
           sg += step) {
        const double v = f(sg);
        if (v > best[j]) {
          best[j] = v;
          arg[j] = sg;
        }
      }
    }
    // Golden-section search between the neighbours of the best point.
    const auto it = std::lower_bound(sigmas.begin(), sigmas.end(), arg[j]);
    const std::size_t k = static_cast<std::size_t>(it - sigmas.begin());
    double a = std::max(sigma_lo, std::min(arg[j] - step, k > 0 ? sigmas[k - 1] : sigma_lo));
    double b = std::min(sigma_hi, std::max(arg[j] + step, k + 1 < sigmas.size() ? sigmas[k + 1] : sigma_hi));
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int iter = 0; iter < 20; ++iter) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = f(d);
      }
    }
    best[j] = std::max({best[j], fc, fd});
  }
  return best;
}

RowSampler sup_sigma_sampler(RowSampler q, double sigma_lo, double sigma_hi, int points) {
  return [q = std::move(q), sigma_lo, sigma_hi, points](double, double h, const std::vector<double>& ts) {
    return sup_over_sigma(q, sigma_lo, sigma_hi, points, h, ts);
  };
}

RowSampler interval_sup_sampler(RowSampler q, SigmaIntervals intervals, int points) {
  return [q = std::move(q), intervals = std::move(intervals), points](double, double h,
                                                                       const std::vector<double>& ts) {
    std::vector<double> out(ts.size(), 0.0);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      for (const auto& [lo, hi] : intervals(ts[j])) {
        if (!(hi > lo)) continue;
        out[j] = std::max(out[j], sup_over_sigma(q, lo, hi, points, h, {ts[j]})[0]);
      }
    }
    return out;
  };
}

double time_bound_weight(TimeBound bound, SpectralOrder order, double sigma, double s, double h) {
  const int n = order.n();
  const double half = (n - 1) / 2.0;
  if (bound == TimeBound::FreeKernel) return std::pow(h, -half) * std::pow(sigma, s - half);
  if (bound == TimeBound::AKernelSmallSigma) return std::pow(h, -0.5) * std::pow(sigma, 2.5 - n);
  return std::pow(h, -0.5) * (std::pow(sigma, 2.5 - n) + std::pow(sigma, -half));
}

namespace {

kernels::KernelSlice bound_slice(TimeBound bound, const kernels::WaveKernelSpec& spec, double sigma, Sign sign) {
  return bound == TimeBound::FreeKernel ? kernels::free_kernel_slice(spec, sigma)
                                        : kernels::a_kernel_slice(spec, sigma, sign);
}

}  // namespace

double kernel_time_integral(TimeBound bound, const kernels::WaveKernelSpec& spec, double sigma, double s, Sign sign) {
  const kernels::TimeIntegral ti = kernels::time_integral(bound_slice(bound, spec, sigma, sign), s);
  if (!ti.converged) throw NumericalError("time integral tail not converged", ti.value);
  return ti.value;
}

BoundReport time_integral_bound(TimeBound bound, const kernels::WaveKernelSpec& spec, const Range& sigma, double s,
                                int levels, Sign sign, int extensions, bool extend_upper) {
  const double half = spec.order.half_wave_exponent();
  if (bound == TimeBound::FreeKernel && !(s >= 0.0 && s <= half)) {
    throw DomainError("time_integral_bound: s must lie in [0, (n-1)/2]");
  }
  if (levels < 3) throw DomainError("time_integral_bound: at least three refinement levels are required");
  if (!sigma.log_spaced) throw DomainError("time_integral_bound: the sigma range must be log spaced");
  BoundReport rep;
  rep.name = bound == TimeBound::FreeKernel          ? "free kernel time integral"
             : bound == TimeBound::AKernelSmallSigma ? "A kernel time integral, small sigma"
                                                     : "A kernel time integral";
  auto run = [&](const Range& r, int level, std::vector<double>* profile) {
    BoundLevel lv;
    for (double sg : range_points(r, level)) {
      const kernels::KernelSlice slice = bound_slice(bound, spec, sg, sign);
      const double dt = 0.5 / slice.lambda_max() / std::pow(2.0, level);
      const kernels::TimeIntegral ti = kernels::time_integral(slice, s, dt);
      if (!ti.converged) {
        throw NumericalError(rep.name + ": tail not converged at sigma = " + std::to_string(sg), ti.value);
      }
      const double ratio = ti.value / time_bound_weight(bound, spec.order, sg, s, spec.h);
      if (profile) profile->push_back(ratio);
      ++lv.samples;
      if (ratio > lv.sup_ratio) {
        lv.sup_ratio = ratio;
        lv.arg_sigma = sg;
        lv.arg_h = spec.h;
      }
    }
    return lv;
  };
  for (int level = 0; level < levels; ++level) {
    std::vector<double> profile;
    rep.levels.push_back(run(sigma, level, &profile));
    if (level + 1 == levels) {
      rep.profile_sigma = range_points(sigma, level);
      rep.profile_ratio = std::move(profile);
    }
  }
  const std::size_t m = rep.levels.size();
  rep.relative_change = relative_change(rep.levels[m - 2].sup_ratio, rep.levels[m - 1].sup_ratio);
  rep.constant = rep.levels[m - 1].sup_ratio;
  rep.stable = rep.relative_change < kStabilityTolerance;
  if (extensions > 0) {
    const double per_unit = (sigma.points - 1) / std::log(sigma.hi / sigma.lo);
    for (int e = 0; e <= extensions; ++e) {
      Range r = sigma;
      r.lo = sigma.lo / std::pow(2.0, e);
      if (extend_upper) r.hi = sigma.hi * std::pow(2.0, e);
      r.points = static_cast<int>(std::ceil(per_unit * std::log(r.hi / r.lo))) + 1;
      rep.extensions.push_back(run(r, 0, nullptr));
    }
    const std::size_t k = rep.extensions.size();
    rep.extension_change = relative_change(rep.extensions[k - 2].sup_ratio, rep.extensions[k - 1].sup_ratio);
    rep.stable = rep.stable && rep.extension_change < kStabilityTolerance;
  }
  return rep;
}

DecayFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw DomainError("fit_power_law: size mismatch");
  if (xs.size() < 2) throw DomainError("fit_power_law: fewer than two samples");
  std::vector<double> x(xs.size());
  std::vector<double> y(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw DomainError("fit_power_law: non-positive sample at x = " + std::to_string(xs[i]));
    }
    x[i] = std::log(xs[i]);
    y[i] = std::log(ys[i]);
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_power_law: all samples at one abscissa");
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  fit.t_lo = *std::min_element(xs.begin(), xs.end());
  fit.t_hi = *std::max_element(xs.begin(), xs.end());
  fit.samples = x.size();
  return fit;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& q, double t_lo, double t_hi,
                   bool log_correction) {
  if (t.size() != q.size()) throw DomainError("fit_decay: size mismatch");
  if (t_lo < 5.0) throw DomainError("fit_decay: the window must exclude t < 5");
  if (!(t_hi > t_lo)) throw DomainError("fit_decay: empty window");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(q[i] > 0.0)) throw DomainError("fit_decay: non-positive sample at t = " + std::to_string(t[i]));
    x.push_back(t[i]);
    y.push_back(log_correction ? q[i] / std::log(t[i] + 2.0) : q[i]);
  }
  if (x.size() < 2) throw DomainError("fit_decay: fewer than two samples in the window");
  DecayFit fit = fit_power_law(x, y);
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.log_correction = log_correction;
  return fit;
}

DecayFit fit_decay(const std::function<double(double)>& quantity, double t_lo, double t_hi, int points,
                   bool log_correction) {
  const std::vector<double> ts = range_points(Range{t_lo, t_hi, points, true}, 0);
  std::vector<double> qs(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) qs[i] = quantity(ts[i]);
  return fit_decay(ts, qs, t_lo, t_hi, log_correction);
}

BoundReport lemma_A2_check(const kernels::AppendixSpec& spec, double k, const Range& sigma, const Range& t,
                           int levels) {
  BoundSpec b;
  b.name = "oscillatory integral with g(sigma lambda), k = " + std::to_string(k);
  b.weight = [k](double, double tt, double) { return std::pow(std::abs(tt), -k); };
  b.sigma = sigma;
  b.t = t;
  b.levels = levels;
  return sup_ratio(b, lemma_a2_sampler(spec, k));
}

}  // namespace wavekernel::verify
