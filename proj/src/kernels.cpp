#include "wavekernel/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "wavekernel/specfun.hpp"

namespace wavekernel::kernels {
namespace {

using oscint::Amplitude;
using oscint::PiecewiseChebyshev;

std::shared_ptr<const PiecewiseChebyshev> make_fit(const Amplitude& a, const oscint::QuadConfig& q) {
  return std::make_shared<const PiecewiseChebyshev>(oscint::fit(a, q));
}

std::vector<double> scaled_knots(const CutoffFamily& c, Member m, double h) {
  std::vector<double> k = c.knots(m);
  for (double& x : k) x /= h;
  return k;
}

// Integer order switches from series to asymptotics at z = kAsymptoticCrossover;
// the two agree to rounding only, so the fit gets a panel edge there.
void add_crossover(Amplitude& a, SpectralOrder o, double sigma) {
  if (o.half_integer() || !(sigma > 0.0)) return;
  const double b = specfun::kAsymptoticCrossover / sigma;
  if (b > a.lo && b < a.hi) {
    a.breakpoints.push_back(b);
    std::sort(a.breakpoints.begin(), a.breakpoints.end());
  }
}

void check_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("kernels: h must be positive");
}

}  // namespace

KernelSample KernelSlice::operator()(double t) const {
  KernelSample s;
  s.sigma = sigma_;
  s.t = t;
  s.h = h_;
  for (const Term& term : terms_) {
    const oscint::OscResult r = term.fit->integrate(t + term.shift);
    s.value += term.factor * r.value;
    s.err += std::abs(term.factor) * r.error;
    s.converged = s.converged && r.converged;
  }
  return s;
}

std::vector<Complex> KernelSlice::sample_uniform(double t0, double dt, std::size_t count) const {
  std::vector<Complex> out(count, Complex(0.0));
  for (const Term& term : terms_) {
    const std::vector<Complex> v = oscint::sample_uniform(*term.fit, t0 + term.shift, dt, count);
    for (std::size_t j = 0; j < count; ++j) out[j] += term.factor * v[j];
  }
  return out;
}

double KernelSlice::lambda_max() const {
  double m = 0.0;
  for (const Term& term : terms_) m = std::max(m, term.fit->hi());
  return m;
}

TimeIntegral time_integral(const KernelSlice& slice, double s, double dt, double rel_tol, int max_doublings) {
  if (!(s >= 0.0)) throw DomainError("time_integral: s must be >= 0");
  TimeIntegral out;
  if (slice.terms().empty()) return out;
  const double lmax = slice.lambda_max();
  if (!(lmax > 0.0)) return out;
  if (!(dt > 0.0)) dt = 0.25 / lmax;
  double shift = 0.0;
  for (const auto& term : slice.terms()) shift = std::max(shift, std::abs(term.shift));

  // Trapezoid sum of |t|^s |K| over the lattice j dt, |j| <= n.
  auto window_sum = [&](long n) {
    const std::size_t count = static_cast<std::size_t>(2 * n + 1);
    std::vector<Complex> v(count, Complex(0.0));
    for (const auto& term : slice.terms()) {
      const std::vector<Complex> w =
          oscint::sample_uniform_fft(*term.fit, -n * dt + term.shift, dt, count, n * dt);
      for (std::size_t j = 0; j < count; ++j) v[j] += term.factor * w[j];
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const double t = (static_cast<long>(j) - n) * dt;
      sum += std::pow(std::abs(t), s) * std::abs(v[j]);
    }
    return sum * dt;
  };

  long n = static_cast<long>(std::ceil((shift + 100.0 / lmax) / dt));
  double total = window_sum(n);
  out.converged = false;
  for (int d = 0; d <= max_doublings; ++d) {
    const double next = window_sum(2 * n);
    n *= 2;
    out.tail = next - total;
    total = next;
    if (std::abs(out.tail) <= rel_tol * total) {
      out.converged = true;
      break;
    }
  }
  out.value = total;
  out.extent = n * dt;
  return out;
}

bool KernelSlice::converged() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.fit->converged(); });
}

double split_threshold(const WaveKernelSpec& spec) {
  return spec.h / spec.cutoffs.support(Member::Phi1).first;
}

KernelSlice free_kernel_slice(const WaveKernelSpec& spec, double sigma, Method method) {
  check_h(spec.h);
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("K_h: sigma must be >= 0");
  if (method == Method::Auto) method = sigma >= split_threshold(spec) ? Method::Split : Method::Direct;
  if (method == Method::Split) {
    return KernelSlice(sigma, spec.h,
                       {free_kernel_split_slice(spec, sigma, Sign::Plus).terms().front(),
                        free_kernel_split_slice(spec, sigma, Sign::Minus).terms().front()});
  }
  const SpectralOrder o = spec.order;
  const double h = spec.h;
  const CutoffFamily& c = spec.cutoffs;
  const auto [lo, hi] = c.support(Member::Phi1);
  Amplitude a;
  a.g = [o, h, sigma, &c](double l) {
    return Complex(std::pow(l, 2.0 * o.nu() + 1.0) * specfun::jnu_over_power(o, sigma * l) *
                   c.eval(Member::Psi, h * h * l * l));
  };
  a.lo = lo / h;
  a.hi = hi / h;
  a.breakpoints = scaled_knots(c, Member::Phi1, h);
  a.smoothness_hint = 2;
  add_crossover(a, o, sigma);
  const double cn = std::pow(2.0 * kPi, -(o.nu() + 1.0));
  return KernelSlice(sigma, h, {{make_fit(a, spec.quad), 0.0, cn}});
}

KernelSample K_h(const WaveKernelSpec& spec, double sigma, double t, Method method) {
  return free_kernel_slice(spec, sigma, method)(t);
}

KernelSlice free_kernel_split_slice(const WaveKernelSpec& spec, double sigma, Sign sign) {
  check_h(spec.h);
  if (!(sigma >= split_threshold(spec))) {
    throw DomainError("K1_split: sigma = " + std::to_string(sigma) +
                      " is below the split threshold " + std::to_string(split_threshold(spec)));
  }
  const SpectralOrder o = spec.order;
  const double h = spec.h;
  const CutoffFamily& c = spec.cutoffs;
  const auto [lo, hi] = c.support(Member::Phi1);
  // lambda^{2nu+1} (sigma lambda)^{-2nu} = lambda sigma^{-2nu}
  Amplitude a;
  a.g = [o, h, sigma, sign, &c](double l) {
    return l * specfun::symbol_b_unchecked(o, sigma * l, sign) * c.eval(Member::Psi, h * h * l * l);
  };
  a.lo = lo / h;
  a.hi = hi / h;
  a.breakpoints = scaled_knots(c, Member::Phi1, h);
  a.smoothness_hint = 2;
  add_crossover(a, o, sigma);
  const double factor = std::pow(2.0 * kPi, -(o.nu() + 1.0)) * std::pow(sigma, -2.0 * o.nu());
  return KernelSlice(sigma, h, {{make_fit(a, spec.quad), sign_value(sign) * sigma, factor}});
}

KernelSample K1_split(const WaveKernelSpec& spec, double sigma, double t, Sign sign) {
  return free_kernel_split_slice(spec, sigma, sign)(t);
}

Complex resolvent_prefactor(SpectralOrder order, Sign sign) {
  return sign_value(sign) * Complex(0.0, 0.25) * std::pow(2.0 * kPi, -order.nu());
}

Complex resolvent_kernel(SpectralOrder order, double lambda, double r, Sign sign) {
  if (!(r > 0.0)) throw DomainError("resolvent_kernel: r must be positive");
  if (!(lambda >= 0.0)) throw DomainError("resolvent_kernel: lambda must be >= 0");
  const Complex h = lambda == 0.0 ? specfun::hankel_zero_limit(order, sign)
                                  : specfun::scaled_hankel(order, lambda * r, sign);
  return resolvent_prefactor(order, sign) * std::pow(r, 2.0 - order.n()) * h;
}

Complex averaged_resolvent_difference(SpectralOrder order, double lambda, double r, double rho, Sign sign) {
  if (!(r > 0.0) || !(rho > 0.0)) throw DomainError("averaged_resolvent: radii must be positive");
  if (!(lambda >= 0.0)) throw DomainError("averaged_resolvent: lambda must be >= 0");
  const double r_small = std::min(r, rho);
  const double r_large = std::max(r, rho);
  const double kj = specfun::jnu_normalization(order) * specfun::jnu_over_power(order, lambda * r_small);
  const double kj_minus_one = specfun::jnu_normalized_minus_one(order, lambda * r_small);
  const Complex diff = specfun::scaled_hankel_minus_zero(order, lambda * r_large, sign);
  const Complex h0 = specfun::hankel_zero_limit(order, sign);
  return resolvent_prefactor(order, sign) * std::pow(r_large, 2.0 - order.n()) *
         (kj * diff + kj_minus_one * h0);
}

Complex averaged_resolvent(SpectralOrder order, double lambda, double r, double rho, Sign sign) {
  if (!(r > 0.0) || !(rho > 0.0)) throw DomainError("averaged_resolvent: radii must be positive");
  const double r_small = std::min(r, rho);
  const double r_large = std::max(r, rho);
  const double kj = specfun::jnu_normalization(order) * specfun::jnu_over_power(order, lambda * r_small);
  const Complex h = lambda == 0.0 ? specfun::hankel_zero_limit(order, sign)
                                  : specfun::scaled_hankel(order, lambda * r_large, sign);
  return resolvent_prefactor(order, sign) * std::pow(r_large, 2.0 - order.n()) * kj * h;
}

namespace {

Amplitude phi_tilde_amplitude(const WaveKernelSpec& spec) {
  const CutoffFamily& c = spec.cutoffs;
  const auto [lo, hi] = c.support(Member::Phi1Tilde);
  Amplitude a;
  a.lo = lo / spec.h;
  a.hi = hi / spec.h;
  a.breakpoints = scaled_knots(c, Member::Phi1Tilde, spec.h);
  a.smoothness_hint = 2;
  return a;
}

}  // namespace

KernelSlice a_kernel_slice(const WaveKernelSpec& spec, double sigma, Sign sign, Method method) {
  check_h(spec.h);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("A_h: sigma must be positive");
  const SpectralOrder o = spec.order;
  const double h = spec.h;
  const CutoffFamily& c = spec.cutoffs;
  const Complex pref = resolvent_prefactor(o, sign) * std::pow(sigma, 2.0 - o.n());
  Amplitude a = phi_tilde_amplitude(spec);
  add_crossover(a, o, sigma);
  if (method == Method::Auto) method = sigma * a.lo >= 1.0 ? Method::Split : Method::Direct;
  if (method == Method::Direct) {
    a.g = [o, h, sigma, sign, &c](double l) {
      return c.eval(Member::Phi1Tilde, h * l) * specfun::scaled_hankel_minus_zero(o, sigma * l, sign);
    };
    return KernelSlice(sigma, h, {{make_fit(a, spec.quad), 0.0, pref}});
  }
  // H(z) = 2 e^{+-iz} b(z): oscillating part with shifted phase, plus the constant -H(0).
  Amplitude osc = a;
  osc.g = [o, h, sigma, sign, &c](double l) {
    return 2.0 * c.eval(Member::Phi1Tilde, h * l) * specfun::symbol_b_unchecked(o, sigma * l, sign);
  };
  Amplitude flat = a;
  flat.g = [h, &c](double l) { return Complex(c.eval(Member::Phi1Tilde, h * l)); };
  return KernelSlice(sigma, h,
                     {{make_fit(osc, spec.quad), sign_value(sign) * sigma, pref},
                      {make_fit(flat, spec.quad), 0.0, -pref * specfun::hankel_zero_limit(o, sign)}});
}

KernelSample A_h_pm(const WaveKernelSpec& spec, double sigma, double t, Sign sign, Method method) {
  return a_kernel_slice(spec, sigma, sign, method)(t);
}

KernelSlice a_hankel_part_slice(const WaveKernelSpec& spec, double sigma, Sign sign) {
  check_h(spec.h);
  if (!(sigma > 0.0)) throw DomainError("A_h: sigma must be positive");
  const SpectralOrder o = spec.order;
  const double h = spec.h;
  const CutoffFamily& c = spec.cutoffs;
  Amplitude a = phi_tilde_amplitude(spec);
  add_crossover(a, o, sigma);
  a.g = [o, h, sigma, sign, &c](double l) {
    return c.eval(Member::Phi1Tilde, h * l) * specfun::scaled_hankel(o, sigma * l, sign);
  };
  const Complex pref = resolvent_prefactor(o, sign) * std::pow(sigma, 2.0 - o.n());
  return KernelSlice(sigma, h, {{make_fit(a, spec.quad), 0.0, pref}});
}

KernelSlice cutoff_transform_slice(const WaveKernelSpec& spec, bool tilde) {
  check_h(spec.h);
  const Member m = tilde ? Member::Phi1Tilde : Member::Phi1;
  const CutoffFamily& c = spec.cutoffs;
  const double h = spec.h;
  const auto [lo, hi] = c.support(m);
  Amplitude a;
  a.g = [m, h, &c](double l) { return Complex(c.eval(m, h * l)); };
  a.lo = lo / h;
  a.hi = hi / h;
  a.breakpoints = scaled_knots(c, m, h);
  a.smoothness_hint = 2;
  return KernelSlice(0.0, h, {{make_fit(a, spec.quad), 0.0, 1.0}});
}

AppendixVariant parse_variant(const std::string& name) {
  if (name == "full") return AppendixVariant::Full;
  if (name == "K1") return AppendixVariant::K1;
  if (name == "K2") return AppendixVariant::K2;
  if (name == "K2+") return AppendixVariant::K2Plus;
  if (name == "K2-") return AppendixVariant::K2Minus;
  throw DomainError("unknown kernel variant '" + name + "'");
}

const char* variant_name(AppendixVariant v) {
  switch (v) {
    case AppendixVariant::Full:
      return "full";
    case AppendixVariant::K1:
      return "K1";
    case AppendixVariant::K2:
      return "K2";
    case AppendixVariant::K2Plus:
      return "K2+";
    case AppendixVariant::K2Minus:
      return "K2-";
  }
  return "?";
}

double appendix_constant(SpectralOrder order) { return std::pow(2.0 * kPi, -(order.nu() + 1.0)); }

double g_function(SpectralOrder order, const CutoffFamily& cutoffs, double z) {
  return cutoffs.eval(Member::Phi, z) * specfun::jnu_over_power(order, z);
}

KernelSlice appendix_slice(const AppendixSpec& spec, double sigma, AppendixVariant variant) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("appendix_K: sigma must be >= 0");
  if (spec.epsilon < 0.0 || spec.epsilon > 0.1) throw DomainError("appendix_K: epsilon must be in [0, 0.1]");
  const SpectralOrder o = spec.order;
  const CutoffFamily& c = spec.cutoffs;
  // sigma^{2-n} Jnu(sigma lambda) lambda^{1-(n+1)/2} = lambda^p (J_nu/z^nu)(sigma lambda)
  const double p = (o.n() - 3) / 2.0 + 2.0 * spec.epsilon;
  const double top = std::sqrt(2.0 * c.a());
  const double cn = appendix_constant(o);

  Amplitude a;
  a.lo = 0.0;
  a.hi = top;
  a.breakpoints = {std::sqrt(c.a())};
  a.smoothness_hint = 1;
  if (sigma > 0.0) {
    a.breakpoints.push_back(1.0 / sigma);
    a.breakpoints.push_back(2.0 / sigma);
  }
  add_crossover(a, o, sigma);
  auto eta = [&c](double l) { return c.eval(Member::EtaA, l * l); };

  switch (variant) {
    case AppendixVariant::Full:
      a.g = [=](double l) { return Complex(std::pow(l, p) * eta(l) * specfun::jnu_over_power(o, sigma * l)); };
      break;
    case AppendixVariant::K1:
      if (sigma > 0.0) a.hi = std::min(top, 2.0 / sigma);
      a.g = [=, &c](double l) { return Complex(std::pow(l, p) * eta(l) * g_function(o, c, sigma * l)); };
      break;
    case AppendixVariant::K2:
    case AppendixVariant::K2Plus:
    case AppendixVariant::K2Minus: {
      if (sigma == 0.0 || 1.0 / sigma >= top) return KernelSlice(sigma, 1.0, {});
      a.lo = 1.0 / sigma;
      if (variant == AppendixVariant::K2) {
        a.g = [=, &c](double l) {
          return Complex(std::pow(l, p) * eta(l) * (1.0 - c.eval(Member::Phi, sigma * l)) *
                         specfun::jnu_over_power(o, sigma * l));
        };
        break;
      }
      const Sign sign = variant == AppendixVariant::K2Plus ? Sign::Plus : Sign::Minus;
      a.g = [=, &c](double l) {
        const double z = sigma * l;
        return std::pow(l, p) * eta(l) * (1.0 - c.eval(Member::Phi, z)) * std::pow(z, -2.0 * o.nu()) *
               specfun::symbol_b(o, std::max(z, 1.0), sign);
      };
      return KernelSlice(sigma, 1.0, {{make_fit(a, spec.quad), sign_value(sign) * sigma, cn}});
    }
  }
  return KernelSlice(sigma, 1.0, {{make_fit(a, spec.quad), 0.0, cn}});
}

KernelSample appendix_K(const AppendixSpec& spec, double sigma, double t, AppendixVariant variant) {
  return appendix_slice(spec, sigma, variant)(t);
}

KernelSlice lemma_a2_slice(const AppendixSpec& spec, double sigma, double k) {
  if (!(k >= 1.0)) throw DomainError("lemma_a2: k must be >= 1");
  if (!(sigma >= 0.0)) throw DomainError("lemma_a2: sigma must be >= 0");
  const SpectralOrder o = spec.order;
  const CutoffFamily& c = spec.cutoffs;
  Amplitude a;
  a.lo = 0.0;
  a.hi = std::sqrt(2.0 * c.a());
  if (sigma > 0.0) a.hi = std::min(a.hi, 2.0 / sigma);
  a.breakpoints = {std::sqrt(c.a())};
  if (sigma > 0.0) a.breakpoints.push_back(1.0 / sigma);
  add_crossover(a, o, sigma);
  a.g = [=, &c](double l) {
    return Complex(std::pow(l, k - 1.0) * c.eval(Member::EtaA, l * l) * g_function(o, c, sigma * l));
  };
  return KernelSlice(sigma, 1.0, {{make_fit(a, spec.quad), 0.0, 1.0}});
}

}  // namespace wavekernel::kernels
