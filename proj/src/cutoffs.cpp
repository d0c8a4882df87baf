#include "wavekernel/cutoffs.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wavekernel/oscint.hpp"
#include "wavekernel/quadrature.hpp"

namespace wavekernel {
namespace {

constexpr std::array<std::pair<Member, std::string_view>, 10> kNames{{
    {Member::Chi1, "chi1"},
    {Member::ChiA, "chi_a"},
    {Member::EtaA, "eta_a"},
    {Member::Phi, "phi"},
    {Member::Psi, "psi"},
    {Member::Psi1, "psi1"},
    {Member::Phi1, "phi1"},
    {Member::Phi1Tilde, "phi1_tilde"},
    {Member::PsiTilde, "psi_tilde"},
    {Member::Psi1Tilde, "psi1_tilde"},
}};

template <class T>
T lift(double c) {
  if constexpr (std::is_same_v<T, Jet>) {
    return Jet::constant(c);
  } else {
    return c;
  }
}

// m(x) = exp(-1/x) for x > 0.
template <class T>
T mollifier(const T& x) {
  using std::exp;
  if (value_of(x) <= 0.0) return lift<T>(0.0);
  return exp(-1.0 / x);
}

}  // namespace

Member parse_member(std::string_view name) {
  for (const auto& [m, n] : kNames) {
    if (n == name) return m;
  }
  throw DomainError("unknown cutoff member '" + std::string(name) + "'");
}

std::string_view member_name(Member m) {
  for (const auto& [mm, n] : kNames) {
    if (mm == m) return n;
  }
  return "?";
}

const std::vector<Member>& all_members() {
  static const std::vector<Member> members = [] {
    std::vector<Member> v;
    for (const auto& entry : kNames) v.push_back(entry.first);
    return v;
  }();
  return members;
}

CutoffFamily::CutoffFamily(CutoffParams params) : p_(params) {
  if (!(p_.a > 0.0) || !std::isfinite(p_.a)) throw DomainError("cutoffs: a must be positive");
  if (!(p_.psi_lo > 0.0) || !(4.0 * p_.psi_lo <= 2.0 * p_.psi_hi) || !std::isfinite(p_.psi_hi)) {
    throw DomainError("cutoffs: need 0 < psi_lo and 2 psi_lo <= psi_hi / 2");
  }
}

template <class T>
T CutoffFamily::chi1(const T& s) const {
  const double v = value_of(s);
  if (v <= 1.0) return lift<T>(0.0);
  if (v >= 2.0) return lift<T>(1.0);
  const T left = mollifier(s - 1.0);
  const T right = mollifier(2.0 - s);
  return left / (left + right);
}

template <class T>
T CutoffFamily::value(Member m, const T& s) const {
  using std::abs;
  using std::sqrt;
  const double v = value_of(s);
  const double lo = p_.psi_lo;
  const double hi = p_.psi_hi;
  auto psi = [&](const T& x) -> T {
    if (value_of(x) <= lo || value_of(x) >= hi) return lift<T>(0.0);
    return chi1(x / lo) * (1.0 - chi1(2.0 * x / hi));
  };
  auto psi1 = [&](const T& x) -> T {
    if (value_of(x) <= 0.5 * lo || value_of(x) >= 2.0 * hi) return lift<T>(0.0);
    return chi1(2.0 * x / lo) * (1.0 - chi1(x / hi));
  };
  switch (m) {
    case Member::Chi1:
      return chi1(s);
    case Member::ChiA:
      return chi1(s / p_.a);
    case Member::EtaA:
      if (v < 0.0) return lift<T>(0.0);
      return 1.0 - chi1(s / p_.a);
    case Member::Phi:
      return 1.0 - chi1(abs(s));
    case Member::Psi:
      return psi(s);
    case Member::Psi1:
      return psi1(s);
    case Member::Phi1:
      if (v <= 0.0) return lift<T>(0.0);
      return s * psi(s * s);
    case Member::Phi1Tilde: {
      const double rlo = std::sqrt(lo);
      const double rhi = std::sqrt(hi);
      if (v <= 0.5 * rlo || v >= 2.0 * rhi) return lift<T>(0.0);
      return chi1(2.0 * s / rlo) * (1.0 - chi1(s / rhi));
    }
    case Member::PsiTilde:
      if (v <= 0.0) return lift<T>(0.0);
      return sqrt(s) * psi(s);
    case Member::Psi1Tilde:
      if (v <= 0.5 * lo) return lift<T>(0.0);
      return psi1(s) / sqrt(s);
  }
  throw DomainError("cutoffs: unknown member");
}

template double CutoffFamily::value<double>(Member, const double&) const;
template Jet CutoffFamily::value<Jet>(Member, const Jet&) const;

double CutoffFamily::eval(Member m, double s, int derivative_order) const {
  if (!std::isfinite(s)) throw DomainError("cutoffs: non-finite argument");
  if (derivative_order < 0 || derivative_order > 2) {
    throw DomainError("cutoffs: derivative order must be 0, 1 or 2");
  }
  if (derivative_order == 0) return value(m, s);
  const Jet j = value(m, Jet::variable(s));
  return derivative_order == 1 ? j.d1 : j.d2;
}

std::pair<double, double> CutoffFamily::support(Member m) const {
  const double lo = p_.psi_lo;
  const double hi = p_.psi_hi;
  switch (m) {
    case Member::Chi1:
      return {1.0, INFINITY};
    case Member::ChiA:
      return {p_.a, INFINITY};
    case Member::EtaA:
      return {0.0, 2.0 * p_.a};
    case Member::Phi:
      return {0.0, 2.0};
    case Member::Psi:
    case Member::PsiTilde:
      return {lo, hi};
    case Member::Psi1:
    case Member::Psi1Tilde:
      return {0.5 * lo, 2.0 * hi};
    case Member::Phi1:
      return {std::sqrt(lo), std::sqrt(hi)};
    case Member::Phi1Tilde:
      return {0.5 * std::sqrt(lo), 2.0 * std::sqrt(hi)};
  }
  return {0.0, 0.0};
}

std::vector<double> CutoffFamily::knots(Member m) const {
  const double lo = p_.psi_lo;
  const double hi = p_.psi_hi;
  switch (m) {
    case Member::Chi1:
      return {1.0, 2.0};
    case Member::ChiA:
    case Member::EtaA:
      return {p_.a, 2.0 * p_.a};
    case Member::Phi:
      return {1.0, 2.0};
    case Member::Psi:
    case Member::PsiTilde:
      return {lo, 2.0 * lo, 0.5 * hi, hi};
    case Member::Psi1:
    case Member::Psi1Tilde:
      return {0.5 * lo, lo, hi, 2.0 * hi};
    case Member::Phi1:
      return {std::sqrt(lo), std::sqrt(2.0 * lo), std::sqrt(0.5 * hi), std::sqrt(hi)};
    case Member::Phi1Tilde: {
      const double rlo = std::sqrt(lo);
      const double rhi = std::sqrt(hi);
      return {0.5 * rlo, rlo, rhi, 2.0 * rhi};
    }
  }
  return {};
}

IdentityCheck CutoffFamily::dyadic_identity_check(double alpha, int n,
                                                  const std::vector<double>& sigma_grid,
                                                  double tol) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("dyadic_identity_check: alpha must be in (0, 1]");
  const double beta = alpha * (n + 1) / 4.0;
  IdentityCheck out;
  for (double sigma : sigma_grid) {
    if (!(sigma > 0.0)) throw DomainError("dyadic_identity_check: sigma must be positive");
    const double lhs = std::pow(sigma, -beta) * value(Member::EtaA, sigma);
    // psi_b(sigma theta) vanishes unless 1 < sigma theta < 2.
    const double th_lo = std::max(1.0 / p_.a, 1.0 / sigma);
    const double th_hi = 2.0 / sigma;
    double rhs = 0.0;
    double err = 0.0;
    if (th_lo < th_hi) {
      auto integrand = [&](double theta) {
        const double u = sigma * theta;
        const double psi_b = std::pow(u, 1.0 - beta) * eval(Member::Chi1, u, 1);
        return psi_b * std::pow(theta, beta - 1.0);
      };
      const double mid = 0.5 * (th_lo + th_hi);
      const std::vector<double> pts{th_lo, mid, th_hi};
      rhs = quad::adaptive_split(integrand, pts, tol, &err);
    }
    out.max_defect = std::max(out.max_defect, std::abs(lhs - rhs));
    if (err > 1e-9 * std::max(1.0, std::abs(lhs))) out.converged = false;
  }
  return out;
}

FourierL1 CutoffFamily::fourier_transform_l1(double h) const {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("fourier_transform_l1: h must be positive");
  const auto [s_lo, s_hi] = support(Member::Phi1);
  oscint::Amplitude amp;
  amp.g = [this, h](double lambda) { return Complex(value(Member::Phi1, h * lambda)); };
  amp.lo = s_lo / h;
  amp.hi = s_hi / h;
  for (double k : knots(Member::Phi1)) amp.breakpoints.push_back(k / h);
  amp.smoothness_hint = 2;
  const oscint::PiecewiseChebyshev fit = oscint::fit(amp, {1e-13, 16, 4000});

  // |phi_h^| is even in t for real phi_h; integrate over [0, T] and double.
  const quad::Rule& rule = quad::gauss_legendre(16);
  const double panel = 2.0 * h;
  auto integrate_range = [&](double a, double b) {
    const int panels = static_cast<int>(std::lround((b - a) / panel));
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * panel;
      double sum = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        sum += rule.weights[j] * std::abs(fit.integrate(mid + 0.5 * panel * rule.nodes[j]).value);
      }
      total += 0.5 * panel * sum;
    }
    return total;
  };

  double t_max = 64.0 * h;
  double total = integrate_range(0.0, t_max);
  const double limit = 8192.0 * h;
  while (true) {
    const double extra = integrate_range(t_max, 2.0 * t_max);
    total += extra;
    t_max *= 2.0;
    if (extra <= 1e-10 * total) {
      return {2.0 * total, t_max, 2.0 * extra};
    }
    if (t_max >= limit) {
      throw NumericalError("fourier_transform_l1: tail not converged at T = " + std::to_string(t_max),
                           2.0 * extra);
    }
  }
}

}  // namespace wavekernel
