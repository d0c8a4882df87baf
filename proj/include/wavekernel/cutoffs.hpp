#pragma once

// Smooth cutoff family built from m(x) = exp(-1/x).

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavekernel/common.hpp"
#include "wavekernel/jet.hpp"

namespace wavekernel {

enum class Member {
  Chi1,        // 0 for s <= 1, 1 for s >= 2
  ChiA,        // chi1(s / a)
  EtaA,        // 1 - chi_a on s > 0
  Phi,         // 1 on |mu| <= 1, 0 on |mu| >= 2
  Psi,         // bump on [psi_lo, psi_hi]
  Psi1,        // 1 on supp psi
  Phi1,        // lambda psi(lambda^2)
  Phi1Tilde,   // 1 on supp phi1
  PsiTilde,    // s^{1/2} psi(s)
  Psi1Tilde,   // s^{-1/2} psi1(s)
};

Member parse_member(std::string_view name);
std::string_view member_name(Member m);
const std::vector<Member>& all_members();

struct CutoffParams {
  double a = 0.125;
  double psi_lo = 0.25;
  double psi_hi = 2.0;
};

struct IdentityCheck {
  double max_defect = 0.0;
  bool converged = true;
};

struct FourierL1 {
  double value = 0.0;
  double t_max = 0.0;
  double tail_estimate = 0.0;
};

class CutoffFamily {
 public:
  explicit CutoffFamily(CutoffParams params = {});

  const CutoffParams& params() const { return p_; }
  double a() const { return p_.a; }

  /// Value or derivative (order 0, 1, 2) of a member at s.
  double eval(Member m, double s, int derivative_order = 0) const;
  double operator()(Member m, double s) const { return value(m, s); }

  template <class T>
  T value(Member m, const T& s) const;

  /// Closed support [lo, hi]; Phi is reported on the half line and EtaA on s >= 0.
  std::pair<double, double> support(Member m) const;
  /// Points where the member fails to be analytic.
  std::vector<double> knots(Member m) const;

  /// sup over the grid of | s^{-beta} eta_a(s) - int_{1/a}^inf psi_b(s theta) theta^beta dtheta/theta |
  /// with beta = alpha (n+1)/4 and psi_b(s) = s^{1-beta} chi1'(s).
  IdentityCheck dyadic_identity_check(double alpha, int n, const std::vector<double>& sigma_grid,
                                      double tol = 1e-12) const;

  /// int |phi_h^(t)| dt for phi_h(lambda) = phi1(h lambda), phi_h^(t) = int e^{it lambda} phi_h.
  FourierL1 fourier_transform_l1(double h) const;

 private:
  template <class T>
  T chi1(const T& s) const;
  CutoffParams p_;
};

}  // namespace wavekernel
