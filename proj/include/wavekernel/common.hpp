#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wavekernel {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a numerical procedure cannot reach its target accuracy.
/// Carries the best value obtained so the caller can decide what to do.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved = NAN)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Outgoing (+) or incoming (-) branch.
enum class Sign { Plus, Minus };

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }
inline const char* sign_name(Sign s) { return s == Sign::Plus ? "+" : "-"; }

/// Dimension n and the Bessel order nu = (n-2)/2 it induces.
class SpectralOrder {
 public:
  /// Only n = 4 and n = 5 are supported.
  static SpectralOrder for_dimension(int n) {
    if (n != 4 && n != 5) {
      throw DomainError("dimension n must be 4 or 5, got " + std::to_string(n));
    }
    return SpectralOrder(n);
  }

  int n() const { return n_; }
  double nu() const { return (n_ - 2) / 2.0; }
  double half_wave_exponent() const { return (n_ - 1) / 2.0; }
  double symbol_order() const { return (n_ - 3) / 2.0; }
  bool half_integer() const { return n_ % 2 == 1; }

  /// Surface area of the unit sphere S^{n-1}.
  double sphere_area() const {
    return 2.0 * std::pow(kPi, n_ / 2.0) / std::tgamma(n_ / 2.0);
  }
  /// Newtonian constant Gamma(n/2-1)/(4 pi^{n/2}) of (-Delta)^{-1}.
  double newton_constant() const {
    return std::tgamma(n_ / 2.0 - 1.0) / (4.0 * std::pow(kPi, n_ / 2.0));
  }

  friend bool operator==(SpectralOrder, SpectralOrder) = default;

 private:
  explicit SpectralOrder(int n) : n_(n) {}
  int n_;
};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace wavekernel
