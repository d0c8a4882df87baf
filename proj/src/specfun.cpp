#include "wavekernel/specfun.hpp"

#include <array>

namespace wavekernel::specfun {
namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kSeriesEps = 1e-17;

void require_nonnegative(double z, const char* what) {
  if (!(z >= 0.0)) throw DomainError(std::string(what) + ": argument must be >= 0");
}

void require_positive(double z, const char* what) {
  if (!(z > 0.0)) throw DomainError(std::string(what) + ": argument must be > 0");
}

// sum_k (-z^2/4)^k / (k! Gamma(nu+k+1)) * Gamma(nu+1), i.e. the normalised
// series of J_nu(z)/z^nu; `skip_first` drops the k = 0 term (value 1).
double normalized_j_series(double nu, double z, bool skip_first) {
  const double q = -0.25 * z * z;
  double term = 1.0;
  double sum = skip_first ? 0.0 : 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    if (std::abs(term) <= kSeriesEps * std::abs(sum) && k > 2) break;
  }
  return sum;
}

// Hankel asymptotic expansion: H^{+-}_nu(z) = sqrt(2/(pi z)) (P +- iQ) e^{+-i chi}.
struct PQ {
  double p;
  double q;
};

PQ hankel_pq(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;  // a_k / z^k, signed by the (-1)^{floor(k/2)} pattern below
  double prev = INFINITY;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * z);
    const double mag = std::abs(term);
    // Stop once terms start growing, but only after the minimum term count.
    if (k > 8 && mag > prev) break;
    const int r = k % 4;
    // P collects even k with signs +,-,+..., Q odd k with signs +,-,+...
    if (r == 0) p += term;
    if (r == 2) p -= term;
    if (r == 1) q += term;
    if (r == 3) q -= term;
    if (k > 8 && mag < kSeriesEps) break;
    prev = mag;
  }
  return {p, q};
}

// nu = 1 series pieces.
double j1_series(double z) { return 0.5 * z * normalized_j_series(1.0, z, false); }

// z*Y_1(z) + 2/pi, from the Neumann series with the singular term removed.
double zy1_plus_two_over_pi(double z) {
  const double q = -0.25 * z * z;
  // sum_k (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
  double psi_k1 = -kEulerGamma;        // psi(1)
  double psi_k2 = 1.0 - kEulerGamma;   // psi(2)
  double term = 1.0;                   // q^k / (k!(k+1)!)
  double sum = psi_k1 + psi_k2;
  for (int k = 1; k < 200; ++k) {
    term *= q / (k * (k + 1.0));
    psi_k1 += 1.0 / k;
    psi_k2 += 1.0 / (k + 1.0);
    const double add = (psi_k1 + psi_k2) * term;
    sum += add;
    if (std::abs(add) <= kSeriesEps * std::abs(sum) && k > 2) break;
  }
  return (2.0 / kPi) * z * j1_series(z) * std::log(0.5 * z) - z * z / (2.0 * kPi) * sum;
}

// e^{i theta} - 1 without cancellation.
Complex expm1_i(double theta) {
  const double s = std::sin(0.5 * theta);
  return {-2.0 * s * s, std::sin(theta)};
}

}  // namespace

double jnu_normalization(SpectralOrder order) {
  const double nu = order.nu();
  return std::pow(2.0, nu) * std::tgamma(nu + 1.0);
}

double bessel_j(SpectralOrder order, double z) {
  require_nonnegative(z, "bessel_j");
  if (order.half_integer()) {
    if (z < 0.5) return std::pow(z, 1.5) * jnu_over_power(order, z);
    return std::sqrt(2.0 / (kPi * z)) * (std::sin(z) / z - std::cos(z));
  }
  if (z <= kAsymptoticCrossover) return j1_series(z);
  const PQ pq = hankel_pq(1.0, z);
  const double chi = z - 0.75 * kPi;
  return std::sqrt(2.0 / (kPi * z)) * (pq.p * std::cos(chi) - pq.q * std::sin(chi));
}

double bessel_y(SpectralOrder order, double z) {
  require_positive(z, "bessel_y");
  if (order.half_integer()) {
    return -std::sqrt(2.0 / (kPi * z)) * (std::cos(z) / z + std::sin(z));
  }
  if (z <= kAsymptoticCrossover) return (zy1_plus_two_over_pi(z) - 2.0 / kPi) / z;
  const PQ pq = hankel_pq(1.0, z);
  const double chi = z - 0.75 * kPi;
  return std::sqrt(2.0 / (kPi * z)) * (pq.p * std::sin(chi) + pq.q * std::cos(chi));
}

double scaled_jnu(SpectralOrder order, double z) {
  require_nonnegative(z, "scaled_jnu");
  if (z == 0.0) return 0.0;
  if (order.half_integer()) {
    if (z < 0.5) return z * z * z * jnu_over_power(order, z);
    return std::sqrt(2.0 / kPi) * (std::sin(z) - z * std::cos(z));
  }
  return z * bessel_j(order, z);
}

double jnu_over_power(SpectralOrder order, double z) {
  require_nonnegative(z, "jnu_over_power");
  const double nu = order.nu();
  const double lead = 1.0 / jnu_normalization(order);
  if (order.half_integer()) {
    if (z < 0.5) return lead * normalized_j_series(nu, z, false);
    return std::sqrt(2.0 / kPi) * (std::sin(z) - z * std::cos(z)) / (z * z * z);
  }
  if (z <= kAsymptoticCrossover) return lead * normalized_j_series(nu, z, false);
  return bessel_j(order, z) / z;
}

double jnu_normalized_minus_one(SpectralOrder order, double z) {
  require_nonnegative(z, "jnu_normalized_minus_one");
  const double nu = order.nu();
  if (z < 2.0) return normalized_j_series(nu, z, true);
  return jnu_normalization(order) * jnu_over_power(order, z) - 1.0;
}

Complex hankel_zero_limit(SpectralOrder order, Sign sign) {
  const double nu = order.nu();
  const double mag = std::pow(2.0, nu) * std::tgamma(nu) / kPi;
  return {0.0, -sign_value(sign) * mag};
}

Complex scaled_hankel(SpectralOrder order, double z, Sign sign) {
  require_positive(z, "scaled_hankel");
  const double s = sign_value(sign);
  if (order.half_integer()) {
    // z^{3/2} H^{+-}_{3/2}(z) = -sqrt(2/pi) e^{+-iz} (z +- i)
    const Complex phase = std::polar(1.0, s * z);
    return -std::sqrt(2.0 / kPi) * phase * Complex(z, s);
  }
  if (z <= kAsymptoticCrossover) {
    return {z * j1_series(z), s * (zy1_plus_two_over_pi(z) - 2.0 / kPi)};
  }
  const PQ pq = hankel_pq(1.0, z);
  const double chi = z - 0.75 * kPi;
  return z * std::sqrt(2.0 / (kPi * z)) * Complex(pq.p, s * pq.q) * std::polar(1.0, s * chi);
}

Complex scaled_hankel_minus_zero(SpectralOrder order, double z, Sign sign) {
  require_nonnegative(z, "scaled_hankel_minus_zero");
  if (z == 0.0) return {0.0, 0.0};
  const double s = sign_value(sign);
  if (order.half_integer()) {
    if (z < 0.5) {
      // -sqrt(2/pi) sum_{p>=2} (si)^{p-1} (p-1) z^p / p!
      Complex sum = 0.0;
      Complex ipow = Complex(0.0, s);  // (si)^{p-1} at p = 2
      double zp_over_fact = z * z / 2.0;
      for (int p = 2; p < 60; ++p) {
        const Complex add = ipow * ((p - 1.0) * zp_over_fact);
        sum += add;
        if (std::abs(add) < kSeriesEps * std::abs(sum)) break;
        ipow *= Complex(0.0, s);
        zp_over_fact *= z / (p + 1.0);
      }
      return -std::sqrt(2.0 / kPi) * sum;
    }
    // z e^{+-iz} +- i (e^{+-iz} - 1), times -sqrt(2/pi)
    const Complex em1 = expm1_i(s * z);
    return -std::sqrt(2.0 / kPi) * (z * (1.0 + em1) + Complex(0.0, s) * em1);
  }
  if (z <= kAsymptoticCrossover) {
    return {z * j1_series(z), s * zy1_plus_two_over_pi(z)};
  }
  return scaled_hankel(order, z, sign) - hankel_zero_limit(order, sign);
}

Complex symbol_b_unchecked(SpectralOrder order, double z, Sign sign) {
  require_positive(z, "symbol_b");
  const double s = sign_value(sign);
  const double nu = order.nu();
  if (order.half_integer()) {
    return -0.5 * std::sqrt(2.0 / kPi) * Complex(z, s);
  }
  if (z <= kAsymptoticCrossover) {
    return 0.5 * scaled_hankel(order, z, sign) * std::polar(1.0, -s * z);
  }
  const PQ pq = hankel_pq(nu, z);
  const double shift = 0.5 * nu * kPi + 0.25 * kPi;
  return 0.5 * std::pow(z, nu) * std::sqrt(2.0 / (kPi * z)) * Complex(pq.p, s * pq.q) *
         std::polar(1.0, -s * shift);
}

Complex symbol_b(SpectralOrder order, double z, Sign sign) {
  if (!(z >= 1.0)) throw DomainError("symbol_b: argument must be >= 1");
  return symbol_b_unchecked(order, z, sign);
}

}  // namespace wavekernel::specfun
