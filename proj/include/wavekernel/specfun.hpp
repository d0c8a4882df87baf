#pragma once

// Bessel and Hankel functions of order nu = (n-2)/2 for n in {4, 5}, together
// with the scaled forms used by the radial wave kernels:
//
//   scaled J:      J_nu(z) z^nu
//   scaled Hankel: H^{+-}_nu(z) z^nu,  H^{+-} = J +- iY
//   symbol:        b^{+-}(z) = H^{+-}(z) z^nu e^{-+iz} / 2
//
// Integer order (nu = 1) uses the power series for z <= 12 and the Hankel
// asymptotic expansion beyond. Half-integer order (nu = 3/2) uses the
// elementary closed forms, switching to series where they cancel.

#include "wavekernel/common.hpp"

namespace wavekernel::specfun {

/// Crossover between series and asymptotic evaluation for integer order.
inline constexpr double kAsymptoticCrossover = 12.0;

double bessel_j(SpectralOrder order, double z);
double bessel_y(SpectralOrder order, double z);

/// z^nu J_nu(z).
double scaled_jnu(SpectralOrder order, double z);

/// J_nu(z) / z^nu, continuous at z = 0 with value 2^{-nu}/Gamma(nu+1).
double jnu_over_power(SpectralOrder order, double z);

/// 2^nu Gamma(nu+1) J_nu(z)/z^nu - 1, accurate for small z.
double jnu_normalized_minus_one(SpectralOrder order, double z);

/// 2^nu Gamma(nu+1), the normalisation making the previous quantity vanish at 0.
double jnu_normalization(SpectralOrder order);

/// z^nu H^{+-}_nu(z) for z > 0.
Complex scaled_hankel(SpectralOrder order, double z, Sign sign);

/// Limit of the scaled Hankel function at z = 0: -+ i 2^nu Gamma(nu) / pi.
Complex hankel_zero_limit(SpectralOrder order, Sign sign);

/// scaled_hankel(z) - hankel_zero_limit(), without cancellation at small z.
/// Defined for z >= 0 (zero at z = 0).
Complex scaled_hankel_minus_zero(SpectralOrder order, double z, Sign sign);

/// b^{+-}(z) = scaled_hankel(z) e^{-+iz} / 2 for z >= 1, so that
/// e^{iz} b^+(z) + e^{-iz} b^-(z) = scaled_jnu(z).
Complex symbol_b(SpectralOrder order, double z, Sign sign);

/// Same as symbol_b without the z >= 1 precondition (any z > 0). Used where
/// an amplitude is evaluated at the edge of its validity window.
Complex symbol_b_unchecked(SpectralOrder order, double z, Sign sign);

}  // namespace wavekernel::specfun
