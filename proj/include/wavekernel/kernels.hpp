#pragma once

// Radial wave kernels as oscillatory integrals in the spectral variable.
//
// Every kernel below is a finite sum of terms
//     factor * int e^{i (t + shift) lambda} g(lambda) d lambda
// with a compactly supported amplitude g. A KernelSlice holds the Chebyshev
// fits of those amplitudes for one (sigma, h), so evaluating many t is cheap.

#include <memory>
#include <string>
#include <vector>

#include "wavekernel/common.hpp"
#include "wavekernel/cutoffs.hpp"
#include "wavekernel/oscint.hpp"

namespace wavekernel::kernels {

struct WaveKernelSpec {
  SpectralOrder order = SpectralOrder::for_dimension(4);
  CutoffFamily cutoffs{};
  double h = 1.0;
  oscint::QuadConfig quad{};
};

struct KernelSample {
  double sigma = 0.0;
  double t = 0.0;
  double h = 1.0;
  Complex value;
  double err = 0.0;
  bool converged = true;
};

/// How the Bessel factor is treated: Direct integrates J_nu(sigma lambda)
/// as is; Split writes it as e^{i z} b^+ + e^{-i z} b^- and moves the
/// exponentials into the phase. Auto splits when sigma * lambda >= 1 on the
/// whole amplitude support.
enum class Method { Auto, Direct, Split };

class KernelSlice {
 public:
  struct Term {
    std::shared_ptr<const oscint::PiecewiseChebyshev> fit;
    double shift = 0.0;
    Complex factor = 1.0;
  };

  KernelSlice(double sigma, double h, std::vector<Term> terms)
      : sigma_(sigma), h_(h), terms_(std::move(terms)) {}

  KernelSample operator()(double t) const;
  /// Values at t_j = t0 + j dt, j < count.
  std::vector<Complex> sample_uniform(double t0, double dt, std::size_t count) const;
  /// Largest lambda in any amplitude support.
  double lambda_max() const;
  double sigma() const { return sigma_; }
  double h() const { return h_; }
  bool converged() const;
  const std::vector<Term>& terms() const { return terms_; }

 private:
  double sigma_;
  double h_;
  std::vector<Term> terms_;
};

struct TimeIntegral {
  double value = 0.0;
  double extent = 0.0;  // the window was [-extent, extent]
  double tail = 0.0;    // contribution of the last window extension
  bool converged = true;
};

/// int |t|^s |slice(t)| dt by the trapezoid rule on a lattice of spacing dt
/// (dt <= 0 picks 0.25 / lambda_max). The window starts at the largest phase
/// shift plus 100 / lambda_max and doubles until an extension adds less than
/// rel_tol of the total, at most `max_doublings` times.
TimeIntegral time_integral(const KernelSlice& slice, double s, double dt = 0.0, double rel_tol = 1e-7,
                           int max_doublings = 6);

// ---- free propagator kernel K_h ---------------------------------------------
//   K_h(sigma, t) = sigma^{-2 nu} (2 pi)^{-(nu+1)} int e^{it lambda} Jnu(sigma lambda) psi(h^2 lambda^2) lambda d lambda
// with Jnu(z) = z^nu J_nu(z).

KernelSlice free_kernel_slice(const WaveKernelSpec& spec, double sigma, Method method = Method::Auto);
KernelSample K_h(const WaveKernelSpec& spec, double sigma, double t, Method method = Method::Auto);

/// Smallest sigma for which the symbol split of K_h is admissible.
double split_threshold(const WaveKernelSpec& spec);

/// One half of the split kernel: Jnu(sigma lambda) replaced by e^{+-i sigma lambda} b^{+-}(sigma lambda).
KernelSlice free_kernel_split_slice(const WaveKernelSpec& spec, double sigma, Sign sign);
KernelSample K1_split(const WaveKernelSpec& spec, double sigma, double t, Sign sign);

// ---- free resolvent -------------------------------------------------------------

/// Kernel of R0^{+-}(lambda) at |x - y| = r; lambda = 0 gives the Newtonian kernel.
Complex resolvent_kernel(SpectralOrder order, double lambda, double r, Sign sign);

/// Spherical average over |y| = rho of [R0(lambda) - R0(0)](|x - y|) at |x| = r,
/// in closed form through the Gegenbauer addition theorem.
Complex averaged_resolvent_difference(SpectralOrder order, double lambda, double r, double rho, Sign sign);

/// Same average for R0(lambda) itself.
Complex averaged_resolvent(SpectralOrder order, double lambda, double r, double rho, Sign sign);

// ---- A_h kernels -------------------------------------------------------------------
//   A_h(sigma, t) = +-(i/4) (2 pi)^{-nu} sigma^{2-n} int e^{it lambda} phi1~(h lambda) (H(sigma lambda) - H(0)) d lambda

KernelSlice a_kernel_slice(const WaveKernelSpec& spec, double sigma, Sign sign, Method method = Method::Auto);
KernelSample A_h_pm(const WaveKernelSpec& spec, double sigma, double t, Sign sign, Method method = Method::Auto);

/// The Hankel part alone (H(sigma lambda) without the subtracted constant).
KernelSlice a_hankel_part_slice(const WaveKernelSpec& spec, double sigma, Sign sign);

/// +-(i/4)(2 pi)^{-nu}, the constant in front of every resolvent kernel.
Complex resolvent_prefactor(SpectralOrder order, Sign sign);

/// Fourier transform of phi_h(lambda) = phi1(h lambda) (or of phi1~ when tilde is set).
KernelSlice cutoff_transform_slice(const WaveKernelSpec& spec, bool tilde);

// ---- low-frequency kernels -------------------------------------------------------------
//   K(sigma, t) = c_n sigma^{2-n} int_0^inf e^{it lambda} lambda^{1-(n+1)/2 + 2 eps} eta_a(lambda^2) Jnu(sigma lambda) d lambda
// with c_n = (2 pi)^{-(nu+1)}. K1 and K2 insert phi(sigma lambda) and
// 1 - phi(sigma lambda); K2+- are the two halves of K2 under the symbol split.
// The eps-variant of K2 is K2 with epsilon > 0.

enum class AppendixVariant { Full, K1, K2, K2Plus, K2Minus };

AppendixVariant parse_variant(const std::string& name);
const char* variant_name(AppendixVariant v);

struct AppendixSpec {
  SpectralOrder order = SpectralOrder::for_dimension(4);
  CutoffFamily cutoffs{};
  double epsilon = 0.0;
  oscint::QuadConfig quad{};
};

double appendix_constant(SpectralOrder order);

KernelSlice appendix_slice(const AppendixSpec& spec, double sigma, AppendixVariant variant);
KernelSample appendix_K(const AppendixSpec& spec, double sigma, double t, AppendixVariant variant);

/// g(z) = phi(z) J_nu(z) / z^nu, so that (phi Jnu)(z) = z^{n-2} g(z).
double g_function(SpectralOrder order, const CutoffFamily& cutoffs, double z);

/// int e^{it lambda} lambda^{k-1} eta_a(lambda^2) g(sigma lambda) d lambda.
KernelSlice lemma_a2_slice(const AppendixSpec& spec, double sigma, double k);

}  // namespace wavekernel::kernels
