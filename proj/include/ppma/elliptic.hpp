#pragma once

#include <array>
#include <complex>

namespace ppma {

using cplx = std::complex<double>;

// Rectangular lattice with half-periods K and i*pi.
struct RectLattice {
  double K;
  cplx tau;           // i*pi/K
  double nome_small;  // exp(-pi^2/K), nome of tau
  double nome_dual;   // exp(-K), nome of -1/tau

  explicit RectLattice(double K);
};

enum class ThetaKind { k00, k01, k10, k11 };

// Which series evaluates the theta functions. Auto picks the direct series
// for K <= pi and the Jacobi-transformed one otherwise.
enum class ThetaRoute { Auto, Direct, Transformed };

// Theta function theta_ab(z | i pi/K) or its z-derivative of order 0..2.
cplx theta(ThetaKind kind, cplx z, const RectLattice& lat, int deriv_order,
           ThetaRoute route = ThetaRoute::Auto);

// Value, first and second z-derivative at once.
std::array<cplx, 3> theta_derivs(ThetaKind kind, cplx z, const RectLattice& lat,
                                 ThetaRoute route = ThetaRoute::Auto);

// theta'/theta at z.
cplx theta_logderiv(ThetaKind kind, cplx z, const RectLattice& lat);

enum class WeierKind { sigma, zeta, wp, wp_prime };

// Trig series in exp(-2 pi^2/K) or hyperbolic series in exp(-2K).
// Auto switches at K = pi.
enum class WeierRoute { Auto, Trig, Hyperbolic };

cplx weier(WeierKind kind, cplx z, const RectLattice& lat,
           WeierRoute route = WeierRoute::Auto);

// Same functions through the theta relations (sigma, zeta, wp only). Used as
// an independent cross-check.
cplx weier_theta(WeierKind kind, cplx z, const RectLattice& lat);

// zeta(i pi)/(i pi), a real number.
double zeta_ipi_ratio(const RectLattice& lat, WeierRoute route = WeierRoute::Auto);

// zeta(K), real.
double zeta_K(const RectLattice& lat, WeierRoute route = WeierRoute::Auto);

// Lattice invariants g2, g3 from the half-period values e1, e2, e3.
struct Invariants {
  double g2;
  double g3;
  double e1, e2, e3;  // wp(K), wp(K + i pi), wp(i pi)
};
Invariants invariants(const RectLattice& lat);

// wp''(z) = 6 wp^2 - g2/2.
cplx wp_second(cplx z, const RectLattice& lat);

enum class WeierDKKind { log_sigma, zeta, wp };

// Derivative in K at fixed z.
cplx weier_dK(WeierDKKind kind, cplx z, const RectLattice& lat);

// Convenience real-argument wrappers.
inline double sigma_re(double z, const RectLattice& lat) {
  return weier(WeierKind::sigma, z, lat).real();
}
inline double zeta_re(double z, const RectLattice& lat) {
  return weier(WeierKind::zeta, z, lat).real();
}
inline double wp_re(double z, const RectLattice& lat) {
  return weier(WeierKind::wp, z, lat).real();
}

}  // namespace ppma
