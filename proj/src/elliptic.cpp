#include "ppma/elliptic.hpp"

#include <cmath>
#include <numbers>

#include "ppma/errors.hpp"

namespace ppma {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
constexpr double kSeriesTol = 1e-16;
constexpr int kMaxTerms = 10000;
constexpr double kPoleRadius = 1e-10;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_finite(cplx z, const char* who) {
  if (!finite(z)) throw DomainError(std::string(who) + ": non-finite argument");
}

// sum_n exp(-lambda n^2 + 2 pi i n w) and its first two w-derivatives.
std::array<cplx, 3> theta00_series(cplx w, double lambda) {
  std::array<cplx, 3> s{1.0, 0.0, 0.0};
  double acc = 1.0;
  const double peak = 2.0 * kPi * std::abs(w.imag()) / (2.0 * lambda);
  int small_run = 0;
  for (int n = 1; n <= kMaxTerms; ++n) {
    const double dn = n;
    const cplx ep = std::exp(-lambda * dn * dn + 2.0 * kPi * kI * dn * w);
    const cplx em = std::exp(-lambda * dn * dn - 2.0 * kPi * kI * dn * w);
    const cplx f1 = 2.0 * kPi * kI * dn;
    s[0] += ep + em;
    s[1] += f1 * (ep - em);
    s[2] += f1 * f1 * (ep + em);
    const double mag = std::abs(ep) + std::abs(em);
    acc += mag;
    if (dn > peak && mag * (1.0 + 4.0 * kPi * kPi * dn * dn) < kSeriesTol * acc) {
      if (++small_run >= 2) return s;
    } else {
      small_run = 0;
    }
  }
  throw ConvergenceError("theta: series did not converge");
}

std::array<cplx, 3> theta00(cplx z, const RectLattice& lat, ThetaRoute route) {
  // period 1 in z; keep the real part in [-1/2, 1/2]
  z -= std::round(z.real());
  const bool direct = route == ThetaRoute::Direct ||
                      (route == ThetaRoute::Auto && lat.K <= kPi);
  if (direct) return theta00_series(z, kPi * kPi / lat.K);

  // theta(z|tau) = sqrt(K/pi) exp(-K z^2) theta(-i z K/pi | i K/pi)
  const double K = lat.K;
  const cplx scale = -kI * K / kPi;
  const auto g = theta00_series(scale * z, K);
  const cplx A = std::sqrt(K / kPi) * std::exp(-K * z * z);
  const cplx A1 = -2.0 * K * z * A;
  const cplx A2 = (4.0 * K * K * z * z - 2.0 * K) * A;
  const cplx G0 = g[0], G1 = scale * g[1], G2 = scale * scale * g[2];
  return {A * G0, A1 * G0 + A * G1, A2 * G0 + 2.0 * A1 * G1 + A * G2};
}

// Reduce z modulo the lattice: z = zr + 2 m K + 2 n i pi.
struct Reduced {
  cplx zr;
  double m;
  double n;
};

Reduced reduce(cplx z, const RectLattice& lat) {
  const double m = std::round(z.real() / (2.0 * lat.K));
  const double n = std::round(z.imag() / (2.0 * kPi));
  return {z - 2.0 * m * lat.K - 2.0 * n * kPi * kI, m, n};
}

cplx log1p_c(cplx w) {
  if (std::abs(w) < 1e-4) return w * (1.0 - w * (0.5 - w * (1.0 / 3.0 - 0.25 * w)));
  return std::log(1.0 + w);
}

// Trig series, valid for reduced z.
cplx weier_trig(WeierKind kind, cplx z, const RectLattice& lat, double zK) {
  const double K = lat.K;
  const double c = kPi / (2.0 * K);
  const double q = lat.nome_small * lat.nome_small;
  const cplx sn = std::sin(c * z);
  switch (kind) {
    case WeierKind::sigma: {
      cplx logp = 0.0;
      const cplx cz2 = std::cos(2.0 * c * z);
      double qn = 1.0;
      for (int n = 1; n <= kMaxTerms; ++n) {
        qn *= q;
        const cplx num = -2.0 * qn * cz2 + qn * qn;
        const cplx term = log1p_c(num) - 2.0 * std::log1p(-qn);
        logp += term;
        if (std::abs(term) < kSeriesTol * (1.0 + std::abs(logp)) && std::abs(num) < 1e-17)
          return std::exp(zK * z * z / (2.0 * K) + logp) * sn / c;
      }
      break;
    }
    case WeierKind::zeta: {
      cplx s = z * zK / K + c * std::cos(c * z) / sn;
      double qn = 1.0;
      for (int n = 1; n <= kMaxTerms; ++n) {
        qn *= q;
        const cplx term = (2.0 * kPi / K) * qn / (1.0 - qn) * std::sin(2.0 * n * c * z);
        s += term;
        if (std::abs(term) < kSeriesTol * std::abs(s) && qn * std::exp(2.0 * n * c * std::abs(z.imag())) < 1e-17)
          return s;
      }
      break;
    }
    case WeierKind::wp: {
      cplx s = -zK / K + c * c / (sn * sn);
      double qn = 1.0;
      for (int n = 1; n <= kMaxTerms; ++n) {
        qn *= q;
        const cplx term = -(2.0 * kPi * kPi / (K * K)) * n * qn / (1.0 - qn) * std::cos(2.0 * n * c * z);
        s += term;
        if (std::abs(term) < kSeriesTol * std::abs(s) && n * qn * std::exp(2.0 * n * c * std::abs(z.imag())) < 1e-17)
          return s;
      }
      break;
    }
    case WeierKind::wp_prime: {
      cplx s = -2.0 * c * c * c * std::cos(c * z) / (sn * sn * sn);
      double qn = 1.0;
      for (int n = 1; n <= kMaxTerms; ++n) {
        qn *= q;
        const double dn = n;
        const cplx term = (4.0 * kPi * kPi * c / (K * K)) * dn * dn * qn / (1.0 - qn) * std::sin(2.0 * dn * c * z);
        s += term;
        if (std::abs(term) < kSeriesTol * std::abs(s) && dn * dn * qn * std::exp(2.0 * dn * c * std::abs(z.imag())) < 1e-17)
          return s;
      }
      break;
    }
  }
  throw ConvergenceError("weier: trig series did not converge");
}

// Hyperbolic series, valid for reduced z.
cplx weier_hyp(WeierKind kind, cplx z, const RectLattice& lat) {
  const double K = lat.K;
  const cplx h = 0.5 * z;
  const cplx sh = std::sinh(h), ch = std::cosh(h);
  cplx s;
  switch (kind) {
    case WeierKind::sigma: s = 0.0; break;  // log of the product
    case WeierKind::zeta: s = -z / 12.0 + 0.5 * ch / sh; break;
    case WeierKind::wp: s = 1.0 / 12.0 + 0.25 / (sh * sh); break;
    case WeierKind::wp_prime: s = -0.25 * ch / (sh * sh * sh); break;
  }
  for (int n = 1; n <= kMaxTerms; ++n) {
    const double kn = K * n;
    if (kn > 350.0) break;  // remaining terms ~ exp(-2Kn) are below double eps
    const double shk = std::sinh(kn);
    const cplx am = kn - h, ap = kn + h;
    const cplx sm = std::sinh(am), sp = std::sinh(ap);
    cplx term;
    switch (kind) {
      case WeierKind::sigma:
        term = z * z / (4.0 * shk * shk) + log1p_c(-(sh * sh) / (shk * shk));
        break;
      case WeierKind::zeta:
        // coth(ap) - coth(am) = -sinh(z)/(sinh(ap) sinh(am))
        term = 0.5 * (z / (shk * shk) - std::sinh(z) / (sp * sm));
        break;
      case WeierKind::wp:
        term = -0.25 * (2.0 / (shk * shk) - 1.0 / (sm * sm) - 1.0 / (sp * sp));
        break;
      case WeierKind::wp_prime:
        term = 0.25 * (std::cosh(am) / (sm * sm * sm) - std::cosh(ap) / (sp * sp * sp));
        break;
    }
    s += term;
    const double scale = kind == WeierKind::sigma ? 1.0 + std::abs(s) : std::abs(s);
    if (std::abs(term) < kSeriesTol * scale && std::exp(-2.0 * kn + std::abs(z.real())) < 1e-17) break;
  }
  if (kind == WeierKind::sigma) return 2.0 * sh * std::exp(-z * z / 24.0 + s);
  return s;
}

bool use_trig(const RectLattice& lat, WeierRoute route) {
  return route == WeierRoute::Trig || (route == WeierRoute::Auto && lat.K <= kPi);
}

}  // namespace

RectLattice::RectLattice(double K_) : K(K_) {
  if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("RectLattice: K must be positive and finite");
  tau = cplx(0.0, kPi / K);
  nome_small = std::exp(-kPi * kPi / K);
  nome_dual = std::exp(-K);
}

std::array<cplx, 3> theta_derivs(ThetaKind kind, cplx z, const RectLattice& lat, ThetaRoute route) {
  check_finite(z, "theta");
  const cplx tau = lat.tau;
  switch (kind) {
    case ThetaKind::k00: return theta00(z, lat, route);
    case ThetaKind::k10: return theta00(z + 0.5, lat, route);
    case ThetaKind::k01:
    case ThetaKind::k11: {
      const cplx shift = kind == ThetaKind::k01 ? tau / 2.0 : (1.0 + tau) / 2.0;
      const cplx pre = (kind == ThetaKind::k11 ? kI : cplx(1.0)) * std::exp(kI * kPi * (z + tau / 4.0));
      const auto t = theta00(z + shift, lat, route);
      const cplx ip = kI * kPi;
      return {pre * t[0], pre * (ip * t[0] + t[1]), pre * (ip * ip * t[0] + 2.0 * ip * t[1] + t[2])};
    }
  }
  throw DomainError("theta: unknown kind");
}

cplx theta(ThetaKind kind, cplx z, const RectLattice& lat, int deriv_order, ThetaRoute route) {
  if (deriv_order < 0 || deriv_order > 2) throw DomainError("theta: deriv_order must be 0, 1 or 2");
  return theta_derivs(kind, z, lat, route)[deriv_order];
}

cplx theta_logderiv(ThetaKind kind, cplx z, const RectLattice& lat) {
  const auto t = theta_derivs(kind, z, lat);
  return t[1] / t[0];
}

double zeta_ipi_ratio(const RectLattice& lat, WeierRoute route) {
  const double K = lat.K;
  if (use_trig(lat, route)) return (zeta_K(lat, route) - 0.5) / K;
  double s = 0.0;
  for (int n = 1; n <= kMaxTerms; ++n) {
    if (K * n > 350.0) break;
    const double sh = std::sinh(n * K);
    const double term = 1.0 / (sh * sh);
    s += term;
    if (term < kSeriesTol * (1.0 / 12.0 + s)) break;
  }
  return -1.0 / 12.0 + 0.5 * s;
}

double zeta_K(const RectLattice& lat, WeierRoute route) {
  const double K = lat.K;
  if (!use_trig(lat, route)) return 0.5 + K * zeta_ipi_ratio(lat, route);
  const double a = kPi * kPi / K;
  double s = 0.0;
  for (int n = 1; n <= kMaxTerms; ++n) {
    if (a * n > 350.0) break;
    const double sh = std::sinh(n * a);
    const double term = 1.0 / (sh * sh);
    s += term;
    if (term < kSeriesTol * (1.0 / 6.0 + s)) break;
  }
  return a / 12.0 - 0.5 * a * s;
}

cplx weier(WeierKind kind, cplx z, const RectLattice& lat, WeierRoute route) {
  check_finite(z, "weier");
  const auto [zr, m, n] = reduce(z, lat);
  const bool singular = kind != WeierKind::sigma;
  if (std::abs(zr) < kPoleRadius) {
    if (singular) throw PoleError("weier: argument within 1e-10 of a lattice point");
    if (m == 0.0 && n == 0.0) return z;  // sigma(z) = z + O(z^5)
  }
  const bool trig = use_trig(lat, route);
  const double zK = zeta_K(lat, route);
  const cplx eta1 = zK;
  const cplx eta2 = kI * kPi * zeta_ipi_ratio(lat, route);
  const cplx base = trig ? weier_trig(kind, zr, lat, zK) : weier_hyp(kind, zr, lat);
  switch (kind) {
    case WeierKind::sigma: {
      if (m == 0.0 && n == 0.0) return base;
      const double parity = std::fmod(std::abs(m + n + m * n), 2.0);
      const cplx e = (2.0 * m * eta1 + 2.0 * n * eta2) * (zr + m * lat.K + n * kI * kPi);
      return (parity == 1.0 ? -1.0 : 1.0) * std::exp(e) * base;
    }
    case WeierKind::zeta: return base + 2.0 * m * eta1 + 2.0 * n * eta2;
    default: return base;
  }
}

cplx weier_theta(WeierKind kind, cplx z, const RectLattice& lat) {
  check_finite(z, "weier_theta");
  const double K = lat.K;
  const double zK = zeta_K(lat);
  const cplx u = z / (2.0 * K);
  const auto t = theta_derivs(ThetaKind::k11, u, lat);
  switch (kind) {
    case WeierKind::sigma: {
      const cplx d0 = theta(ThetaKind::k11, 0.0, lat, 1);
      return 2.0 * K * std::exp(zK * z * z / (2.0 * K)) * t[0] / d0;
    }
    case WeierKind::zeta: return zK * z / K + t[1] / (t[0] * 2.0 * K);
    case WeierKind::wp: {
      const cplx ld = t[1] / t[0];
      return -zK / K - (t[2] / t[0] - ld * ld) / (4.0 * K * K);
    }
    case WeierKind::wp_prime: break;
  }
  throw DomainError("weier_theta: wp_prime is not available through this route");
}

Invariants invariants(const RectLattice& lat) {
  Invariants inv{};
  inv.e1 = weier(WeierKind::wp, lat.K, lat).real();
  inv.e2 = weier(WeierKind::wp, cplx(lat.K, kPi), lat).real();
  inv.e3 = weier(WeierKind::wp, cplx(0.0, kPi), lat).real();
  inv.g2 = 2.0 * (inv.e1 * inv.e1 + inv.e2 * inv.e2 + inv.e3 * inv.e3);
  inv.g3 = 4.0 * inv.e1 * inv.e2 * inv.e3;
  return inv;
}

cplx wp_second(cplx z, const RectLattice& lat) {
  const cplx p = weier(WeierKind::wp, z, lat);
  return 6.0 * p * p - 0.5 * invariants(lat).g2;
}

cplx weier_dK(WeierDKKind kind, cplx z, const RectLattice& lat) {
  const double g2 = invariants(lat).g2;
  const double zi = zeta_ipi_ratio(lat);
  const cplx ze = weier(WeierKind::zeta, z, lat);
  const cplx p = weier(WeierKind::wp, z, lat);
  switch (kind) {
    case WeierDKKind::log_sigma:
      return p - ze * ze - g2 * z * z / 12.0 + 2.0 * zi * (z * ze - 1.0);
    case WeierDKKind::zeta: {
      const cplx pp = weier(WeierKind::wp_prime, z, lat);
      return pp + 2.0 * ze * p - g2 * z / 6.0 + 2.0 * zi * (ze - z * p);
    }
    case WeierDKKind::wp: {
      const cplx pp = weier(WeierKind::wp_prime, z, lat);
      const cplx p2 = 6.0 * p * p - 0.5 * g2;
      return -p2 + 2.0 * p * p - 2.0 * ze * pp + g2 / 6.0 + 2.0 * zi * (2.0 * p + z * pp);
    }
  }
  throw DomainError("weier_dK: unknown kind");
}

}  // namespace ppma
