#include "ppma/equilibrium.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "ppma/elliptic.hpp"
#include "ppma/errors.hpp"

namespace ppma {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kJunction = 1e-12;

void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive and finite");
}

void check_K(double eta, double K) {
  check_eta(eta);
  if (!(K > eta / 2.0) || !std::isfinite(K)) throw DomainError("K must exceed eta/2");
}

// Weierstrass quantities shared by U, V, F, endpoints and g-values.
struct Pieces {
  double zi;      // zeta(i pi)/(i pi)
  double zK;      // zeta(K)
  double zEta;    // zeta(eta)
  double zHalf;   // zeta(eta/2)
  double wpEta;   // wp(eta)
  double sigEta;  // sigma(eta)
};

Pieces pieces(double eta, const RectLattice& lat) {
  Pieces p{};
  p.zi = zeta_ipi_ratio(lat);
  p.zK = zeta_K(lat);
  p.zEta = weier(WeierKind::zeta, eta, lat).real();
  p.zHalf = weier(WeierKind::zeta, eta / 2.0, lat).real();
  p.wpEta = weier(WeierKind::wp, eta, lat).real();
  p.sigEta = weier(WeierKind::sigma, eta, lat).real();
  return p;
}

double u_from(double eta, const Pieces& p) {
  return std::exp(-eta / 2.0 - 0.5 * p.zi * eta * eta) * p.sigEta;
}

double v_from(double eta, double K, const Pieces& p) {
  const double s = p.zEta - eta * p.zi;
  return 1.0 + K * (s * s - p.wpEta + 2.0 * p.zi);
}

}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::OneCutLeft: return "OneCutLeft";
    case Regime::TwoCut: return "TwoCut";
    case Regime::VKLS: return "VKLS";
  }
  return "?";
}

double x_star(double eta) {
  check_eta(eta);
  return -2.0 * (-std::expm1(-eta)) / eta;
}

double u_of_K(double eta, double K) {
  check_K(eta, K);
  RectLattice lat(K);
  return u_from(eta, pieces(eta, lat));
}

double u_of_K_theta(double eta, double K) {
  check_K(eta, K);
  RectLattice lat(K);
  const cplx num = theta(ThetaKind::k11, eta / (2.0 * K), lat, 0);
  const cplx den = theta(ThetaKind::k11, 0.0, lat, 1);
  return 2.0 * K * std::exp(0.5 * eta * (eta / (2.0 * K) - 1.0)) * (num / den).real();
}

double v_of_K(double eta, double K) {
  check_K(eta, K);
  RectLattice lat(K);
  return v_from(eta, K, pieces(eta, lat));
}

Regime classify(double eta, double x) {
  const double xs = x_star(eta);
  if (!std::isfinite(x)) throw DomainError("x must be finite");
  if (x <= xs + kJunction) return Regime::OneCutLeft;
  if (x >= 2.0 - kJunction) return Regime::VKLS;
  return Regime::TwoCut;
}

double solve_K(double eta, double x) {
  check_eta(eta);
  const double xs = x_star(eta);
  if (!(x > xs && x < 2.0)) throw RegimeError("solve_K: x must lie in (x_*, 2)");
  const double target = -eta * x / 2.0;
  auto f = [&](double K) {
    RectLattice lat(K);
    const Pieces p = pieces(eta, lat);
    return u_from(eta, p) * v_from(eta, K, p) - target;
  };
  const double lo = eta / 2.0 * (1.0 + 1e-8);
  double hi = std::max(eta, 4.0);
  while (true) {
    const double fh = f(hi);
    if (!std::isfinite(fh)) throw NumericalError("solve_K: U V overflows (eta too large for double precision)");
    if (fh > 0.0) break;
    hi *= 2.0;
    if (hi > 1e4) throw ConvergenceError("solve_K: no bracket below K = 1e4 (x too close to x_*)");
  }
  double a = lo;
  // lower end: U V -> -eta as K -> eta/2, so f(lo) < 0 unless x is within
  // ~1e-8 of 2; shrink towards eta/2 in that case
  double shrink = 1e-8;
  while (f(a) >= 0.0) {
    shrink *= 1e-2;
    if (shrink < 1e-15) throw ConvergenceError("solve_K: no bracket near K = eta/2 (x too close to 2)");
    a = eta / 2.0 * (1.0 + shrink);
  }
  auto tol = [](double l, double r) { return std::abs(r - l) <= 1e-13 * std::abs(r); };
  boost::uintmax_t iters = 200;
  const auto [l, r] = boost::math::tools::bisect(f, a, hi, tol, iters);
  return 0.5 * (l + r);
}

Endpoints endpoints_weierstrass(double eta, double K) {
  check_K(eta, K);
  RectLattice lat(K);
  const Pieces p = pieces(eta, lat);
  const double U = u_from(eta, p);
  const cplx ipi(0.0, kPi);
  auto Z = [&](cplx z) { return weier(WeierKind::zeta, z, lat); };
  const double base = p.zi * eta - 2.0 * p.zEta;
  const double h = eta / 2.0;
  Endpoints e{};
  e.a = U * (base + (Z(h + K) + Z(h - K)).real());
  e.b = U * (base + (Z(h + K + ipi) + Z(h - K - ipi)).real());
  e.c = U * (base + (Z(h + ipi) + Z(h - ipi)).real());
  e.d = U * (base + 2.0 * p.zHalf);
  return e;
}

Endpoints endpoints_theta(double eta, double K) {
  check_K(eta, K);
  RectLattice lat(K);
  const double U = u_of_K_theta(eta, K);
  const double ld11 = theta_logderiv(ThetaKind::k11, eta / (2.0 * K), lat).real();
  auto T = [&](double z) { return U / K * (z - eta / 2.0 - ld11); };
  const double u = eta / (4.0 * K);
  Endpoints e{};
  e.a = T(theta_logderiv(ThetaKind::k01, u, lat).real());
  e.b = T(theta_logderiv(ThetaKind::k00, u, lat).real());
  e.c = T(theta_logderiv(ThetaKind::k10, u, lat).real());
  e.d = T(theta_logderiv(ThetaKind::k11, u, lat).real());
  return e;
}

Endpoints endpoints(double eta, double x) {
  if (classify(eta, x) != Regime::TwoCut) throw RegimeError("endpoints: x must lie in (x_*, 2)");
  return endpoints_weierstrass(eta, solve_K(eta, x));
}

double rate_theta_form(double eta, double K, double x) {
  RectLattice lat(K);
  const double U = u_of_K_theta(eta, K);
  const auto t = theta_derivs(ThetaKind::k11, eta / (2.0 * K), lat);
  const cplx ld = t[1] / t[0];
  const double d2 = ((t[2] / t[0] - ld * ld) / (4.0 * K * K)).real();
  return 1.0 + eta / 2.0 * (1.0 - eta / (2.0 * K)) * x * x - 3.0 * eta * U / (4.0 * K) * x + U * U * d2;
}

EquilibriumProfile profile(double eta, double x) {
  check_eta(eta);
  EquilibriumProfile pr{};
  pr.eta = eta;
  pr.x = x;
  pr.xStar = x_star(eta);
  pr.regime = classify(eta, x);
  const double em = std::exp(-eta);
  switch (pr.regime) {
    case Regime::OneCutLeft: {
      // K = infinity limit
      pr.U = 1.0 - em;
      pr.V = 1.0;
      pr.L = 0.0;
      pr.F = eta * x * x / 2.0 + 1.0 - em;
      pr.dF = eta * x;
      pr.d2F = eta;
      pr.g1 = -em;
      pr.ell = eta * (2.0 * std::exp(-eta / 2.0) - x);
      pr.gInf = 0.5 * (pr.dF + pr.ell);
      return pr;
    }
    case Regime::VKLS: {
      pr.g1 = -1.0;
      return pr;
    }
    case Regime::TwoCut: break;
  }
  const double K = solve_K(eta, x);
  RectLattice lat(K);
  const Pieces p = pieces(eta, lat);
  const double U = u_from(eta, p);
  const double V = v_from(eta, K, p);
  pr.K = K;
  pr.U = U;
  pr.V = V;
  pr.L = -(eta * x / 2.0 + U) / K;
  pr.F = 1.0 + eta / 2.0 * (1.0 - eta / (2.0 * K)) * x * x - 3.0 * eta * U / (4.0 * K) * x -
         U * U * (p.wpEta + p.zK / K);
  pr.dF = eta * (x + pr.L);
  pr.d2F = eta * (1.0 - eta / (2.0 * K));
  const double dz = p.zi * eta - 2.0 * p.zEta + 2.0 * p.zHalf;
  pr.g1 = -U * U * (p.wpEta + p.zi - (V - 1.0) / (2.0 * K));
  pr.gInf = eta * U / 2.0 * (dz + (V - 1.0) / K);
  pr.ell = eta * U * (dz + 2.0 * V / eta);
  pr.endpoints = endpoints_weierstrass(eta, K);
  return pr;
}

double rate_integral_form(double eta, double x) {
  const Regime r = classify(eta, x);
  if (r == Regime::VKLS) return 0.0;
  const double base = eta * x * x / 2.0 + 1.0 - std::exp(-eta);
  if (r == Regime::OneCutLeft) return base;
  const double xs = x_star(eta);
  auto L = [&](double y) {
    const double K = solve_K(eta, y);
    return -(eta * y / 2.0 + u_of_K(eta, K)) / K;
  };
  double err = 0.0;
  const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(L, xs, x, 10, 1e-11, &err);
  return base + eta * I;
}

}  // namespace ppma
