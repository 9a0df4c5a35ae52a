#include "ppma/asymptotics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "ppma/elliptic.hpp"
#include "ppma/errors.hpp"

namespace ppma {

namespace {

using cd = std::complex<double>;

// Two-cut data shared by the oscillatory formulas.
struct TwoCut {
  EquilibriumProfile prof;
  RectLattice lat;
  double K, L, U;

  explicit TwoCut(const EquilibriumProfile& p) : prof(p), lat(*p.K), K(*p.K), L(p.L), U(p.U) {}
};

TwoCut two_cut(double eta, double x, const char* who) {
  const EquilibriumProfile p = profile(eta, x);
  if (p.regime != Regime::TwoCut) throw RegimeError(std::string(who) + ": x must lie in (x_*, 2)");
  return TwoCut(p);
}

double theta00(double z, const RectLattice& lat, int d = 0) { return theta(ThetaKind::k00, z, lat, d).real(); }

// log prefactor e^{(eta/2)(eta/2K - 1)}
double log_pre(double eta, double K) { return 0.5 * eta * (eta / (2.0 * K) - 1.0); }

// chi(w) = theta11(w/2K - tL) / theta11(w/2K) and its first two w-derivatives.
struct Chi {
  const RectLattice& lat;
  double K, tL;

  std::array<cd, 3> operator()(cd w) const {
    const cd u = w / (2.0 * K);
    const auto N = theta_derivs(ThetaKind::k11, u - tL, lat);
    const auto D = theta_derivs(ThetaKind::k11, u, lat);
    const cd q = N[0] / D[0];
    const cd ld = D[1] / D[0];
    const cd c1 = (N[1] - q * D[1]) / D[0];
    const cd c2 = N[2] / D[0] - 2.0 * N[1] * D[1] / (D[0] * D[0]) - q * D[2] / D[0] + 2.0 * q * ld * ld;
    const double s = 1.0 / (2.0 * K);
    return {q, c1 * s, c2 * s * s};
  }
};

}  // namespace

PAmplitudes p_amplitudes(double eta, double x, double t) {
  const TwoCut tc = two_cut(eta, x, "p_amplitudes");
  const double tL = t * tc.L;
  const double pre = std::exp(log_pre(eta, tc.K));
  const double th = theta00(tL, tc.lat);
  const double r = (theta(ThetaKind::k11, eta / (2.0 * tc.K), tc.lat, 0) / theta(ThetaKind::k11, 0.0, tc.lat, 1)).real();
  PAmplitudes p{};
  p.p0 = pre * r * theta00(tL, tc.lat, 1) / th;
  p.p_plus = pre * theta00(tL + eta / (2.0 * tc.K), tc.lat) / th;
  return p;
}

AsymptoticPrediction predict(double eta, double x, double t, double delta, std::optional<double> A) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("predict: t must be positive");
  const EquilibriumProfile p = profile(eta, x);
  AsymptoticPrediction r;
  r.t = t;
  r.x = x;
  r.eta = eta;
  r.regime = p.regime;
  r.near_boundary = std::abs(x - p.xStar) < delta || std::abs(2.0 - x) < delta;
  r.leading = -t * t * p.F;
  switch (p.regime) {
    case Regime::OneCutLeft:
      r.predicted_log_beta = x * t * eta - eta / 2.0;
      r.predicted_alpha = t * (1.0 - std::exp(-eta));
      return r;
    case Regime::VKLS:
      return r;
    case Regime::TwoCut: break;
  }
  const TwoCut tc(p);
  r.theta_osc = std::log(theta00(t * tc.L, tc.lat));
  r.log_term = (A ? *A : a_coefficient(eta)) * std::log(t);
  const PAmplitudes pa = p_amplitudes(eta, x, t);
  r.predicted_log_beta = t * (2.0 * p.gInf - p.ell) + std::log(pa.p_plus);
  r.predicted_alpha = t * (1.0 + p.g1) + pa.p0;
  return r;
}

TodaAsym toda_profiles(double eta, double x, double t) {
  const EquilibriumProfile p = profile(eta, x);
  switch (p.regime) {
    case Regime::OneCutLeft: return {-eta * x, eta / 2.0, std::exp(-eta / 2.0), 0.0};
    case Regime::VKLS: return {0.0, 0.0, 1.0, 0.0};
    case Regime::TwoCut: break;
  }
  const TwoCut tc(p);
  const double tL = t * tc.L, h = eta / (2.0 * tc.K);
  const double th = theta00(tL, tc.lat), thp = theta00(tL + h, tc.lat), thm = theta00(tL - h, tc.lat);
  TodaAsym r{};
  r.y1 = -eta * (x + tc.L);
  r.y0 = eta / 2.0 - eta * eta / (4.0 * tc.K) - std::log(thp / th);
  r.a0 = std::exp(-eta / 2.0 + eta * eta / (4.0 * tc.K)) * std::sqrt(thp * thm) / th;
  r.b0 = tc.U / (2.0 * tc.K) * (eta + theta00(tL + h, tc.lat, 1) / thp - theta00(tL, tc.lat, 1) / th);
  return r;
}

ResidueData residues(double eta, double x, double t) {
  const TwoCut tc = two_cut(eta, x, "residues");
  const Endpoints& e = *tc.prof.endpoints;
  const double K = tc.K, m = tc.U;
  const RectLattice& lat = tc.lat;
  const cd ipi(0.0, std::numbers::pi);
  const double zi = zeta_ipi_ratio(lat);
  const std::array<double, 4> z{e.a, e.b, e.c, e.d};
  const std::array<cd, 4> w{K, K + ipi, ipi, 0.0};
  const std::array<double, 4> sgn{+1.0, -1.0, +1.0, -1.0};

  ResidueData rd{};
  for (int i = 0; i < 4; ++i) {
    EndpointResidue& r = rd.at[i];
    r.z0 = z[i];
    double T = 1.0, S = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      T *= std::sqrt(std::abs(z[i] - z[j]));
      S += 1.0 / (z[i] - z[j]);
    }
    r.T = T;
    r.S = sgn[i] * S / 6.0;
    const cd hp = eta / 2.0 + w[i], hm = eta / 2.0 - w[i];
    r.C = (-zi * eta + weier(WeierKind::zeta, hp, lat) + weier(WeierKind::zeta, hm, lat)).real();
    r.A = 8.0 * m / (3.0 * T) * r.C;
    const double wpp = (weier(WeierKind::wp_prime, hp, lat) + weier(WeierKind::wp_prime, hm, lat)).real();
    r.B = 8.0 * m / (5.0 * T) * (r.S * r.C - 2.0 * m * m / (3.0 * T * T) * wpp);
  }

  const double wInf = eta / 2.0;
  const cd w1 = wInf - K + ipi, w2 = -wInf + K + ipi;
  const Chi chi{lat, K, t * tc.L};
  const cd norm = chi(wInf - w1)[0] * chi(-wInf - w2)[0];
  const double a = e.a, b = e.b, c = e.c, d = e.d;
  // bracket of each residue at shift w0: sign of the first term, sign and
  // denominator of the second, square-root prefactor and rational part
  auto bracket = [&](cd w0, double s1, double s2, double den2, double sq, double rat) {
    const auto X1 = chi(w0 - w1), X2 = chi(w0 - w2);
    return s1 * m / 18.0 * (X1[1] * X2[0] - X1[0] * X2[1]) +
           s2 * m * m / (36.0 * den2) * (5.0 * X1[2] * X2[0] + 14.0 * X1[1] * X2[1] + 5.0 * X1[0] * X2[2]) +
           sq / 144.0 * rat * X1[0] * X2[0];
  };
  const auto& [ra, rb, rc, rdd] = rd.at;
  const cd osc = std::exp(cd(0.0, -2.0 * std::numbers::pi * t * tc.L));

  const cd res_d = bracket(0.0, 1.0 / rdd.T, -1.0 / rdd.T, d - b, std::sqrt((d - a) * (d - c) / (d - b)),
                           10.0 * rdd.B / rdd.A - 5.0 / (d - a) + 5.0 / (d - b) - 5.0 / (d - c) +
                               14.0 * (d - b) / ((d - a) * (d - c))) /
                   (rdd.A * norm);
  const cd res_a = bracket(K, -1.0 / ra.T, -1.0 / ra.T, c - a, std::sqrt((b - a) * (d - a) / (c - a)),
                           10.0 * ra.B / ra.A + 5.0 / (a - b) - 5.0 / (a - c) + 5.0 / (a - d) +
                               14.0 * (c - a) / ((b - a) * (d - a))) /
                   (ra.A * norm);
  const cd res_b = osc *
                   bracket(ipi + K, -1.0 / rb.T, 1.0 / rb.T, d - b, std::sqrt((b - a) * (c - b) / (d - b)),
                           -10.0 * rb.B / rb.A + 5.0 / (b - a) + 5.0 / (b - c) - 5.0 / (b - d) -
                               14.0 * (d - b) / ((b - a) * (c - b))) /
                   (rb.A * norm);
  const cd res_c = osc *
                   bracket(ipi, -1.0 / rc.T, -1.0 / rc.T, c - a, std::sqrt((c - b) * (d - c) / (c - a)),
                           10.0 * rc.B / rc.A - 5.0 / (c - a) + 5.0 / (c - b) + 5.0 / (c - d) +
                               14.0 * (c - a) / ((c - b) * (d - c))) /
                   (rc.A * norm);
  rd.at[0].res11 = res_a;
  rd.at[1].res11 = res_b;
  rd.at[2].res11 = res_c;
  rd.at[3].res11 = res_d;
  rd.X = -1.0 / 24.0 + res_a + res_b + res_c + res_d;
  return rd;
}

double a_coefficient(double eta, int nodes, double t0) {
  const EquilibriumProfile p = profile(eta, 0.0);
  if (p.regime != Regime::TwoCut) throw RegimeError("a_coefficient: x = 0 is not two-cut for this eta");
  const double period = 1.0 / std::abs(p.L);
  auto X = [&](double tau) { return residues(eta, 0.0, tau).X.real(); };
  double I = 0.0;
  switch (nodes) {
    case 32: I = boost::math::quadrature::gauss<double, 32>::integrate(X, t0, t0 + period); break;
    case 64: I = boost::math::quadrature::gauss<double, 64>::integrate(X, t0, t0 + period); break;
    case 128: I = boost::math::quadrature::gauss<double, 128>::integrate(X, t0, t0 + period); break;
    default: throw DomainError("a_coefficient: nodes must be 32, 64 or 128");
  }
  return -2.0 * I / period;
}

PhiMinusResult phi_minus(double q, double mu) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("phi_minus: q must lie in (0, 1)");
  if (!std::isfinite(mu)) throw DomainError("phi_minus: mu must be finite");
  const double eta = -std::log(q);
  auto obj = [&](double y) { return profile(eta, y).F - 0.5 * eta * (mu - y) * (mu - y); };
  auto slope = [&](double y) { return profile(eta, y).dF + eta * (mu - y); };
  const double lo = mu - 4.0, hi = std::max(2.0, mu);
  // coarse bracketing guards against several local maxima
  constexpr int kGrid = 200;
  int best = 0;
  double bestv = -INFINITY;
  for (int i = 0; i <= kGrid; ++i) {
    const double y = lo + (hi - lo) * i / kGrid;
    const double v = obj(y);
    if (v > bestv) {
      bestv = v;
      best = i;
    }
  }
  const double step = (hi - lo) / kGrid;
  const double l = std::max(lo, lo + (best - 1) * step), r = std::min(hi, lo + (best + 1) * step);
  const auto [ym, negv] = boost::math::tools::brent_find_minima([&](double y) { return -obj(y); }, l, r, 40);
  double y = ym;
  // polish on the stationarity condition when it is bracketed
  const double sl = slope(l), sr = slope(r);
  if (sl > 0.0 && sr < 0.0) {
    auto tol = [](double u, double v) { return std::abs(u - v) < 1e-13; };
    boost::uintmax_t it = 100;
    const auto [u, v] = boost::math::tools::bisect(slope, l, r, tol, it);
    const double yb = 0.5 * (u + v);
    if (obj(yb) >= -negv) y = yb;
  }
  return {obj(y), y, mu < 0.0 || mu > 2.0};
}

double bessel_tail(double eta, double x, double t, std::optional<double> A) {
  if (classify(eta, x) == Regime::VKLS) return 0.0;
  const AsymptoticPrediction p = predict(eta, x, t, 0.0, A);
  return p.leading + p.theta_osc.value_or(0.0) + p.log_term.value_or(0.0);
}

}  // namespace ppma
