#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "doctest.h"
#include "ppma/asymptotics.hpp"
#include "ppma/elliptic.hpp"
#include "ppma/equilibrium.hpp"
#include "ppma/errors.hpp"

using namespace ppma;

namespace {

const double kEta5 = std::log(5.0);
constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

// (1,1) residue of the first-order jump correction at the outer endpoints a
// and d, by numerical contour integration around the endpoint. Builds the
// outer parametrix from scratch: w(z) = w(z0) + m int dnu / r(nu) along a
// straight path, r = xi^2 (z - a)(z - c), xi from principal fourth roots.
struct ContourOracle {
  double eta, x, t, K, m, L, a, b, c, d;
  RectLattice lat;
  EndpointResidue ra, rd;

  ContourOracle(double eta_, double x_, double t_) : eta(eta_), x(x_), t(t_), lat(1.0) {
    const EquilibriumProfile p = profile(eta, x);
    K = *p.K;
    m = p.U;
    L = p.L;
    a = p.endpoints->a;
    b = p.endpoints->b;
    c = p.endpoints->c;
    d = p.endpoints->d;
    lat = RectLattice(K);
    const ResidueData r = residues(eta, x, t);
    ra = r.at[0];
    rd = r.at[3];
  }

  cplx xi(cplx z) const { return std::pow((z - b) / (z - a), 0.25) * std::pow((z - d) / (z - c), 0.25); }
  cplx r(cplx z) const {
    const cplx s = xi(z);
    return s * s * (z - a) * (z - c);
  }
  cplx chi(cplx w) const {
    const cplx u = w / (2.0 * K);
    return theta(ThetaKind::k11, u - t * L, lat, 0) / theta(ThetaKind::k11, u, lat, 0);
  }
  cplx wmap(cplx z, double z0, cplx w0) const {
    auto f = [&](double s) {
      const cplx nu = z0 + (z - z0) * s * s;
      return 2.0 * (z - z0) * s / r(nu);
    };
    using G = boost::math::quadrature::gauss<double, 30>;
    const double re = G::integrate([&](double s) { return f(s).real(); }, 0.0, 1.0);
    const double im = G::integrate([&](double s) { return f(s).imag(); }, 0.0, 1.0);
    return w0 + m * cplx(re, im);
  }

  // endpoint 0 = a, 3 = d
  cplx residue(int which, double radius) const {
    const double z0 = which == 0 ? a : d;
    const cplx w0 = which == 0 ? cplx(K) : cplx(0.0);
    const cplx w1 = eta / 2.0 - K + kI * kPi, w2 = -eta / 2.0 + K + kI * kPi;
    const cplx n1 = chi(eta / 2.0 - w1), n2 = chi(-eta / 2.0 - w2);
    const int N = 400;
    cplx acc = 0.0;
    for (int n = 0; n < N; ++n) {
      const double th = 2.0 * kPi * (n + 0.5) / N;
      const cplx z = z0 + radius * std::exp(kI * th);
      const cplx w = wmap(z, z0, w0);
      const cplx s = xi(z);
      const cplx sp = (s + 1.0 / s) / 2.0, sm = (s - 1.0 / s) / (2.0 * kI);
      const cplx U11 = sp * chi(w - w1) / n1, U12 = sm * chi(-w - w1) / n1;
      const cplx U21 = -sm * chi(w - w2) / n2, U22 = sp * chi(-w - w2) / n2;
      const cplx det = U11 * U22 - U12 * U21;
      cplx M11, M12, M21, M22, pre;
      if (which == 0) {
        M11 = -1.0, M12 = 6.0 * kI, M21 = 6.0 * kI, M22 = 1.0;
        pre = 1.0 / (36.0 * std::pow(a - z, 1.5) * (ra.A - ra.B * (z - a)));
      } else {
        M11 = 1.0, M12 = 6.0 * kI, M21 = 6.0 * kI, M22 = -1.0;
        pre = 1.0 / (36.0 * std::pow(z - d, 1.5) * (rd.A + rd.B * (z - d)));
      }
      const cplx UM11 = U11 * M11 + U12 * M21, UM12 = U11 * M12 + U12 * M22;
      acc += pre * (UM11 * U22 - UM12 * U21) / det * (kI * radius * std::exp(kI * th)) * (2.0 * kPi / N);
    }
    return acc / (2.0 * kPi * kI);
  }
};

}  // namespace

TEST_SUITE("asymptotics") {
  TEST_CASE("period averages of the amplitudes") {
    const double x = 0.6;
    const auto p = profile(kEta5, x);
    const double period = 1.0 / std::abs(p.L);
    for (double t0 : {0.0, 3.7}) {
      const int n = 64;
      double m0 = 0.0, mlog = 0.0;
      for (int k = 0; k < n; ++k) {
        const auto a = p_amplitudes(kEta5, x, t0 + (k + 0.5) * period / n);
        m0 += a.p0 / n;
        mlog += std::log(a.p_plus) / n;
      }
      CHECK(std::abs(m0) < 1e-8);
      CHECK(std::abs(mlog - 0.5 * kEta5 * (kEta5 / (2.0 * *p.K) - 1.0)) < 1e-8);
    }
  }

  TEST_CASE("p0 through U") {
    for (double x : {-0.5, 0.6, 1.5}) {
      const auto p = profile(kEta5, x);
      const RectLattice lat(*p.K);
      for (double t : {2.0, 7.3}) {
        const cplx th = theta(ThetaKind::k00, t * p.L, lat, 0), dth = theta(ThetaKind::k00, t * p.L, lat, 1);
        const double expect = p.U / (2.0 * *p.K) * (dth / th).real();
        CHECK(std::abs(p_amplitudes(kEta5, x, t).p0 - expect) < 1e-10);
        CHECK(p_amplitudes(kEta5, x, t).p_plus > 0.0);
      }
    }
    CHECK_THROWS_AS(p_amplitudes(kEta5, -1.5, 3.0), RegimeError);
  }

  TEST_CASE("predict") {
    const auto one = predict(kEta5, -1.5, 7.0);
    CHECK(one.regime == Regime::OneCutLeft);
    CHECK(std::abs(one.leading + 49.0 * (kEta5 * 2.25 / 2.0 + 0.8)) < 1e-10);
    CHECK(!one.theta_osc);
    CHECK(!one.log_term);
    CHECK(std::abs(one.predicted_alpha - 7.0 * 0.8) < 1e-14);
    CHECK(std::abs(one.predicted_log_beta - (-1.5 * 7.0 * kEta5 - kEta5 / 2.0)) < 1e-14);

    const double x = 0.6;
    const auto p = profile(kEta5, x);
    const double period = 1.0 / std::abs(p.L);
    const auto q1 = predict(kEta5, x, 4.0, 1e-2, 0.0), q2 = predict(kEta5, x, 4.0 + period, 1e-2, 0.0);
    REQUIRE(q1.theta_osc);
    CHECK(std::abs(*q1.theta_osc - *q2.theta_osc) < 1e-10);
    CHECK(std::abs(2.0 * p.gInf - p.ell - kEta5 * (x + p.L)) < 1e-10);
    CHECK(predict(kEta5, x_star(kEta5) + 1e-3, 5.0).near_boundary);
    CHECK(!predict(kEta5, 0.6, 5.0).near_boundary);
    CHECK_THROWS_AS(predict(kEta5, 0.6, 0.0), DomainError);
  }

  TEST_CASE("Toda profiles") {
    const auto l = toda_profiles(kEta5, -1.5, 10.0);
    CHECK(l.y1 == doctest::Approx(1.5 * kEta5));
    CHECK(l.y0 == doctest::Approx(kEta5 / 2.0));
    CHECK(l.a0 == doctest::Approx(std::exp(-kEta5 / 2.0)));
    CHECK(l.b0 == 0.0);
    const auto r = toda_profiles(kEta5, 2.5, 10.0);
    CHECK(r.y1 == 0.0);
    CHECK(r.y0 == 0.0);
    CHECK(r.a0 == 1.0);
    CHECK(r.b0 == 0.0);
    for (double x : {-0.5, 0.6, 1.5})
      for (double t : {3.0, 8.2}) {
        const auto m = toda_profiles(kEta5, x, t);
        CHECK(std::abs(m.y0 + std::log(p_amplitudes(kEta5, x, t).p_plus)) < 1e-10);
        CHECK(m.a0 > 0.0);
        const double period = 1.0 / std::abs(profile(kEta5, x).L);
        const auto n = toda_profiles(kEta5, x, t + period);
        CHECK(std::abs(m.y0 - n.y0) < 1e-9);
        CHECK(std::abs(m.a0 - n.a0) < 1e-9);
        CHECK(std::abs(m.b0 - n.b0) < 1e-9);
      }
    // y1 is continuous across x_*
    const double xs = x_star(kEta5);
    CHECK(std::abs(toda_profiles(kEta5, xs + 1e-7, 5.0).y1 + kEta5 * xs) < 1e-4);
  }

  TEST_CASE("residue structure") {
    const ResidueData r = residues(kEta5, 0.6, 7.0);
    CHECK(r.at[0].C < 0.0);
    CHECK(r.at[1].C > 0.0);
    CHECK(r.at[2].C > 0.0);
    CHECK(r.at[3].C > 0.0);
    CHECK(std::abs(r.X.imag()) < 1e-9);
    for (const auto& e : r.at) CHECK(e.T > 0.0);
    const double period = 1.0 / std::abs(profile(kEta5, 0.6).L);
    for (double t : {2.0, 5.5, 9.1}) {
      const cplx X1 = residues(kEta5, 0.6, t).X, X2 = residues(kEta5, 0.6, t + period).X;
      CHECK(std::abs(X1 - X2) < 1e-9);
      CHECK(std::abs(X1.imag()) < 1e-9);
    }
    CHECK_THROWS_AS(residues(kEta5, -1.5, 3.0), RegimeError);
  }

  TEST_CASE("outer-endpoint residues against contour integration") {
    for (auto [x, t] : {std::pair{0.0, 10.0}, {0.6, 7.0}}) {
      const ContourOracle o(kEta5, x, t);
      for (int which : {0, 3}) {
        const double gap = which == 0 ? o.b - o.a : o.d - o.c;
        const cplx c1 = o.residue(which, 0.25 * gap), c2 = o.residue(which, 0.1 * gap);
        const cplx closed = which == 0 ? o.ra.res11 : o.rd.res11;
        CHECK(std::abs(c1 - c2) < 1e-8);
        CHECK(std::abs(c1 - closed) < 1e-7);
      }
    }
  }

  TEST_CASE("log coefficient") {
    const double a64 = a_coefficient(kEta5, 64);
    CHECK(std::abs(a64 - a_coefficient(kEta5, 128)) < 1e-8);
    CHECK(std::abs(a64 - a_coefficient(kEta5, 64, 2.3)) < 1e-8);
    CHECK_THROWS_AS(a_coefficient(kEta5, 17), DomainError);
  }

  TEST_CASE("phi_minus") {
    const double q = 0.2, eta = -std::log(q);
    const auto at2 = phi_minus(q, 2.0);
    CHECK(std::abs(at2.value) < 1e-6);
    CHECK(std::abs(at2.argmax_y - 2.0) < 1e-6);
    double prev = 1e300;
    for (int k = 0; k <= 20; ++k) {
      const double mu = 0.1 * k;
      const auto r = phi_minus(q, mu);
      CHECK(r.value <= prev + 1e-12);
      CHECK(r.value >= profile(eta, mu).F - 1e-12);
      CHECK(std::abs(r.value - (profile(eta, r.argmax_y).F - eta / 2.0 * (mu - r.argmax_y) * (mu - r.argmax_y))) < 1e-12);
      CHECK(!r.outside_range);
      prev = r.value;
    }
    // brute-force grid oracle
    for (double mu : {0.3, 1.1}) {
      double best = -1e300;
      for (int k = 0; k <= 40000; ++k) {
        const double y = mu - 4.0 + k * (6.0 - mu) / 40000.0;
        best = std::max(best, profile(eta, y).F - eta / 2.0 * (mu - y) * (mu - y));
      }
      CHECK(std::abs(phi_minus(q, mu).value - best) < 1e-6);
    }
    // convexity on [0, 2]
    for (int k = 1; k < 20; ++k) {
      const double h = 0.1, mu = 0.1 * k;
      const double d2 = phi_minus(q, mu + h).value - 2.0 * phi_minus(q, mu).value + phi_minus(q, mu - h).value;
      CHECK(d2 > -1e-6);
    }
    CHECK(phi_minus(q, 2.5).outside_range);
  }

  TEST_CASE("Bessel-process tail") {
    CHECK(bessel_tail(kEta5, 2.5, 10.0) == 0.0);
    CHECK(bessel_tail(kEta5, -1.5, 10.0) == doctest::Approx(-100.0 * profile(kEta5, -1.5).F));
    const auto p = predict(kEta5, 0.6, 10.0, 1e-2, 0.1);
    CHECK(bessel_tail(kEta5, 0.6, 10.0, 0.1) == doctest::Approx(p.leading + *p.theta_osc + *p.log_term));
  }
}
