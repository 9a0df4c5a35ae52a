#include "ppma/selftest.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "ppma/asymptotics.hpp"
#include "ppma/elliptic.hpp"
#include "ppma/equilibrium.hpp"
#include "ppma/errors.hpp"
#include "ppma/kernels.hpp"
#include "ppma/toda.hpp"

namespace ppma {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

class Runner {
 public:
  explicit Runner(std::string suite) { res_.suite = std::move(suite); }

  // f returns the deviation to compare against tol.
  void check(const std::string& name, double tol, const std::function<double()>& f) {
    double err;
    try {
      err = f();
    } catch (const Error&) {
      err = std::numeric_limits<double>::infinity();
    }
    res_.checks.push_back({name, err, tol, std::isfinite(err) && err <= tol});
  }

  SuiteResult take() { return std::move(res_); }

 private:
  SuiteResult res_;
};

cplx random_point(std::mt19937_64& rng, double K) {
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  return {u(rng) * K, u(rng) * kPi};
}

SuiteResult elliptic_suite(std::uint64_t seed) {
  Runner r("elliptic");
  std::mt19937_64 rng(seed);
  r.check("legendre identity", 1e-12, [] {
    double worst = 0.0;
    for (double K : {0.5, 2.0, 7.0, 30.0}) {
      RectLattice lat(K);
      const cplx lhs = kI * kPi * weier(WeierKind::zeta, K, lat) - K * weier(WeierKind::zeta, cplx(0, kPi), lat);
      worst = std::max(worst, std::abs(lhs - kI * kPi / 2.0) / std::max(1.0, K));
    }
    return worst;
  });
  r.check("theta quasi-periodicity", 1e-12, [&] {
    double worst = 0.0;
    for (double K : {1.0, 4.0}) {
      RectLattice lat(K);
      for (int rep = 0; rep < 5; ++rep) {
        const cplx z = random_point(rng, 0.4);
        const cplx v = theta(ThetaKind::k11, z, lat, 0);
        const cplx vt = theta(ThetaKind::k11, z + lat.tau, lat, 0);
        const cplx expect = -std::exp(-kPi * kI * lat.tau - 2.0 * kPi * kI * z) * v;
        worst = std::max(worst, std::abs(vt - expect) / std::max(1.0, std::abs(expect)));
        worst = std::max(worst, std::abs(theta(ThetaKind::k11, z + 1.0, lat, 0) + v) / std::max(1.0, std::abs(v)));
      }
    }
    return worst;
  });
  r.check("theta route seam", 1e-12, [&] {
    double worst = 0.0;
    RectLattice lat(kPi);
    for (int rep = 0; rep < 5; ++rep) {
      const cplx z = random_point(rng, 0.3);
      const cplx a = theta(ThetaKind::k00, z, lat, 0, ThetaRoute::Direct);
      const cplx b = theta(ThetaKind::k00, z, lat, 0, ThetaRoute::Transformed);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
    return worst;
  });
  r.check("wp ODE", 1e-9, [&] {
    double worst = 0.0;
    for (double K : {0.9, 4.5}) {
      RectLattice lat(K);
      const auto inv = invariants(lat);
      for (int rep = 0; rep < 10; ++rep) {
        const cplx z = random_point(rng, K);
        const cplx p = weier(WeierKind::wp, z, lat), pp = weier(WeierKind::wp_prime, z, lat);
        worst = std::max(worst, std::abs(pp * pp - 4.0 * p * p * p + inv.g2 * p + inv.g3) /
                                    (1.0 + std::pow(std::abs(p), 3)));
      }
    }
    return worst;
  });
  r.check("zeta addition", 1e-10, [&] {
    double worst = 0.0;
    RectLattice lat(2.3);
    auto Z = [&](cplx z) { return weier(WeierKind::zeta, z, lat); };
    auto P = [&](cplx z) { return weier(WeierKind::wp, z, lat); };
    auto P1 = [&](cplx z) { return weier(WeierKind::wp_prime, z, lat); };
    for (int rep = 0; rep < 10; ++rep) {
      const cplx z1 = 0.5 * random_point(rng, lat.K), z2 = 0.5 * random_point(rng, lat.K);
      if (std::abs(z1 - z2) < 0.2 || std::abs(z1 + z2) < 0.2) continue;
      const cplx res = Z(z1 + z2) - Z(z1) - Z(z2) - 0.5 * (P1(z1) - P1(z2)) / (P(z1) - P(z2));
      worst = std::max(worst, std::abs(res) / (1.0 + std::abs(Z(z1 + z2))));
    }
    return worst;
  });
  r.check("series vs theta route", 1e-10, [&] {
    double worst = 0.0;
    for (double K : {1.5, 5.0}) {
      RectLattice lat(K);
      for (int rep = 0; rep < 5; ++rep) {
        const cplx z = random_point(rng, K);
        for (WeierKind k : {WeierKind::sigma, WeierKind::zeta, WeierKind::wp}) {
          const cplx a = weier(k, z, lat), b = weier_theta(k, z, lat);
          worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
      }
    }
    return worst;
  });
  return r.take();
}

SuiteResult equilibrium_suite(std::uint64_t) {
  Runner r("equilibrium");
  r.check("x_*(log 5)", 1e-6, [] { return std::abs(x_star(std::log(5.0)) + 0.994136); });
  r.check("x_*(log 20)", 1e-6, [] { return std::abs(x_star(std::log(20.0)) + 0.634236); });
  const double eta = std::log(5.0);
  r.check("closed vs integral F", 1e-8, [&] {
    double worst = 0.0;
    for (double x : {-0.5, 0.6, 1.5}) worst = std::max(worst, std::abs(profile(eta, x).F - rate_integral_form(eta, x)));
    return worst;
  });
  r.check("theta vs weierstrass endpoints", 1e-9, [&] {
    const double K = solve_K(eta, 0.3);
    const Endpoints a = endpoints_theta(eta, K), b = endpoints_weierstrass(eta, K);
    return std::max({std::abs(a.a - b.a), std::abs(a.b - b.b), std::abs(a.c - b.c), std::abs(a.d - b.d)});
  });
  r.check("dF = eta (x + L), two-cut", 1e-9, [&] {
    double worst = 0.0;
    for (double x : {-0.9, -0.5, 0.6, 1.5, 1.99}) {
      const auto p = profile(eta, x);
      worst = std::max(worst, std::abs(p.dF - eta * (x + p.L)));
    }
    return worst;
  });
  r.check("cube law near x = 2", 0.1, [&] {
    const double x = 2.0 - std::ldexp(1.0, -8);
    return std::abs(12.0 * profile(eta, x).F / std::pow(2.0 - x, 3) - 1.0);
  });
  return r.take();
}

SuiteResult kernels_suite(std::uint64_t) {
  Runner r("kernels");
  r.check("bessel completeness", 1e-14, [] {
    const BesselTable b = bessel_row(6.0, 60);
    double s = b(0) * b(0);
    for (long k = 1; k <= 60; ++k) s += 2.0 * b(k) * b(k);
    return std::abs(s - 1.0);
  });
  r.check("modes agree (3, 2, log 5)", 1e-9, [] {
    const double a = log_Q(3.0, 2.0, std::log(5.0), KernelMode::FermiWeighted).logQ;
    const double b = log_Q(3.0, 2.0, std::log(5.0), KernelMode::PositiveTemperature).logQ;
    return std::abs(a - b) / std::abs(b);
  });
  r.check("t -> 0 limit", 1e-9, [] {
    const double eta = std::log(5.0);
    return std::abs(log_Q(1e-6, 0.0, eta).logQ - log_Q_t0(0.0, eta));
  });
  r.check("Q in (0, 1]", 0.0, [] {
    const double q = log_Q(5.0, 1.0, std::log(2.0)).logQ;
    return q <= 0.0 ? 0.0 : q;
  });
  return r.take();
}

SuiteResult asymptotics_suite(std::uint64_t) {
  Runner r("asymptotics");
  const double eta = std::log(5.0), x = 0.6;
  const double L = profile(eta, x).L;
  const double K = *profile(eta, x).K;
  r.check("period mean of p0", 1e-8, [&] {
    const int n = 64;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += p_amplitudes(eta, x, (k + 0.5) / (n * std::abs(L))).p0;
    return std::abs(acc / n);
  });
  r.check("period mean of log p+", 1e-8, [&] {
    const int n = 64;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += std::log(p_amplitudes(eta, x, (k + 0.5) / (n * std::abs(L))).p_plus);
    return std::abs(acc / n - 0.5 * eta * (eta / (2.0 * K) - 1.0));
  });
  r.check("phi_minus(2) = 0", 1e-6, [] { return std::abs(phi_minus(0.2, 2.0).value); });
  r.check("phi_minus nonincreasing", 1e-12, [] {
    double worst = 0.0, prev = phi_minus(0.2, 0.0).value;
    for (int k = 1; k <= 20; ++k) {
      const double v = phi_minus(0.2, 0.1 * k).value;
      worst = std::max(worst, v - prev);
      prev = v;
    }
    return worst;
  });
  r.check("one-cut toda profile", 1e-14, [&] {
    const TodaAsym a = toda_profiles(eta, -1.5, 10.0);
    return std::abs(a.a0 - std::exp(-eta / 2.0)) + std::abs(a.y1 - 1.5 * eta);
  });
  return r.take();
}

SuiteResult toda_suite(std::uint64_t) {
  Runner r("toda");
  const double eta = std::log(5.0);
  r.check("residual (3, 1, 0.02)", 1e-3, [&] { return toda_residual(3.0, 1.0, eta, 0.02).residual; });
  r.check("h^2 scaling", 0.2, [&] {
    const double r1 = toda_residual(3.0, 1.0, eta, 0.04).residual;
    const double r2 = toda_residual(3.0, 1.0, eta, 0.02).residual;
    return std::abs(std::log2(r1 / r2) - 2.0);
  });
  r.check("step initial data", 1e-10, [&] {
    double worst = 0.0;
    for (int s = -3; s <= 3; ++s)
      worst = std::max(worst, std::abs(y_from_Q(0.0, s + 0.5, eta) - std::log1p(std::exp(-eta * s))));
    return worst;
  });
  r.check("backgrounds at t = 2", 1e-6, [&] {
    const FlaschkaState st = flaschka(2.0, -20, 20, eta);
    return std::max(std::abs(st.a_at(-20) - std::exp(-eta / 2.0)), std::abs(st.a_at(20) - 1.0));
  });
  return r.take();
}

}  // namespace

bool SuiteResult::passed() const {
  for (const auto& c : checks)
    if (!c.ok) return false;
  return true;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"elliptic", "equilibrium", "kernels", "asymptotics", "toda"};
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "elliptic") return elliptic_suite(seed);
  if (name == "equilibrium") return equilibrium_suite(seed);
  if (name == "kernels") return kernels_suite(seed);
  if (name == "asymptotics") return asymptotics_suite(seed);
  if (name == "toda") return toda_suite(seed);
  throw DomainError("unknown suite: " + name);
}

}  // namespace ppma
