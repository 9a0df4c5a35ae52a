#include "ppma/toda.hpp"

#include <algorithm>
#include <cmath>

#include "ppma/asymptotics.hpp"
#include "ppma/errors.hpp"
#include "ppma/kernels.hpp"

namespace ppma {

namespace {

// log Q is even in t.
double lq(double t, double s, double eta) { return log_Q(std::abs(t), s, eta).logQ; }

}  // namespace

double y_from_Q(double t, double s, double eta) {
  if (!(t >= 0.0)) throw DomainError("y_from_Q: t must be nonnegative");
  return lq(t, s, eta) - lq(t, s - 1.0, eta);
}

TodaResidual toda_residual(double t, double s, double eta, double h) {
  if (!(h > 0.0) || !(t > h)) throw DomainError("toda_residual: need t > h > 0");
  const double ym = y_from_Q(t - h, s, eta);
  const double y0 = y_from_Q(t, s, eta);
  const double yp = y_from_Q(t + h, s, eta);
  const double yr = y_from_Q(t, s + 1.0, eta);
  const double yl = y_from_Q(t, s - 1.0, eta);
  TodaResidual r{t, s, h, 0.0, 0.0, 0.0};
  r.lhs = (yp - 2.0 * y0 + ym) / (h * h) + (yp - ym) / (2.0 * h * t);
  r.rhs = 4.0 * (std::exp(yr - y0) - std::exp(y0 - yl));
  r.residual = std::abs(r.lhs - r.rhs);
  if (!std::isfinite(r.residual)) throw NumericalError("toda_residual: non-finite residual");
  return r;
}

FlaschkaState flaschka(double t, long s_lo, long s_hi, double eta, double dt) {
  if (!(t >= 0.0)) throw DomainError("flaschka: t must be nonnegative");
  if (s_hi < s_lo) throw DomainError("flaschka: empty s range");
  if (dt <= 0.0) dt = std::max(t, 1.0) * 1e-3;
  const long n = s_hi - s_lo + 1;
  // log Q on s_lo - 1 .. s_hi + 1 at t, and on s_lo - 1 .. s_hi at t +- dt
  std::vector<double> q(n + 2), qp(n + 1), qm(n + 1);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n + 2; ++i) {
    const double s = static_cast<double>(s_lo - 1 + i);
    q[i] = lq(t, s, eta);
    if (i < n + 1) {
      qp[i] = lq(t + dt, s, eta);
      qm[i] = lq(t - dt, s, eta);
    }
  }
  FlaschkaState st;
  st.t = t;
  st.s_lo = s_lo;
  st.s_hi = s_hi;
  st.a.resize(n);
  st.b.resize(n);
  for (long i = 0; i < n; ++i) {
    // index i + 1 is s
    st.a[i] = std::exp(0.5 * (q[i + 2] + q[i]) - q[i + 1]);
    const double yp = qp[i + 1] - qp[i], ym = qm[i + 1] - qm[i];
    st.b[i] = 0.25 * (yp - ym) / dt;
  }
  return st;
}

namespace {

struct Rhs {
  double eta;
  double a_left, a_right;

  void operator()(double t, const FlaschkaState& st, std::vector<double>& da, std::vector<double>& db) const {
    const long n = static_cast<long>(st.a.size());
    auto a = [&](long i) { return i < 0 ? a_left : i >= n ? a_right : st.a[i]; };
    auto b = [&](long i) { return i < 0 || i >= n ? 0.0 : st.b[i]; };
    for (long i = 0; i < n; ++i) {
      da[i] = a(i) * (b(i + 1) - b(i));
      db[i] = 2.0 * (a(i) * a(i) - a(i - 1) * a(i - 1)) - b(i) / t;
    }
  }
};

}  // namespace

FlaschkaRun integrate_flaschka(const FlaschkaState& init, double t1, double eta, double dt) {
  if (!(init.t > 0.0)) throw DomainError("integrate_flaschka: t0 must be positive");
  if (!(dt > 0.0)) throw DomainError("integrate_flaschka: dt must be positive");
  if (init.a.empty() || init.a.size() != init.b.size()) throw DomainError("integrate_flaschka: bad state");
  const Rhs f{eta, std::exp(-eta / 2.0), 1.0};
  const long n = static_cast<long>(init.a.size());
  const long steps = std::max(1L, std::lround(std::abs(t1 - init.t) / dt));
  const double h = (t1 - init.t) / static_cast<double>(steps);

  FlaschkaRun run;
  FlaschkaState y = init, tmp = init;
  std::vector<double> k1a(n), k1b(n), k2a(n), k2b(n), k3a(n), k3b(n), k4a(n), k4b(n);
  auto stage = [&](const std::vector<double>& ka, const std::vector<double>& kb, double c) {
    for (long i = 0; i < n; ++i) {
      tmp.a[i] = y.a[i] + c * ka[i];
      tmp.b[i] = y.b[i] + c * kb[i];
    }
  };
  const double scale = 10.0 * (1.0 + *std::max_element(init.a.begin(), init.a.end()));
  for (long k = 0; k < steps; ++k) {
    const double t = y.t;
    f(t, y, k1a, k1b);
    stage(k1a, k1b, h / 2.0);
    f(t + h / 2.0, tmp, k2a, k2b);
    stage(k2a, k2b, h / 2.0);
    f(t + h / 2.0, tmp, k3a, k3b);
    stage(k3a, k3b, h);
    f(t + h, tmp, k4a, k4b);
    for (long i = 0; i < n; ++i) {
      y.a[i] += h / 6.0 * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
      y.b[i] += h / 6.0 * (k1b[i] + 2.0 * k2b[i] + 2.0 * k3b[i] + k4b[i]);
      if (!(y.a[i] > 0.0) || !(std::abs(y.a[i]) < scale) || !(std::abs(y.b[i]) < scale))
        throw NumericalError("integrate_flaschka: blowup, reduce dt");
    }
    y.t = init.t + h * static_cast<double>(k + 1);
    run.boundary_drift = std::max({run.boundary_drift, std::abs(y.a.front() - init.a.front()),
                                   std::abs(y.a.back() - init.a.back()), std::abs(y.b.front() - init.b.front()),
                                   std::abs(y.b.back() - init.b.back())});
  }
  y.t = t1;
  run.state = std::move(y);
  run.steps = steps;
  return run;
}

FlaschkaRun integrate_flaschka(double t0, double t1, long s_lo, long s_hi, double eta, double dt) {
  if (!(t0 > 0.0)) throw DomainError("integrate_flaschka: t0 must be positive");
  return integrate_flaschka(flaschka(t0, s_lo, s_hi, eta), t1, eta, dt);
}

ProfileComparison compare_profiles(double eta, double x, double t) {
  if (!(t > 0.0)) throw DomainError("compare_profiles: t must be positive");
  const double s = x * t;
  const double dt = t * 1e-3;
  const double q0 = lq(t, s, eta), qm = lq(t, s - 1.0, eta), qp = lq(t, s + 1.0, eta);
  const double yp = lq(t + dt, s, eta) - lq(t + dt, s - 1.0, eta);
  const double ym = lq(t - dt, s, eta) - lq(t - dt, s - 1.0, eta);
  const TodaAsym asym = toda_profiles(eta, x, t);
  ProfileComparison c{};
  c.eta = eta;
  c.x = x;
  c.t = t;
  c.a = std::exp(0.5 * (qp + qm) - q0);
  c.b = 0.25 * (yp - ym) / dt;
  c.a0 = asym.a0;
  c.b0 = asym.b0;
  c.err_a = std::abs(c.a - c.a0);
  c.err_b = std::abs(c.b - c.b0);
  return c;
}

}  // namespace ppma
