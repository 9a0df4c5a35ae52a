#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "ppma/equilibrium.hpp"
#include "ppma/errors.hpp"

namespace ppma {

namespace {

constexpr double kPi = std::numbers::pi;

double rho_vkls(double mu) {
  if (mu <= -2.0) return 1.0;
  if (mu >= 2.0) return 0.0;
  return std::acos(mu / 2.0) / kPi;
}

template <class F>
double gk(F f, double lo, double hi, double tol = 1e-13) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, tol, &err);
  if (!std::isfinite(v)) throw ConvergenceError("density quadrature produced a non-finite value");
  return v;
}

// tanh-sinh on [lo, hi], run on [0, hi - lo] so nodes near the left end keep
// full relative precision; slivers below rounding level are dropped
template <class F>
double ts_integrate(F f, double lo, double hi, double tol, double& err) {
  const double w = hi - lo;
  if (w <= 1e-13 * std::max(1.0, std::abs(hi))) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  double e = 0.0;
  const double v = ts.integrate([&](double v) { return f(lo + v); }, 0.0, w, tol, &e);
  err += std::abs(e);
  return v;
}

// u log|u| - u, antiderivative of log|u|
double G(double u) { return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u; }

// Polynomial interpolant of rho on a band in the variable theta, nu = m + h cos(theta).
// rho is analytic in theta on [0, pi] (square-root edges become linear).
class BandInterp {
 public:
  static constexpr int N = 128;

  BandInterp() = default;
  template <class F>
  BandInterp(double lo, double hi, F rho) : m_((lo + hi) / 2.0), h_((hi - lo) / 2.0) {
    for (int k = 0; k < N; ++k) {
      const double c = std::cos((2.0 * k + 1.0) * kPi / (2.0 * N));
      th_[k] = kPi / 2.0 * (1.0 - c);
      w_[k] = ((k % 2) ? -1.0 : 1.0) * std::sin((2.0 * k + 1.0) * kPi / (2.0 * N));
      val_[k] = rho(m_ + h_ * std::cos(th_[k]));
    }
  }

  double operator()(double mu) const {
    const double th = std::acos(std::clamp((mu - m_) / h_, -1.0, 1.0));
    double num = 0.0, den = 0.0;
    for (int k = 0; k < N; ++k) {
      const double d = th - th_[k];
      if (d == 0.0) return val_[k];
      const double q = w_[k] / d;
      num += q * val_[k];
      den += q;
    }
    return num / den;
  }

 private:
  double m_ = 0.0, h_ = 1.0;
  std::array<double, N> th_{}, w_{}, val_{};
};

// h = rho - 1_{(-inf,0]} with cheap evaluation, plus piece structure for quadrature.
class HFunc {
 public:
  explicit HFunc(const DensityEvaluator& d) : dens_(d) {
    const auto& p = d.profile();
    if (p.regime == Regime::TwoCut) {
      const auto e = *p.endpoints;
      band1_ = BandInterp(e.a, e.b, [&](double mu) { return d.rho(mu); });
      band2_ = BandInterp(e.c, e.d, [&](double mu) { return d.rho(mu); });
    }
    bp_ = d.breakpoints();
  }

  double rho(double mu) const {
    const auto& p = dens_.profile();
    if (p.regime != Regime::TwoCut) return dens_.rho(mu);
    const auto e = *p.endpoints;
    if (mu > e.a && mu < e.b) return band1_(mu);
    if (mu > e.c && mu < e.d) return band2_(mu);
    return dens_.rho(mu);
  }
  double h(double mu) const { return rho(mu) - (mu <= 0.0 ? 1.0 : 0.0); }
  // h on a piece that lies on one side of 0; avoids the indicator jump when
  // quadrature nodes round onto the piece boundary
  double h_piece(double mu, bool negative_side) const { return rho(mu) - (negative_side ? 1.0 : 0.0); }

  const std::vector<double>& breakpoints() const { return bp_; }
  bool is_band(double lo, double hi) const { return dens_.is_band(lo, hi); }

  // int log(1/|mu - nu|) h(nu) dnu
  double potential(double mu, double* err = nullptr) const {
    double total = 0.0;
    for (size_t i = 0; i + 1 < bp_.size(); ++i) {
      const double lo = bp_[i], hi = bp_[i + 1];
      if (is_band(lo, hi)) {
        // integrate in u = |mu - nu| so the log singularity sits at u = 0
        const bool neg = hi <= 0.0;
        auto left = [&](double u) { return u == 0.0 ? 0.0 : -std::log(u) * h_piece(mu - u, neg); };
        auto right = [&](double u) { return u == 0.0 ? 0.0 : -std::log(u) * h_piece(mu + u, neg); };
        double e1 = 0.0;
        if (mu > lo && mu < hi) {
          total += ts_integrate(left, 0.0, mu - lo, 1e-10, e1) + ts_integrate(right, 0.0, hi - mu, 1e-10, e1);
        } else if (mu >= hi) {
          total += ts_integrate(left, mu - hi, mu - lo, 1e-10, e1);
        } else {
          total += ts_integrate(right, lo - mu, hi - mu, 1e-10, e1);
        }
        if (err) *err += e1;
      } else {
        const double c = h(0.5 * (lo + hi));
        if (c != 0.0) total -= c * (G(hi - mu) - G(lo - mu));
      }
    }
    return total;
  }

 private:
  const DensityEvaluator& dens_;
  BandInterp band1_, band2_;
  std::vector<double> bp_;
};

double wfun(double mu) { return mu == 0.0 ? 0.0 : 2.0 * mu * (std::log(std::abs(mu)) - 1.0); }

}  // namespace

DensityEvaluator::DensityEvaluator(double eta, double x) : prof_(ppma::profile(eta, x)) {}

double DensityEvaluator::left_edge() const {
  switch (prof_.regime) {
    case Regime::OneCutLeft: return -2.0 * std::exp(-prof_.eta / 2.0);
    case Regime::VKLS: return -2.0;
    case Regime::TwoCut: return prof_.endpoints->a;
  }
  return 0.0;
}

double DensityEvaluator::right_edge() const {
  switch (prof_.regime) {
    case Regime::OneCutLeft: return 2.0 * std::exp(-prof_.eta / 2.0);
    case Regime::VKLS: return 2.0;
    case Regime::TwoCut: return prof_.endpoints->d;
  }
  return 0.0;
}

std::vector<double> DensityEvaluator::breakpoints() const {
  std::vector<double> bp{0.0, left_edge(), right_edge()};
  if (prof_.regime == Regime::TwoCut) {
    bp.push_back(prof_.endpoints->b);
    bp.push_back(prof_.endpoints->c);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

bool DensityEvaluator::is_band(double lo, double hi) const {
  const double m = 0.5 * (lo + hi);
  if (prof_.regime != Regime::TwoCut) return m > left_edge() && m < right_edge();
  const auto& e = *prof_.endpoints;
  return (m > e.a && m < e.b) || (m > e.c && m < e.d);
}

// int_d^inf dnu / (R(nu)(nu - mu)) for mu < d. With delta = d - mu and
// nu = d + delta tan^2(phi) this is (2/sqrt(delta)) int_0^{pi/2} dphi / P(nu),
// P(nu) = sqrt((nu-a)(nu-b)(nu-c)); smooth even when mu is close to d.
// Returned without the 1/sqrt(delta) factor (the caller folds it into R).
double DensityEvaluator::tail_integral(double mu) const {
  const auto& e = *prof_.endpoints;
  const double delta = e.d - mu;
  auto f = [&](double phi) {
    const double c = std::cos(phi);
    if (c <= 0.0) return 0.0;
    // 1/P(nu) decays like cos^3(phi); rewrite to avoid overflow of tan
    const double c2 = c * c;
    const double w = e.d * c2 + delta * (1.0 - c2);  // nu cos^2
    return c * c2 / std::sqrt((w - e.a * c2) * (w - e.b * c2) * (w - e.c * c2));
  };
  return 2.0 * gk(f, 0.0, kPi / 2.0, 1e-12);
}

// int_c^d dnu / (R(nu)(nu - mu)); principal value when mu is inside (c, d)
double DensityEvaluator::band_integral(double mu) const {
  const auto& e = *prof_.endpoints;
  const double m = 0.5 * (e.c + e.d), h = 0.5 * (e.d - e.c);
  auto g = [&](double nu) { return 1.0 / std::sqrt((nu - e.a) * (nu - e.b)); };
  if (mu > e.c && mu < e.d) {
    // subtract g(mu); p.v. int_0^pi dtheta / (nu - mu) vanishes
    const double gm = g(mu);
    const double eps = 1e-12 * h;
    auto f = [&](double th) {
      const double nu = m + h * std::cos(th);
      const double dn = nu - mu;
      if (std::abs(dn) < eps) {
        // derivative of g at mu
        const double d = -0.5 * gm * (1.0 / (mu - e.a) + 1.0 / (mu - e.b));
        return d;
      }
      return (g(nu) - gm) / dn;
    };
    return gk(f, 0.0, kPi, 1e-11);
  }
  auto f = [&](double th) {
    const double nu = m + h * std::cos(th);
    return g(nu) / (nu - mu);
  };
  return gk(f, 0.0, kPi, 1e-11);
}

double DensityEvaluator::two_cut_rho(double mu) const {
  const auto& e = *prof_.endpoints;
  if (mu <= e.a) return 1.0;
  if (mu >= e.b && mu <= e.c) return 1.0;
  if (mu >= e.d) return 0.0;
  const double delta = e.d - mu;
  const double R3 = std::sqrt(std::abs((mu - e.a) * (mu - e.b) * (mu - e.c)));
  const double R = R3 * std::sqrt(delta);
  const double w = prof_.eta / (2.0 * kPi);
  // R * I_tail = R3 * tail_integral
  if (mu < e.b) return 1.0 + (R3 * tail_integral(mu) - R * w * band_integral(mu)) / kPi;
  return 1.0 - (R3 * tail_integral(mu) - R * w * band_integral(mu)) / kPi;
}

double DensityEvaluator::rho(double mu) const {
  if (!std::isfinite(mu)) throw DomainError("mu must be finite");
  switch (prof_.regime) {
    case Regime::VKLS: return rho_vkls(mu);
    case Regime::OneCutLeft: return rho_vkls(std::exp(prof_.eta / 2.0) * mu);
    case Regime::TwoCut: return two_cut_rho(mu);
  }
  return 0.0;
}

DensitySample DensityEvaluator::sample(double mu) const {
  const double r = rho(mu);
  return {mu, r, r - (mu <= 0.0 ? 1.0 : 0.0)};
}

DensitySample density(double eta, double x, double mu) { return DensityEvaluator(eta, x).sample(mu); }

double potential_coefficient(double eta) { return eta; }

double log_potential(const DensityEvaluator& dens, double mu) {
  HFunc hf(dens);
  return 2.0 * hf.potential(mu);
}

EnergyEstimate energy(const DensityEvaluator& dens) {
  const auto& p = dens.profile();
  HFunc hf(dens);
  const double cV = potential_coefficient(p.eta);
  std::vector<double> bp = hf.breakpoints();
  double val = 0.0, qerr = 0.0;
  // double integral
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    const double lo = bp[i], hi = bp[i + 1];
    const bool band = hf.is_band(lo, hi);
    const double c = band ? 0.0 : hf.h(0.5 * (lo + hi));
    if (!band && c == 0.0) continue;
    double inner_err = 0.0;
    auto f = [&](double mu) {
      const double hv = band ? hf.h_piece(mu, hi <= 0.0) : c;
      return hv == 0.0 ? 0.0 : hv * hf.potential(mu, &inner_err);
    };
    val += ts_integrate(f, lo, hi, 1e-8, qerr);
  }
  // linear terms, split at the kink of V
  std::vector<double> bq = bp;
  if (p.x > bp.front() && p.x < bp.back()) bq.push_back(p.x);
  std::sort(bq.begin(), bq.end());
  bq.erase(std::unique(bq.begin(), bq.end()), bq.end());
  for (size_t i = 0; i + 1 < bq.size(); ++i) {
    const double lo = bq[i], hi = bq[i + 1];
    auto f = [&](double mu) { return (wfun(mu) + cV * std::max(mu - p.x, 0.0)) * hf.h_piece(mu, hi <= 0.0); };
    val += ts_integrate(f, lo, hi, 1e-10, qerr);
  }
  if (!std::isfinite(val)) throw ConvergenceError("energy quadrature produced a non-finite value");
  return {val, qerr};
}

EnergyEstimate energy(double eta, double x) { return energy(DensityEvaluator(eta, x)); }

double robin_constant(const EquilibriumProfile& p) { return p.ell - 2.0 * p.gInf; }

std::string zone_name(Zone z) {
  switch (z) {
    case Zone::Void: return "void";
    case Zone::Band: return "band";
    case Zone::Saturated: return "saturated";
  }
  return "?";
}

std::vector<VariationalPoint> variational_check(double eta, double x, const std::vector<double>& grid, double tol) {
  DensityEvaluator dens(eta, x);
  const auto& p = dens.profile();
  if (p.regime == Regime::VKLS) throw RegimeError("variational_check: needs the TwoCut or OneCutLeft regime");
  HFunc hf(dens);
  const double cV = potential_coefficient(eta);
  const double robin = robin_constant(p);
  std::vector<VariationalPoint> out;
  out.reserve(grid.size());
  for (double mu : grid) {
    const double lhs = 2.0 * hf.potential(mu) + wfun(mu) + cV * std::max(mu - x, 0.0);
    const double r = lhs - robin;
    const double rho = dens.rho(mu);
    Zone z = Zone::Band;
    if (rho == 0.0) z = Zone::Void;
    else if (rho == 1.0) z = Zone::Saturated;
    bool ok = true;
    switch (z) {
      case Zone::Void: ok = r >= -tol; break;
      case Zone::Band: ok = std::abs(r) <= tol; break;
      case Zone::Saturated: ok = r <= tol; break;
    }
    out.push_back({mu, r, z, ok});
  }
  return out;
}

}  // namespace ppma
