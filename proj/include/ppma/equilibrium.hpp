#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ppma {

enum class Regime { OneCutLeft, TwoCut, VKLS };

std::string regime_name(Regime r);

struct Endpoints {
  double a, b, c, d;
};

struct EquilibriumProfile {
  double eta;
  double x;
  Regime regime;
  double xStar;
  std::optional<double> K;  // two-cut only
  double U = 0.0;
  double V = 0.0;
  double L = 0.0;
  std::optional<Endpoints> endpoints;
  double F = 0.0;
  double dF = 0.0;
  double d2F = 0.0;
  double g1 = 0.0;
  double gInf = 0.0;
  double ell = 0.0;
};

double x_star(double eta);

// U(K) from the Weierstrass sigma form.
double u_of_K(double eta, double K);
// U(K) from the theta form; kept for cross-checks.
double u_of_K_theta(double eta, double K);
double v_of_K(double eta, double K);

// Unique K in (eta/2, inf) with U(K) V(K) = -eta x / 2, for x in (x_*, 2).
double solve_K(double eta, double x);

// Regime for x, with boundary cases snapped to the closed-form branches.
Regime classify(double eta, double x);

EquilibriumProfile profile(double eta, double x);

// F through eta * int_{x_*}^x L(y) dy by adaptive quadrature. Test oracle:
// every node costs a K solve.
double rate_integral_form(double eta, double x);

// Endpoints in the two forms, at a given K.
Endpoints endpoints_theta(double eta, double K);
Endpoints endpoints_weierstrass(double eta, double K);

// Endpoints at x; RegimeError outside (x_*, 2).
Endpoints endpoints(double eta, double x);

// Closed form of F in theta form (second log-derivative of theta_11).
double rate_theta_form(double eta, double K, double x);

// ---- density and energy ----------------------------------------------------

struct DensitySample {
  double mu;
  double rho;
  double h;  // rho - 1_{(-inf,0]}
};

struct EnergyEstimate {
  double value;
  double quadrature_error;
};

// Evaluates rho_{eta,x} for one (eta, x). Holds the profile so repeated
// calls do not re-solve for K.
class DensityEvaluator {
 public:
  DensityEvaluator(double eta, double x);

  const EquilibriumProfile& profile() const { return prof_; }
  DensitySample sample(double mu) const;
  double rho(double mu) const;

  // Support of h as a list of breakpoints; h vanishes outside [front, back].
  std::vector<double> breakpoints() const;
  // True when rho is non-constant on (lo, hi) (lo, hi consecutive breakpoints).
  bool is_band(double lo, double hi) const;

  // rho is 1 on (-inf, left) and 0 on (right, inf).
  double left_edge() const;
  double right_edge() const;

 private:
  double two_cut_rho(double mu) const;
  double tail_integral(double mu) const;
  double band_integral(double mu) const;  // over (c, d), principal value inside

  EquilibriumProfile prof_;
};

DensitySample density(double eta, double x, double mu);

// Coefficient c in V(mu) = c [mu - x]_+. This is eta: the value for which the
// energy reproduces F and the band equality of the Robin condition holds (see
// README).
double potential_coefficient(double eta);

EnergyEstimate energy(const DensityEvaluator& dens);
EnergyEstimate energy(double eta, double x);

// Variational (Robin) check.
enum class Zone { Void, Band, Saturated };
std::string zone_name(Zone z);

// Constant on the bands of 2 int log(1/|mu-nu|) h + 2 mu (log|mu| - 1) + V.
// The profile's ell is the constant of g_+ + g_- + V, where g is normalized by
// g(z) = z (log z - 1) + gInf + O(1/z); the two differ by 2 gInf.
double robin_constant(const EquilibriumProfile& p);

struct VariationalPoint {
  double mu;
  double residual;  // lhs - robin_constant
  Zone zone;
  bool ok;          // sign condition of the zone holds within tolerance
};

std::vector<VariationalPoint> variational_check(double eta, double x, const std::vector<double>& grid,
                                                double tol = 5e-3);

// Logarithmic potential 2 int log(1/|mu - nu|) h(nu) dnu.
double log_potential(const DensityEvaluator& dens, double mu);

}  // namespace ppma
