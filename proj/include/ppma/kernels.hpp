#pragma once

#include <vector>

namespace ppma {

// J_0(arg) .. J_max(arg); negative orders by parity.
struct BesselTable {
  double arg = 0.0;
  int max_order = 0;
  std::vector<double> values;

  double operator()(long m) const;  // 0 beyond max_order
};

BesselTable bessel_row(double arg, int max_order);

// Discrete Bessel kernel K(i, j; t) on half-integers i, j.
double discrete_bessel(double i, double j, double t);

// 1 / (1 + exp(-eta z)).
double fermi_weight(double z, double eta);

// Positive-temperature kernel K_eta(i, j; t) on half-integers,
//   sum_ell J_{i+ell-1/2}(2t) J_{j+ell-1/2}(2t) / (1 + exp(-(ell + fermi_shift) eta)).
// fermi_shift = 0 is the textbook form. Restricted to i > s, fermi_shift = -1/2
// reproduces Q(t, s); fermi_shift = 0 gives Q(t, s - 1/2).
double pos_temp_kernel(double i, double j, double t, double eta, double fermi_shift = 0.0);

enum class KernelMode { FermiWeighted, PositiveTemperature };

const char* mode_name(KernelMode m);

struct KernelWindow {
  double lo = 0.0;  // smallest half-integer index
  int size = 0;
  double t = 0.0;
  double s = 0.0;
  double eta = 0.0;
  KernelMode mode = KernelMode::FermiWeighted;
};

struct FredholmResult {
  double logQ = 0.0;
  KernelWindow window;
  double tail_bound = 0.0;  // |logQ(N) - logQ(N/2)| at acceptance
  double min_pivot = 1.0;
};

// log det(I - H) with adaptive window doubling.
//  FermiWeighted: H = sqrt(sigma(i - s)) K(i, j) sqrt(sigma(j - s)) on Z'.
//  PositiveTemperature: H = K_eta (fermi_shift -1/2) restricted to i, j > s
//  (s must be an integer).
// s may be real in FermiWeighted mode.
FredholmResult log_Q(double t, double s, double eta, KernelMode mode = KernelMode::FermiWeighted);

// log Q(0, s) as the closed product over the empty partition.
double log_Q_t0(double s, double eta);

// Explicit-window variant (no doubling); used by tests of the doubling rule.
FredholmResult log_Q_window(double t, double s, double eta, KernelMode mode, long kmin, long kmax);

struct Observables {
  double alphaHat = 0.0;
  double betaHat = 0.0;
  double gammaHat = 0.0;
  double s = 0.0;         // round(x t)
  double x_realized = 0;  // s / t
};

// dt <= 0 selects t * 1e-3.
Observables observables(double t, double x, double eta, double dt = 0.0);

// Same at an explicit s (real s allowed).
Observables observables_at_s(double t, double s, double eta, double dt = 0.0);

}  // namespace ppma
