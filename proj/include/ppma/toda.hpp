#pragma once

#include <vector>

namespace ppma {

// y(t, s) = log Q(t, s) - log Q(t, s - 1).
double y_from_Q(double t, double s, double eta);

struct TodaResidual {
  double t;
  double s;
  double h;
  double lhs;  // y_tt + y_t / t
  double rhs;  // 4 (e^{y(s+1) - y(s)} - e^{y(s) - y(s-1)})
  double residual;
};

// Centered differences in t at step h; five log Q differences in total.
TodaResidual toda_residual(double t, double s, double eta, double h);

struct FlaschkaState {
  double t = 0.0;
  long s_lo = 0;
  long s_hi = 0;
  std::vector<double> a;  // a[i] at s = s_lo + i
  std::vector<double> b;

  double a_at(long s) const { return a.at(s - s_lo); }
  double b_at(long s) const { return b.at(s - s_lo); }
};

// Flaschka variables from determinants. dt <= 0 selects max(t, 1) * 1e-3.
FlaschkaState flaschka(double t, long s_lo, long s_hi, double eta, double dt = 0.0);

struct FlaschkaRun {
  FlaschkaState state;
  double boundary_drift = 0.0;  // largest change of the outermost cells
  long steps = 0;
};

// RK4 from the determinant state at t0 > 0 to t1. Cells outside [s_lo, s_hi]
// are held at the backgrounds: a = e^{-eta/2} on the left, 1 on the right,
// b = 0.
FlaschkaRun integrate_flaschka(double t0, double t1, long s_lo, long s_hi, double eta, double dt);

// Same, from an explicit initial state.
FlaschkaRun integrate_flaschka(const FlaschkaState& init, double t1, double eta, double dt);

struct ProfileComparison {
  double eta, x, t;
  double a, b;    // determinants at s = x t
  double a0, b0;  // leading asymptotics
  double err_a, err_b;
};

ProfileComparison compare_profiles(double eta, double x, double t);

}  // namespace ppma
