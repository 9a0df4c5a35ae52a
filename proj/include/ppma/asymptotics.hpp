#pragma once

#include <array>
#include <complex>
#include <optional>

#include "ppma/equilibrium.hpp"

namespace ppma {

struct PAmplitudes {
  double p0;
  double p_plus;
};

// Oscillatory amplitudes of alpha-hat and beta-hat. Two-cut only.
PAmplitudes p_amplitudes(double eta, double x, double t);

struct AsymptoticPrediction {
  double t = 0.0;
  double x = 0.0;
  double eta = 0.0;
  Regime regime = Regime::TwoCut;
  double leading = 0.0;                 // -t^2 F
  std::optional<double> theta_osc;      // log theta(tL | i pi/K), two-cut
  std::optional<double> log_term;       // A log t, two-cut
  double predicted_log_beta = 0.0;
  double predicted_alpha = 0.0;
  bool near_boundary = false;           // |x - x_*| or |2 - x| below delta
};

// Expansion of log Q(t, xt) without the unknown constant. A is computed when
// not supplied.
AsymptoticPrediction predict(double eta, double x, double t, double delta = 1e-2,
                             std::optional<double> A = std::nullopt);

struct TodaAsym {
  double y1;
  double y0;
  double a0;
  double b0;
};

TodaAsym toda_profiles(double eta, double x, double t);

struct EndpointResidue {
  double z0;
  double T;
  double S;
  double A;
  double B;
  double C;
  std::complex<double> res11;
};

struct ResidueData {
  std::array<EndpointResidue, 4> at;  // a, b, c, d
  std::complex<double> X;             // -1/24 + sum of res11
};

ResidueData residues(double eta, double x, double t);

// Log-coefficient A(eta) = -2 L(0) int_0^{1/L(0)} X(0, tau) dtau, by
// Gauss-Legendre with `nodes` points over the period starting at t0.
double a_coefficient(double eta, int nodes = 64, double t0 = 0.0);

struct PhiMinusResult {
  double value;
  double argmax_y;
  bool outside_range;  // mu outside [0, 2]
};

PhiMinusResult phi_minus(double q, double mu);

// Predicted log P(b_1 <= x t) for the positive-temperature Bessel process,
// up to the unknown constant.
double bessel_tail(double eta, double x, double t, std::optional<double> A = std::nullopt);

}  // namespace ppma
