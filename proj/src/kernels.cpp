#include "ppma/kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ppma/errors.hpp"

namespace ppma {

namespace {

constexpr double kLn10 = 2.302585092994046;
constexpr double kWindowTol = 1e-10;
constexpr int kMaxWindow = 8192;
// Smallest pivot we trust. Rounding noise in logQ is about eps / sqrt(min
// pivot), so this floor keeps it near 1e-6.
constexpr double kPivotFloor = 1e-20;
constexpr double kQShift = -0.5;

void check_t(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and nonnegative");
}
void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive and finite");
}

// Orders beyond this are below ~1e-20 at argument 2t and treated as zero.
long bessel_cutoff(double t) { return static_cast<long>(std::ceil(2.0 * t + 10.0 * std::cbrt(2.0 * t) + 40.0)); }

// Bessel values on [-M, M] plus tail sums of squares.
struct BesselCache {
  long M;
  BesselTable tab;
  std::vector<double> tail;  // tail[n] = sum_{m >= n} J_m^2, n = 0..M+1

  explicit BesselCache(double t) : M(bessel_cutoff(t)), tab(bessel_row(2.0 * t, static_cast<int>(M))) {
    tail.assign(M + 2, 0.0);
    for (long n = M; n >= 0; --n) tail[n] = tail[n + 1] + tab.values[n] * tab.values[n];
  }
  double J(long m) const { return tab(m); }
  double tail_sq(long n) const {  // sum_{m >= n} J_m^2, any integer n
    if (n > M) return 0.0;
    if (n >= 0) return tail[n];
    // sum over m >= n < 0 is 1 - sum_{m <= n-1} J_m^2 = 1 - tail[1 - n]
    return 1.0 - tail_sq(1 - n);
  }
  // sum_{m > k} J_m^2 and its complement, both accurate when small
  double upper(long k) const { return k >= 0 ? tail_sq(k + 1) : 1.0 - tail_sq(-k); }
  double lower(long k) const { return k >= 0 ? 1.0 - tail_sq(k + 1) : tail_sq(-k); }
};

double kernel_entry(const BesselCache& bc, long k, long l, double t) {
  if (k == l) return bc.upper(k);
  return t * (bc.J(k) * bc.J(l + 1) - bc.J(k + 1) * bc.J(l)) / static_cast<double>(k - l);
}

double sigma_w(double z, double eta) { return fermi_weight(z, eta); }

FredholmResult factor(const Eigen::MatrixXd& Bt, const KernelWindow& w) {
  // pivots of I - H are the squared diagonal of R in B^T P = Q R
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Bt);
  const auto& R = qr.matrixQR();
  FredholmResult r;
  r.window = w;
  double acc = 0.0, mn = 1.0;
  for (Eigen::Index i = 0; i < Bt.cols(); ++i) {
    const double p = R(i, i) * R(i, i);
    if (!(p > 0.0) || p > 1.0 + 1e-12) throw NumericalError("log_Q: pivot of I - H outside (0, 1]");
    mn = std::min(mn, p);
    acc += std::log(p);
  }
  if (mn < kPivotFloor) {
    // log(min pivot) grows about linearly in t at fixed x
    const double safe = w.t * std::log(kPivotFloor) / std::log(mn);
    throw PrecisionError("log_Q: pivot below double-precision floor", safe);
  }
  r.logQ = acc;
  r.min_pivot = mn;
  return r;
}

}  // namespace

double BesselTable::operator()(long m) const {
  const long a = m < 0 ? -m : m;
  if (a > max_order) return 0.0;
  const double v = values[static_cast<size_t>(a)];
  return (m < 0 && (a & 1)) ? -v : v;
}

BesselTable bessel_row(double arg, int max_order) {
  if (!(arg >= 0.0) || !std::isfinite(arg)) throw DomainError("bessel_row: argument must be finite and >= 0");
  if (max_order < 0) throw DomainError("bessel_row: max_order must be >= 0");
  BesselTable b;
  b.arg = arg;
  b.max_order = max_order;
  b.values.assign(static_cast<size_t>(max_order) + 1, 0.0);
  if (arg == 0.0) {
    b.values[0] = 1.0;
    return b;
  }
  // Miller: recur downward from N with arbitrary start, normalize with
  // J_0 + 2 sum J_{2k} = 1
  long N = std::max<long>(max_order, static_cast<long>(std::ceil(arg))) + 40;
  if (N & 1) ++N;
  std::vector<double> j(static_cast<size_t>(N) + 2, 0.0);
  j[N + 1] = 0.0;
  j[N] = 1e-300;
  double sum = 0.0;
  for (long m = N; m >= 1; --m) {
    j[m - 1] = 2.0 * m / arg * j[m] - j[m + 1];
    if (std::abs(j[m - 1]) > 1e250) {
      for (long q = m - 1; q <= N; ++q) j[q] *= 1e-250;
      sum *= 1e-250;
    }
    if (((m - 1) & 1) == 0 && m - 1 > 0) sum += 2.0 * j[m - 1];
  }
  sum += j[0];
  for (int m = 0; m <= max_order; ++m) b.values[m] = j[m] / sum;
  return b;
}

double fermi_weight(double z, double eta) {
  const double u = eta * z;
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double discrete_bessel(double i, double j, double t) {
  check_t(t);
  const long k = std::lround(i - 0.5), l = std::lround(j - 0.5);
  if (std::abs(i - 0.5 - k) > 1e-12 || std::abs(j - 0.5 - l) > 1e-12)
    throw DomainError("discrete_bessel: indices must be half-integers");
  if (t == 0.0) return (k == l && k < 0) ? 1.0 : 0.0;
  BesselCache bc(t);
  return kernel_entry(bc, k, l, t);
}

double pos_temp_kernel(double i, double j, double t, double eta, double fermi_shift) {
  check_t(t);
  check_eta(eta);
  const long k = std::lround(i - 0.5), l = std::lround(j - 0.5);
  if (std::abs(i - 0.5 - k) > 1e-12 || std::abs(j - 0.5 - l) > 1e-12)
    throw DomainError("pos_temp_kernel: indices must be half-integers");
  BesselCache bc(t);
  const long lmin = -static_cast<long>(std::ceil(45.0 / eta));
  double acc = 0.0;
  // ell range where both Bessel factors are non-negligible
  const long lo = std::max(lmin, -bc.M - std::min(k, l));
  const long hi = bc.M - std::max(k, l);
  for (long ell = lo; ell <= hi; ++ell)
    acc += bc.J(k + ell) * bc.J(l + ell) * sigma_w(static_cast<double>(ell) + fermi_shift, eta);
  return acc;
}

const char* mode_name(KernelMode m) {
  return m == KernelMode::FermiWeighted ? "fermi_weighted" : "positive_temperature";
}

double log_Q_t0(double s, double eta) {
  check_eta(eta);
  // sum_{i >= 1} -log(1 + exp(eta (1/2 - i - s)))
  double acc = 0.0;
  for (long i = 1;; ++i) {
    const double y = eta * (0.5 - static_cast<double>(i) - s);
    const double term = y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
    acc -= term;
    if (y < 0.0 && term < 1e-18) break;
    if (i > 100000000) throw ConvergenceError("log_Q_t0: series did not terminate");
  }
  return acc;
}

FredholmResult log_Q_window(double t, double s, double eta, KernelMode mode, long kmin, long kmax) {
  check_t(t);
  check_eta(eta);
  if (kmax < kmin) throw DomainError("log_Q_window: empty window");
  const int n = static_cast<int>(kmax - kmin + 1);
  KernelWindow w{static_cast<double>(kmin) + 0.5, n, t, s, eta, mode};
  BesselCache bc(t);
  // I - H = B B^T with B known entrywise to relative precision; factoring B
  // instead of I - H squares the condition number we lose digits to.
  // Completeness gives 1 - K(k,l) = sum_{m <= 0} J_{k+m} J_{l+m}.
  Eigen::MatrixXd Bt;  // B^T, one column per window index
  if (mode == KernelMode::FermiWeighted) {
    const long mlo = -bc.M - kmax, mhi = std::min<long>(0, bc.M - kmin);
    const long nc = std::max<long>(0, mhi - mlo + 1);
    Bt = Eigen::MatrixXd::Zero(n + nc, n);
    for (int a = 0; a < n; ++a) {
      const long k = kmin + a;
      const double z = static_cast<double>(k) + 0.5 - s;
      Bt(a, a) = std::sqrt(sigma_w(-z, eta));
      const double sq = std::sqrt(sigma_w(z, eta));
      for (long m = std::max(mlo, -bc.M - k); m <= std::min(mhi, bc.M - k); ++m) Bt(n + (m - mlo), a) = sq * bc.J(k + m);
    }
  } else {
    const double sr = std::round(s);
    if (std::abs(s - sr) > 1e-12) throw DomainError("log_Q: positive_temperature mode needs integer s");
    // Fermi factor taken at ell - 1/2: this is the kernel the Sylvester identity
    // produces from the Fermi-weighted form (see README).
    // 1 - K_eta(k,l) = sum_ell J_{k+ell} J_{l+ell} sigma(-(ell + c))
    const double c = kQShift;
    const long llo = -bc.M - kmax, lhi = bc.M - kmin;
    Bt = Eigen::MatrixXd::Zero(lhi - llo + 1, n);
    for (long ell = llo; ell <= lhi; ++ell) {
      const double wgt = std::sqrt(sigma_w(-(static_cast<double>(ell) + c), eta));
      for (int a = 0; a < n; ++a) Bt(ell - llo, a) = wgt * bc.J(kmin + a + ell);
    }
  }
  return factor(Bt, w);
}

FredholmResult log_Q(double t, double s, double eta, KernelMode mode) {
  check_t(t);
  check_eta(eta);
  if (!std::isfinite(s)) throw DomainError("s must be finite");
  if (t == 0.0) {
    FredholmResult r;
    r.logQ = log_Q_t0(s, eta);
    r.window = {0.0, 0, 0.0, s, eta, mode};
    return r;
  }
  const double left = 12.0 * kLn10 / eta;
  long kmin, kmax;
  const long right = static_cast<long>(std::ceil(2.0 * t + 8.0 * std::cbrt(t) + 10.0));
  if (mode == KernelMode::FermiWeighted) {
    kmin = static_cast<long>(std::floor(s - left));
    kmax = std::max(right, kmin + 8);
  } else {
    kmin = std::lround(s);  // first index s + 1/2
    // thermal tail of K_eta above 2t decays like exp(-eta (i - 2t))
    kmax = std::max(right + static_cast<long>(std::ceil(left)), kmin + 8);
  }
  FredholmResult prev = log_Q_window(t, s, eta, mode, kmin, kmax);
  while (true) {
    const long n = kmax - kmin + 1;
    if (2 * n > kMaxWindow) throw ConvergenceError("log_Q: window doubling did not converge");
    if (mode == KernelMode::FermiWeighted) {
      kmin -= (n + 1) / 2;
      kmax += n / 2;
    } else {
      kmax += n;
    }
    FredholmResult cur = log_Q_window(t, s, eta, mode, kmin, kmax);
    const double d = std::abs(cur.logQ - prev.logQ);
    // below 1e-10 only when rounding allows it
    const double noise = 2.0 * std::numeric_limits<double>::epsilon() / std::sqrt(cur.min_pivot);
    if (d < std::max(kWindowTol, noise)) {
      cur.tail_bound = d;
      return cur;
    }
    prev = cur;
  }
}

Observables observables_at_s(double t, double s, double eta, double dt) {
  if (!(t > 0.0)) throw DomainError("observables: t must be positive");
  if (dt <= 0.0) dt = t * 1e-3;
  if (dt >= t) throw DomainError("observables: dt must be smaller than t");
  const double q0 = log_Q(t, s, eta).logQ;
  const double qm = log_Q(t, s - 1.0, eta).logQ;
  const double qp = log_Q(t, s + 1.0, eta).logQ;
  const double tp = log_Q(t + dt, s, eta).logQ;
  const double tm = log_Q(t - dt, s, eta).logQ;
  Observables o;
  o.s = s;
  o.x_realized = s / t;
  o.betaHat = std::exp(qm - q0);
  o.gammaHat = std::exp(qp - q0);
  o.alphaHat = -0.5 * (tp - tm) / (2.0 * dt);
  return o;
}

Observables observables(double t, double x, double eta, double dt) {
  if (!std::isfinite(x)) throw DomainError("x must be finite");
  return observables_at_s(t, std::round(x * t), eta, dt);
}

}  // namespace ppma
