#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppma/asymptotics.hpp"
#include "ppma/equilibrium.hpp"
#include "ppma/errors.hpp"
#include "ppma/kernels.hpp"
#include "ppma/selftest.hpp"
#include "ppma/toda.hpp"

using namespace ppma;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kNumerical = 3, kPrecision = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<std::monostate, double, std::string>;
using Row = std::vector<Cell>;

struct Table {
  std::vector<std::string> cols;
  std::vector<Row> rows;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (size_t i = 0; i < t.cols.size(); ++i) os << (i ? "," : "") << t.cols[i];
  os << '\n';
  for (const Row& r : t.rows) {
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) os << ',';
      if (auto d = std::get_if<double>(&r[i])) os << fmt(*d);
      else if (auto s = std::get_if<std::string>(&r[i])) os << *s;
    }
    os << '\n';
  }
  return os.str();
}

// Numbers keep 17 significant digits, as in the csv.
std::string to_json(const Table& t) {
  std::string out = "[";
  for (size_t k = 0; k < t.rows.size(); ++k) {
    out += k ? ",\n {" : "\n {";
    const Row& r = t.rows[k];
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) out += ", ";
      out += nlohmann::json(t.cols[i]).dump() + ": ";
      if (auto d = std::get_if<double>(&r[i])) out += std::isfinite(*d) ? fmt(*d) : "null";
      else if (auto str = std::get_if<std::string>(&r[i])) out += nlohmann::json(*str).dump();
      else out += "null";
    }
    out += "}";
  }
  out += t.rows.empty() ? "]\n" : "\n]\n";
  return out;
}

struct Grid {
  std::optional<double> value, lo, hi, step;

  std::vector<double> values(const char* name) const {
    if (value) {
      if (lo || hi || step) throw ConfigError(std::string("--") + name + " conflicts with the range flags");
      return {*value};
    }
    if (!lo || !hi || !step) throw ConfigError(std::string("need --") + name + " or --" + name + "-min/max/step");
    if (!(*step > 0.0) || !(*hi >= *lo)) throw ConfigError(std::string("bad ") + name + " range");
    const long n = static_cast<long>(std::floor((*hi - *lo) / *step + 1e-9)) + 1;
    if (n > 1000000) throw ConfigError(std::string(name) + " grid too large");
    std::vector<double> v(n);
    for (long i = 0; i < n; ++i) v[i] = *lo + static_cast<double>(i) * *step;
    return v;
  }
};

struct Config {
  double eta = std::log(5.0);
  Grid x, t, mu;
  std::optional<double> s, h, q;
  std::string mode = "fermi";
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 1;
  std::string suite;
  int nodes = 64;
};

void add_grid(CLI::App* c, Grid& g, const std::string& name, const std::string& what) {
  c->add_option("--" + name, g.value, what);
  c->add_option("--" + name + "-min", g.lo);
  c->add_option("--" + name + "-max", g.hi);
  c->add_option("--" + name + "-step", g.step);
}

void add_io(CLI::App* c, Config& cfg) {
  c->add_option("--eta", cfg.eta, "Fermi parameter, > 0")->capture_default_str();
  c->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  c->add_option("--out", cfg.out, "output file (default stdout)");
}

void check_eta(const Config& c) {
  if (!(c.eta > 0.0) || !std::isfinite(c.eta)) throw ConfigError("--eta must be positive");
}

int exit_code(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const PrecisionError& err) {
    std::cerr << "precision budget exceeded: " << err.what() << " (max safe t ~ " << err.max_safe_t() << ")\n";
    return kPrecision;
  } catch (const DomainError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kConfig;
  } catch (const RegimeError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kConfig;
  } catch (const Error& err) {
    std::cerr << "numerical error: " << err.what() << '\n';
    return kNumerical;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kNumerical;
  }
}

// Evaluates rows in parallel, in input order. Any failure discards the table.
template <class F>
int fill(Table& tab, size_t n, F&& row) {
  tab.rows.assign(n, Row{});
  std::vector<std::exception_ptr> errs(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      tab.rows[i] = row(static_cast<size_t>(i));
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (const auto& e : errs)
    if (e) return exit_code(e);
  return kOk;
}

int emit(const Config& cfg, const Table& tab) {
  const std::string text = cfg.format == "json" ? to_json(tab) : to_csv(tab);
  if (cfg.out.empty()) {
    std::cout << text;
    return kOk;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) {
    std::cerr << "cannot open " << cfg.out << '\n';
    return kConfig;
  }
  f << text;
  return kOk;
}

Cell opt(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }

int cmd_rate_table(const Config& cfg) {
  check_eta(cfg);
  const auto xs = cfg.x.values("x");
  Table tab{{"x", "regime", "K", "L", "F", "dF", "d2F", "a", "b", "c", "d"}, {}};
  const int rc = fill(tab, xs.size(), [&](size_t i) {
    const EquilibriumProfile p = profile(cfg.eta, xs[i]);
    Row r{xs[i], regime_name(p.regime), opt(p.K), p.L, p.F, p.dF, p.d2F};
    if (p.endpoints) {
      for (double v : {p.endpoints->a, p.endpoints->b, p.endpoints->c, p.endpoints->d}) r.emplace_back(v);
    } else {
      r.resize(11);
    }
    return r;
  });
  return rc ? rc : emit(cfg, tab);
}

int cmd_endpoints(const Config& cfg) {
  check_eta(cfg);
  const auto xs = cfg.x.values("x");
  Table tab{{"x", "K", "a", "b", "c", "d"}, {}};
  const int rc = fill(tab, xs.size(), [&](size_t i) {
    const EquilibriumProfile p = profile(cfg.eta, xs[i]);
    if (!p.endpoints) throw RegimeError("endpoints: x outside the two-cut interval");
    const Endpoints& e = *p.endpoints;
    return Row{xs[i], *p.K, e.a, e.b, e.c, e.d};
  });
  return rc ? rc : emit(cfg, tab);
}

int cmd_density_sample(const Config& cfg) {
  check_eta(cfg);
  if (!cfg.x.value) throw ConfigError("density_sample needs a single --x");
  const auto mus = cfg.mu.values("mu");
  const DensityEvaluator dens(cfg.eta, *cfg.x.value);
  Table tab{{"mu", "rho", "h"}, {}};
  const int rc = fill(tab, mus.size(), [&](size_t i) {
    const DensitySample d = dens.sample(mus[i]);
    return Row{d.mu, d.rho, d.h};
  });
  return rc ? rc : emit(cfg, tab);
}

KernelMode parse_mode(const std::string& m) {
  return m == "postemp" ? KernelMode::PositiveTemperature : KernelMode::FermiWeighted;
}

int cmd_logq(const Config& cfg) {
  check_eta(cfg);
  const auto ts = cfg.t.values("t");
  if (cfg.s.has_value() == cfg.x.value.has_value()) throw ConfigError("logq needs exactly one of --s, --x");
  if (cfg.x.lo || cfg.x.hi || cfg.x.step) throw ConfigError("logq takes a single --x");
  const KernelMode mode = parse_mode(cfg.mode);
  for (double t : ts)
    if (!(t >= 0.0)) throw ConfigError("--t must be nonnegative");
  if (mode == KernelMode::PositiveTemperature && cfg.s && *cfg.s != std::round(*cfg.s))
    throw ConfigError("postemp mode needs an integer --s");
  std::optional<double> A;
  Table tab{{"t", "s", "logQ", "tail_bound", "predicted", "difference"}, {}};
  const int rc = fill(tab, ts.size(), [&](size_t i) {
    const double t = ts[i];
    double s = cfg.s ? *cfg.s : *cfg.x.value * t;
    if (mode == KernelMode::PositiveTemperature) s = std::round(s);
    const FredholmResult f = log_Q(t, s, cfg.eta, mode);
    Row r{t, s, f.logQ, f.tail_bound};
    if (t > 0.0) {
      const AsymptoticPrediction p = predict(cfg.eta, s / t, t);
      const double pred = p.leading + p.theta_osc.value_or(0.0) + p.log_term.value_or(0.0);
      r.emplace_back(pred);
      r.emplace_back(f.logQ - pred);
    } else {
      r.resize(6);
    }
    return r;
  });
  return rc ? rc : emit(cfg, tab);
}

int cmd_compare_observables(const Config& cfg) {
  check_eta(cfg);
  if (!cfg.x.value) throw ConfigError("compare_observables needs a single --x");
  const auto ts = cfg.t.values("t");
  for (double t : ts)
    if (!(t > 0.0)) throw ConfigError("--t must be positive");
  const double x = *cfg.x.value;
  Table tab{{"t", "s", "alpha_hat", "alpha_pred", "log_beta_hat", "log_beta_pred", "a", "a0", "b", "b0"}, {}};
  const int rc = fill(tab, ts.size(), [&](size_t i) {
    const double t = ts[i];
    const Observables o = observables_at_s(t, x * t, cfg.eta);
    const AsymptoticPrediction p = predict(cfg.eta, x, t, 1e-2, 0.0);
    const ProfileComparison c = compare_profiles(cfg.eta, x, t);
    return Row{t, o.s, o.alphaHat, p.predicted_alpha, std::log(o.betaHat), p.predicted_log_beta,
               c.a, c.a0, c.b, c.b0};
  });
  return rc ? rc : emit(cfg, tab);
}

int cmd_toda_residual(const Config& cfg) {
  check_eta(cfg);
  const auto ts = cfg.t.values("t");
  if (!cfg.s) throw ConfigError("toda_residual needs --s");
  const double h = cfg.h.value_or(0.02);
  for (double t : ts)
    if (!(t > h) || !(h > 0.0)) throw ConfigError("need t > h > 0");
  Table tab{{"t", "s", "h", "lhs", "rhs", "residual"}, {}};
  const int rc = fill(tab, ts.size(), [&](size_t i) {
    const TodaResidual r = toda_residual(ts[i], *cfg.s, cfg.eta, h);
    return Row{r.t, r.s, r.h, r.lhs, r.rhs, r.residual};
  });
  return rc ? rc : emit(cfg, tab);
}

int cmd_phi_minus(const Config& cfg) {
  const double q = cfg.q.value_or(0.2);
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("--q must lie in (0, 1)");
  const auto mus = cfg.mu.values("mu");
  Table tab{{"mu", "phi_minus", "argmax_y"}, {}};
  const int rc = fill(tab, mus.size(), [&](size_t i) {
    const PhiMinusResult r = phi_minus(q, mus[i]);
    return Row{mus[i], r.value, r.argmax_y};
  });
  return rc ? rc : emit(cfg, tab);
}

int cmd_acoef(const Config& cfg) {
  check_eta(cfg);
  if (cfg.nodes != 32 && cfg.nodes != 64 && cfg.nodes != 128) throw ConfigError("--nodes must be 32, 64 or 128");
  Table tab{{"eta", "A"}, {}};
  const int rc = fill(tab, 1, [&](size_t) { return Row{cfg.eta, a_coefficient(cfg.eta, cfg.nodes)}; });
  return rc ? rc : emit(cfg, tab);
}

int cmd_selftest(const Config& cfg) {
  std::vector<std::string> names = suite_names();
  if (!cfg.suite.empty()) {
    if (std::find(names.begin(), names.end(), cfg.suite) == names.end()) throw ConfigError("unknown suite " + cfg.suite);
    names = {cfg.suite};
  }
  bool all = true;
  for (const auto& n : names) {
    const SuiteResult r = run_suite(n, cfg.seed);
    std::printf("%-12s %s (%zu checks)\n", n.c_str(), r.passed() ? "PASS" : "FAIL", r.checks.size());
    for (const auto& c : r.checks)
      if (!c.ok) std::printf("  failed: %s  error %.3e  tol %.1e\n", c.name.c_str(), c.error, c.tol);
    all = all && r.passed();
  }
  return all ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiplicative averages of the Poissonized Plancherel measure"};
  app.require_subcommand(1);
  Config cfg;

  auto* rate = app.add_subcommand("rate_table", "F, L, K and endpoints on an x grid");
  add_io(rate, cfg);
  add_grid(rate, cfg.x, "x", "single x");

  auto* ends = app.add_subcommand("endpoints", "band endpoints a < b < c < d");
  add_io(ends, cfg);
  add_grid(ends, cfg.x, "x", "single x");

  auto* dens = app.add_subcommand("density_sample", "equilibrium density on a mu grid");
  add_io(dens, cfg);
  dens->add_option("--x", cfg.x.value)->required();
  add_grid(dens, cfg.mu, "mu", "single mu");

  auto* logq = app.add_subcommand("logq", "log Q(t, s) against the asymptotic expansion");
  add_io(logq, cfg);
  add_grid(logq, cfg.t, "t", "single t");
  logq->add_option("--x", cfg.x.value, "fixed x = s / t");
  logq->add_option("--s", cfg.s, "fixed s");
  logq->add_option("--mode", cfg.mode)->check(CLI::IsMember({"fermi", "postemp"}))->capture_default_str();

  auto* obs = app.add_subcommand("compare_observables", "alpha-hat, beta-hat and Flaschka variables vs asymptotics");
  add_io(obs, cfg);
  obs->add_option("--x", cfg.x.value)->required();
  add_grid(obs, cfg.t, "t", "single t");

  auto* toda = app.add_subcommand("toda_residual", "cylindrical Toda residual of determinant data");
  add_io(toda, cfg);
  add_grid(toda, cfg.t, "t", "single t");
  toda->add_option("--s", cfg.s)->required();
  toda->add_option("--fd-step", cfg.h, "finite-difference step (default 0.02)");

  auto* phi = app.add_subcommand("phi_minus", "lower-tail rate of q-PNG");
  phi->add_option("--q", cfg.q, "q in (0, 1), default 0.2");
  phi->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));
  phi->add_option("--out", cfg.out);
  add_grid(phi, cfg.mu, "mu", "single mu");

  auto* acoef = app.add_subcommand("acoef", "log-coefficient A(eta)");
  add_io(acoef, cfg);
  acoef->add_option("--nodes", cfg.nodes)->capture_default_str();

  auto* self = app.add_subcommand("selftest", "run the invariant suites");
  self->add_option("--suite", cfg.suite);
  self->add_option("--seed", cfg.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*rate) return cmd_rate_table(cfg);
    if (*ends) return cmd_endpoints(cfg);
    if (*dens) return cmd_density_sample(cfg);
    if (*logq) return cmd_logq(cfg);
    if (*obs) return cmd_compare_observables(cfg);
    if (*toda) return cmd_toda_residual(cfg);
    if (*phi) return cmd_phi_minus(cfg);
    if (*acoef) return cmd_acoef(cfg);
    if (*self) return cmd_selftest(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (...) {
    return exit_code(std::current_exception());
  }
  return kConfig;
}
