#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ppma {

struct CheckResult {
  std::string name;
  double error;  // measured deviation
  double tol;
  bool ok;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const;
};

// elliptic, equilibrium, kernels, asymptotics, toda
const std::vector<std::string>& suite_names();

// Runs one suite at default parameters. seed drives the random z samples.
// Library errors inside a check count as failures.
SuiteResult run_suite(const std::string& name, std::uint64_t seed = 1);

}  // namespace ppma
