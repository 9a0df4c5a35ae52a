#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "ppma/kernels.hpp"

namespace {

struct Run {
  int rc;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PPMA_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::vector<std::string>> csv(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(s);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> r;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) r.push_back(cell);
    if (!line.empty() && line.back() == ',') r.emplace_back();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("rate_table csv") {
    const Run r = run("rate_table --x-min -1.2 --x-max 2.2 --x-step 0.85");
    REQUIRE(r.rc == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"x", "regime", "K", "L", "F", "dF", "d2F", "a", "b", "c", "d"});
    double prev = -1e9;
    for (size_t i = 1; i < rows.size(); ++i) {
      REQUIRE(rows[i].size() == 11);
      const double x = std::stod(rows[i][0]);
      CHECK(x > prev);
      prev = x;
    }
    CHECK(rows[1][1] == "OneCutLeft");
    CHECK(rows[1][2].empty());
    CHECK(rows[1][7].empty());
    CHECK(rows[5][1] == "VKLS");
    CHECK(std::stod(rows[5][4]) == 0.0);
    CHECK(rows[3][1] == "TwoCut");
    CHECK(!rows[3][10].empty());
  }

  TEST_CASE("json output and the t = 0 row") {
    const Run r = run("logq --s 0 --t-min 0 --t-max 2 --t-step 1 --format json");
    REQUIRE(r.rc == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.size() == 3);
    CHECK(j[0]["predicted"].is_null());
    CHECK(std::abs(j[0]["logQ"].get<double>() - ppma::log_Q_t0(0.0, std::log(5.0))) < 1e-14);
    CHECK(j[2]["t"].get<double>() == 2.0);
    CHECK(j[2]["logQ"].get<double>() < j[1]["logQ"].get<double>());
  }

  TEST_CASE("deterministic output") {
    const std::string args = "compare_observables --x 0.6 --t-min 4 --t-max 6 --t-step 1";
    const Run a = run(args), b = run(args);
    REQUIRE(a.rc == 0);
    CHECK(a.out == b.out);
  }

  TEST_CASE("exit codes") {
    CHECK(run("logq --x -1.5 --t 14").rc == 4);
    CHECK(run("endpoints --x 3").rc == 2);
    CHECK(run("rate_table --x 0.5 --eta -1").rc == 2);
    CHECK(run("logq --t 1").rc == 2);
    CHECK(run("no_such_command").rc == 2);
    CHECK(run("selftest --suite nope").rc == 2);
    CHECK(run("acoef --nodes 32").rc == 0);
  }

  TEST_CASE("selftest") {
    const Run r = run("selftest --suite elliptic");
    CHECK(r.rc == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(run("selftest").rc == 0);
  }
}
