// Copyright 2026 The dpk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dpk/cli.hpp"
#include "support.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dpk::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixtures() { return std::string(DPK_FIXTURE_DIR) + "/ci"; }

// Value of a `# key = value` header line.
std::string header(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  const std::string prefix = "# " + key + " = ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("lifetime") {
    const auto r = run({"lifetime", "--ezpl-ev", "0.856", "--dipole-debye", "0.96", "--n", "3.485",
                        "--tau-pl-s", "3e-9", "8e-9"});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    CHECK(std::stod(header(r.out, "tau_rad_s")) == doctest::Approx(2.83e-6).epsilon(0.10));
    CHECK(r.out.find("quantum_yield") != std::string::npos);
  }

  TEST_CASE("spin levels and ODMR lines") {
    const auto r = run({"spin-levels", "--d-mhz", "439.3", "--e-mhz", "37.9"});
    REQUIRE(r.code == 0);
    CHECK(header(r.out, "allowed_transitions_MHz") == "401.4 477.2");
    const auto o = run({"odmr", "--fixtures", fixtures()});
    REQUIRE(o.code == 0);
    CHECK(o.out.find("401.4 1 allowed") != std::string::npos);
    CHECK(o.out.find("477.2 1 allowed") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    auto r = run({"lifetime", "--bogus"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());

    CHECK(run({}).code == 2);
    CHECK(run({"levels", "--manifest", "/nonexistent/manifest.txt"}).code == 2);
    CHECK(run({"lifetime", "--ezpl-ev", "0.856"}).code == 2);  // missing required value
    CHECK(run({"selection", "--initial", "E", "--final", "A1"}).code == 2);

    // Parse errors in an input file are input errors.
    const auto bad = run({"dipole", "--orbital-i", dpk::test::fixture("manifest.txt"),
                          "--orbital-f", dpk::test::fixture("manifest.txt")});
    CHECK(bad.code == 2);

    // Computation errors.
    r = run({"lifetime", "--ezpl-ev", "0", "--dipole-debye", "1", "--n", "3"});
    CHECK(r.code == 1);
    CHECK(r.err.find("NonPhysicalInput") != std::string::npos);
    CHECK(run({"lifetime", "--ezpl-ev", "0.856", "--dipole-debye", "0.96", "--n", "3.485",
               "--tau-pl-s", "1"}).code == 1);
  }

  TEST_CASE("every subcommand runs on the fixtures") {
    for (std::string cmd : {"lineshape", "lifetime", "dipole", "hyperfine", "spin-levels", "odmr",
                            "isotope", "levels", "ctl-diagram", "koopmans"}) {
      CAPTURE(cmd);
      const auto r = run({cmd, "--fixtures", fixtures()});
      CHECK(r.code == 0);
      CHECK(r.out.rfind("# " + cmd, 0) == 0);
    }
    const auto z = run({"zfs", "--fixtures", fixtures(), "--no-error-estimate"});
    CHECK(z.code == 0);
    CHECK(run({"zfs", "--point-spins", dpk::test::fixture("point_spins.txt")}).code == 0);
    for (std::string cmd : {"kinetics", "pl-curve", "odmr-contrast"})
      CHECK(run({cmd, "--config", dpk::test::fixture("rates.conf"), "--power", "0.5"}).code ==
            (cmd == "pl-curve" ? 2 : 0));
    CHECK(run({"selection", "--initial", "A1", "--final", "A1"}).code == 0);
  }

  TEST_CASE("ZFS on the fixture triplet density reports the coarse grid") {
    const auto r = run({"zfs", "--fixtures", fixtures()});
    CHECK(r.code == 1);
    CHECK(r.err.find("GridTooCoarse") != std::string::npos);
  }

  TEST_CASE("output is deterministic") {
    for (std::vector<std::string> args :
         {std::vector<std::string>{"lineshape", "--fixtures", fixtures()},
          {"kinetics", "--default-ci", "--power", "0.5", "--duration-s", "1e-5", "--samples", "5"},
          {"pl-curve", "--default-ci", "--points", "9", "--power-max", "4"}}) {
      const auto a = run(args), b = run(args);
      CHECK(a.code == 0);
      CHECK(a.out == b.out);
    }
  }

  TEST_CASE("kinetics headers echo the rates") {
    const auto r = run({"odmr-contrast", "--default-ci", "--power", "0.5", "--pair", "T0_Tp"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("assumed") != std::string::npos);
    CHECK(r.out.find("isc_out") != std::string::npos);
  }

  TEST_CASE("table format") {
    const auto r = run({"--format", "table", "lifetime", "--fixtures", fixtures()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("lifetime\n", 0) == 0);
    CHECK(r.out.find("tau_rad_s") != std::string::npos);
    CHECK(run({"--format", "xml", "lifetime"}).code == 2);
  }
}
