#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lop {

// Seeded, self-contained check suites behind the command line's `verify`
// subcommand. Each suite examines one headline property of the engine on
// randomized instances and reports the worst figure of merit it saw next to
// the bound it must stay within. Identical (suite, seed) runs produce
// identical reports.

struct CheckResult {
  std::string name;      // short check id, stable across runs
  bool passed = false;
  double worst = 0.0;    // worst observed figure of merit
  double bound = 0.0;    // the figure must satisfy worst <= bound
  std::string detail;    // sample counts, dimensions, and similar context
};

struct SuiteReport {
  std::string suite;
  std::string claim;     // stable anchor naming the property under test
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
};

// bijection, phase-loop, teleport, iqo, normal-form, translate-locc,
// free-state-preservation.
std::vector<std::string> suite_names();

// Runs one suite. Throws std::invalid_argument for an unknown name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

// Plain-text rendering: header lines (suite, claim, seed), one line per
// check, and a final result line.
std::string format_report(const SuiteReport& report);

}  // namespace lop
