#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/discrepancy.hpp"
#include "dsm/problems.hpp"

namespace dsm {

/// Process exit codes of the command line tool.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitVerificationFailure = 1,
  kExitUsage = 2,
  kExitPrecondition = 3,
};

enum class RuleSelection { Integral, Root, Both };

RuleSelection parse_rule(std::string_view text);

/// Builds a named test problem: "synthetic" (n x n, sigma_i = 1/i^2,
/// y coefficients 1/i), "gravity" and "heat" (Fredholm discretizations) or
/// "source" (synthetic with y = T^{1/4} v).
ProblemInstance make_problem(std::string_view name, int n, std::uint64_t seed);

struct SweepConfig {
  std::string problem = "synthetic";
  int n = 32;
  std::vector<double> deltas;
  double c = 1.5;
  std::string schedule = "c0=1,c1=1,b=0.5";
  RuleSelection rule = RuleSelection::Both;
  std::uint64_t seed = 0;
  std::string output_path;
  double quad_tolerance = 1e-10;
  double t_max = 1e16;
  /// When false the wall_time_ms column is written as 0 so that reports
  /// are byte-identical across runs.
  bool record_timing = true;

  /// Throws dsm::Error(Input) on empty or non-decreasing deltas, c outside
  /// (1, 2), or a malformed schedule.
  void validate() const;
};

struct SweepRow {
  double delta = 0.0;
  StoppingRule rule = StoppingRule::Root;
  double a_delta = 0.0;
  double t_delta = 0.0;
  double error = 0.0;
  double residual = 0.0;
  double delta_over_sqrt_a = 0.0;
  double wall_time_ms = 0.0;
  /// "ok" or the error code of the failed solve.
  std::string status = "ok";
  bool precondition_failure = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;

  bool any_precondition_failure() const;
  /// Header plus one row per (delta, rule), numbers with 17 significant
  /// digits; failed rows carry nan values.
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

/// Runs both or one of the discrepancy rules at every delta. Solver
/// failures mark the row and the sweep continues. Rows are ordered by delta
/// (as given) then rule.
SweepReport run_sweep(const SweepConfig& cfg);

enum class VerifySuite { Identities, Bounds, Lemmas, All };

/// Throws dsm::Error(Input) for unknown names.
VerifySuite parse_suite(std::string_view text);

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  /// Worst measured value of the checked quantity and the threshold it is
  /// compared against.
  double measured = 0.0;
  double threshold = 0.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  void write_csv(std::ostream& out) const;
};

/// Executes the invariant checks of the selected suite on seeded problems.
VerifyReport run_verify(VerifySuite suite, std::uint64_t seed = 0);

}  // namespace dsm
