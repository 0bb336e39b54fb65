// Command line front end: delta sweeps, invariant verification and
// problem export.
//
//   dsm sweep --problem synthetic --n 32 --deltas 1e-1,1e-2,1e-3 --rule both --out sweep.csv
//   dsm verify --suite all
//   dsm export-problem --problem gravity --n 32 --out gravity32/
//
// DSM_LOG_LEVEL=info|debug turns on progress messages on stderr.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsm/errors.hpp"
#include "dsm/harness.hpp"
#include "dsm/problems.hpp"
#include "dsm/schedule.hpp"

namespace {

int log_level() {
  const char* env = std::getenv("DSM_LOG_LEVEL");
  if (!env) return 0;
  const std::string level(env);
  if (level == "debug") return 2;
  if (level == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[dsm] " << msg << '\n';
}

std::vector<double> parse_deltas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw dsm::Error(dsm::ErrorKind::Input, "cannot parse delta '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical systems method regularization with discrepancy stopping rules"};
  app.require_subcommand(1);

  dsm::SweepConfig sweep;
  std::string deltas_text;
  std::string rule_text = "both";
  bool no_timing = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a delta sweep and write a CSV report");
  sweep_cmd->add_option("--problem", sweep.problem, "synthetic|source|gravity|heat")
      ->capture_default_str();
  sweep_cmd->add_option("--n", sweep.n, "problem size")->capture_default_str();
  sweep_cmd->add_option("--deltas", deltas_text, "comma-separated, strictly decreasing")
      ->required();
  sweep_cmd->add_option("--c", sweep.c, "discrepancy constant in (1, 2)")->capture_default_str();
  sweep_cmd->add_option("--schedule", sweep.schedule, "c0=<v>,c1=<v>,b=<v>")->capture_default_str();
  sweep_cmd->add_option("--rule", rule_text, "integral|root|both")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "random seed")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.output_path, "CSV path (stdout when omitted)");
  sweep_cmd->add_option("--quad-tol", sweep.quad_tolerance, "relative quadrature tolerance")
      ->capture_default_str();
  sweep_cmd->add_option("--t-max", sweep.t_max, "stopping time search horizon")
      ->capture_default_str();
  sweep_cmd->add_flag("--no-timing", no_timing, "write wall_time_ms as 0");

  std::string suite_text = "all";
  std::uint64_t verify_seed = 0;
  auto* verify_cmd = app.add_subcommand("verify", "run the invariant verification suites");
  verify_cmd->add_option("--suite", suite_text, "identities|bounds|lemmas|all")
      ->capture_default_str();
  verify_cmd->add_option("--seed", verify_seed, "random seed")->capture_default_str();
  std::string verify_out;
  verify_cmd->add_option("--out", verify_out, "CSV path (stdout when omitted)");

  std::string export_problem = "synthetic";
  int export_n = 32;
  std::uint64_t export_seed = 0;
  std::string export_dir;
  auto* export_cmd = app.add_subcommand("export-problem", "write A.mtx, f.csv, y.csv, metadata.txt");
  export_cmd->add_option("--problem", export_problem, "synthetic|source|gravity|heat")
      ->capture_default_str();
  export_cmd->add_option("--n", export_n, "problem size")->capture_default_str();
  export_cmd->add_option("--seed", export_seed, "random seed")->capture_default_str();
  export_cmd->add_option("--out", export_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dsm::kExitSuccess : dsm::kExitUsage;
  }

  try {
    if (*sweep_cmd) {
      sweep.deltas = parse_deltas(deltas_text);
      sweep.rule = dsm::parse_rule(rule_text);
      sweep.record_timing = !no_timing;
      sweep.validate();
      log_info("sweep " + sweep.problem + " n=" + std::to_string(sweep.n) + " over " +
               std::to_string(sweep.deltas.size()) + " noise levels");
      const dsm::SweepReport report = dsm::run_sweep(sweep);
      if (sweep.output_path.empty()) {
        report.write_csv(std::cout);
      } else {
        std::ofstream out(sweep.output_path);
        if (!out) throw dsm::Error(dsm::ErrorKind::Input, "cannot write " + sweep.output_path);
        report.write_csv(out);
        log_info("wrote " + sweep.output_path);
      }
      return report.any_precondition_failure() ? dsm::kExitPrecondition : dsm::kExitSuccess;
    }
    if (*verify_cmd) {
      const dsm::VerifySuite suite = dsm::parse_suite(suite_text);
      log_info("verify suite " + suite_text);
      const dsm::VerifyReport report = dsm::run_verify(suite, verify_seed);
      if (verify_out.empty()) {
        report.write_csv(std::cout);
      } else {
        std::ofstream out(verify_out);
        if (!out) throw dsm::Error(dsm::ErrorKind::Input, "cannot write " + verify_out);
        report.write_csv(out);
      }
      return report.all_passed() ? dsm::kExitSuccess : dsm::kExitVerificationFailure;
    }
    if (*export_cmd) {
      const dsm::ProblemInstance p = dsm::make_problem(export_problem, export_n, export_seed);
      dsm::export_problem(p, export_dir);
      log_info("exported " + p.label + " to " + export_dir);
      return dsm::kExitSuccess;
    }
  } catch (const dsm::Error& e) {
    std::cerr << "dsm: " << e.what() << '\n';
    if (e.kind() == dsm::ErrorKind::Input) return dsm::kExitUsage;
    return e.is_precondition() ? dsm::kExitPrecondition : dsm::kExitVerificationFailure;
  }
  return dsm::kExitUsage;
}
