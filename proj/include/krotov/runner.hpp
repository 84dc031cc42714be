#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "krotov/config.hpp"
#include "krotov/engine.hpp"

namespace krotov {

/// Header of the convergence table.
const char* convergence_header();

/// Convergence table: one row per record entry, columns
/// iter, J, J_T, int_ga, int_gb, J_norm, delta_J, monotonic, A_bar, B_bar, C_bar, retries.
void write_convergence_csv(std::ostream& out, const OptimizationRecord& record);

/// Rows "k re im |tau_k|^2" with tau_k = <target_k|phi_k(T)>.
void write_overlaps(std::ostream& out, const StateSet& final_states, const StateSet& targets);

struct RunSettings {
  std::string out_dir = ".";
  bool strict_monotonic = false;
  bool dry_run = false;
  bool quiet = false;
};

struct RunOutcome {
  OptimizationRecord record;
  /// 0 ok, 1 error, 2 monotonicity failure in strict mode.
  int exit_code = 0;
  std::string message;
};

/// Builds the problem, iterates and writes the convergence table, the
/// optimized field ("t value") and the final overlaps into out_dir.
RunOutcome run(const RunConfig& config, const RunSettings& settings, std::ostream& log);

struct ScanRow {
  double value = 0.0;
  std::size_t iterations = 0;
  double final_J = 0.0;
  double final_J_T = 0.0;
  std::size_t violations = 0;
  std::size_t retries = 0;
  bool aborted = false;
  int exit_code = 0;
};

/// One independent run per value in out_dir/<parameter>_<index>; rows come
/// back in value order. At most `workers` runs execute at once.
std::vector<ScanRow> scan(const RunConfig& config, const std::string& parameter,
                          const std::vector<double>& values, const RunSettings& settings,
                          std::size_t workers, std::ostream& log);

void write_scan_summary(std::ostream& out, const std::string& parameter,
                        const std::vector<ScanRow>& rows);

/// KROTOV_THREADS when set to a positive integer, else the hardware concurrency (>= 1).
std::size_t worker_limit();

}  // namespace krotov
