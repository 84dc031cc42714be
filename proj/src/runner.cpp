#include "krotov/runner.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "krotov/io.hpp"

namespace krotov {
namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void open_for_write(std::ofstream& f, const std::filesystem::path& path) {
  f.open(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error("cannot write '" + path.string() + "'");
  }
}

}  // namespace

const char* convergence_header() {
  return "iter,J,J_T,int_ga,int_gb,J_norm,delta_J,monotonic,A_bar,B_bar,C_bar,retries";
}

void write_convergence_csv(std::ostream& out, const OptimizationRecord& record) {
  out << convergence_header() << '\n';
  for (const auto& e : record.entries) {
    out << e.iter << ',' << num(e.J) << ',' << num(e.J_T) << ',' << num(e.int_ga) << ','
        << num(e.int_gb) << ',' << num(e.J_norm) << ',' << num(e.delta_J) << ','
        << (e.monotonic ? 1 : 0) << ',' << num(e.A_bar) << ',' << num(e.B_bar) << ','
        << num(e.C_bar) << ',' << e.retries << '\n';
  }
}

void write_overlaps(std::ostream& out, const StateSet& final_states, const StateSet& targets) {
  out << "# k re im abs2\n";
  for (std::size_t k = 0; k < final_states.size() && k < targets.size(); ++k) {
    const Complex tau = targets[k].dot(final_states[k]);
    out << k << ' ' << num(tau.real()) << ' ' << num(tau.imag()) << ' ' << num(std::norm(tau))
        << '\n';
  }
}

RunOutcome run(const RunConfig& config, const RunSettings& settings, std::ostream& log) {
  RunOutcome outcome;
  try {
    const Problem problem = build_problem(config);
    if (settings.dry_run) {
      log << describe(config, problem);
      return outcome;
    }
    IterateOptions options = config.options;
    if (!settings.quiet) {
      options.on_iteration = [&log](const IterationEntry& e) {
        log << "iter " << e.iter << "  J = " << num(e.J) << "  J_T = " << num(e.J_T)
            << (e.monotonic ? "" : "  (not monotonic)")
            << (e.retries > 0 ? "  (retried)" : "") << '\n';
      };
    }
    outcome.record = iterate(problem, options);
    const OptimizationRecord& record = outcome.record;

    const std::filesystem::path dir(settings.out_dir);
    std::filesystem::create_directories(dir);
    {
      std::ofstream f;
      open_for_write(f, dir / config.convergence_file);
      write_convergence_csv(f, record);
    }
    {
      std::ofstream f;
      open_for_write(f, dir / config.field_file);
      io::write_field(f, problem.grid, record.final_field.values);
    }
    {
      std::ofstream f;
      open_for_write(f, dir / config.overlaps_file);
      write_overlaps(f, record.final_states, problem.targets);
    }

    if (record.aborted) {
      outcome.exit_code = 1;
      outcome.message = record.abort_reason;
    } else if (settings.strict_monotonic && record.violations() > 0) {
      outcome.exit_code = 2;
      outcome.message = std::to_string(record.violations()) + " non-monotonic iteration(s)";
    }
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.message = e.what();
  }
  if (!outcome.message.empty()) {
    log << "error: " << outcome.message << '\n';
  }
  return outcome;
}

std::vector<ScanRow> scan(const RunConfig& config, const std::string& parameter,
                          const std::vector<double>& values, const RunSettings& settings,
                          std::size_t workers, std::ostream& log) {
  if (values.empty()) {
    // Still reject a bad parameter name.
    with_parameter(config.raw, parameter, 0.0);
    log << "warning: scan over an empty value list, nothing to do\n";
    return {};
  }
  std::vector<RunConfig> configs;
  configs.reserve(values.size());
  for (double v : values) {
    configs.push_back(parse_config(with_parameter(config.raw, parameter, v), config.base_dir));
  }

  std::vector<ScanRow> rows(values.size());
  std::vector<std::string> logs(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      RunSettings s = settings;
      s.quiet = true;
      s.out_dir = (std::filesystem::path(settings.out_dir) /
                   (parameter + "_" + std::to_string(i)))
                      .string();
      std::ostringstream run_log;
      RunOutcome o = run(configs[i], s, run_log);
      ScanRow& r = rows[i];
      r.value = values[i];
      r.iterations = o.record.iterations();
      if (!o.record.entries.empty()) {
        r.final_J = o.record.entries.back().J;
        r.final_J_T = o.record.entries.back().J_T;
      }
      r.violations = o.record.violations();
      r.retries = o.record.total_retries();
      r.aborted = o.record.aborted;
      r.exit_code = o.exit_code;
      logs[i] = run_log.str();
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, values.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& th : pool) {
    th.join();
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    log << parameter << " = " << num(values[i]) << ": " << rows[i].iterations
        << " iterations, J = " << num(rows[i].final_J) << '\n'
        << logs[i];
  }
  std::filesystem::create_directories(settings.out_dir);
  std::ofstream f;
  open_for_write(f, std::filesystem::path(settings.out_dir) / "scan_summary.csv");
  write_scan_summary(f, parameter, rows);
  return rows;
}

void write_scan_summary(std::ostream& out, const std::string& parameter,
                        const std::vector<ScanRow>& rows) {
  out << "index," << parameter << ",iterations,J,J_T,violations,retries,aborted,exit_code\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ScanRow& r = rows[i];
    out << i << ',' << num(r.value) << ',' << r.iterations << ',' << num(r.final_J) << ','
        << num(r.final_J_T) << ',' << r.violations << ',' << r.retries << ','
        << (r.aborted ? 1 : 0) << ',' << r.exit_code << '\n';
  }
}

std::size_t worker_limit() {
  if (const char* env = std::getenv("KROTOV_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) {
      return static_cast<std::size_t>(n);
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace krotov
