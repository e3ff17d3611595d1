#pragma once

// Experiment drivers behind the command-line tool: configuration, CSV output
// and the four runs (Fokker-Planck, Boltzmann, convergence, theory).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entropic/entropy_fix.hpp"
#include "entropic/integrators.hpp"
#include "entropic/theory.hpp"

namespace entropic::harness {

/// Bad flag, bad config line or inconsistent parameters.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { fp, boltzmann, convergence, theory };
enum class FixSelection { both, on, off };

struct RunConfig {
  Experiment experiment = Experiment::fp;
  int n = 64;
  int m_lattice = 9;
  std::optional<double> dt;
  std::optional<double> t_end;
  FixSelection fix = FixSelection::both;
  FixMode fix_mode = FixMode::root_solve;
  std::uint64_t seed = 20230917;
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  /// Theory suite: run only the named check (empty runs all).
  std::string check;
  /// Theory suite: override the sample counts (0 keeps the defaults).
  int samples = 0;

  double dt_or_default() const;
  double t_end_or_default() const;
};

Experiment parse_experiment(const std::string& name);
const char* experiment_name(Experiment e);

/// Applies one `key=value` setting; unknown keys and bad values throw UsageError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key=value` lines; blank lines and `#` comments are ignored.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Header `t,entropy,l2_rel_error,fix_fired,beta,mass`, numbers as %.17g.
std::string format_csv(const std::vector<ExperimentRecord>& rows);
std::string format_double(double v);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Number of steps: t_end / dt rounded to the nearest integer, at least 1.
int step_count(double t_end, double dt);

struct TrajectoryPair {
  std::vector<ExperimentRecord> fix_on;
  std::vector<ExperimentRecord> fix_off;
  std::vector<std::filesystem::path> files;
  /// Every emitted trajectory keeps mass within 1e-10 and the fixed one never
  /// gains entropy.
  bool properties_hold = true;
  std::vector<std::string> diagnostics;
};

TrajectoryPair run_fp_experiment(const RunConfig& cfg);
TrajectoryPair run_boltzmann_experiment(const RunConfig& cfg);

struct ConvergenceSeries {
  std::string scheme;  // "implicit_midpoint" or "forward_euler"
  bool with_fix = false;
  std::vector<double> dt;
  std::vector<double> error;
  double slope = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceSeries> series;
  std::filesystem::path file;
};

/// Least-squares slope of log(error) against log(dt).
double fit_slope(const std::vector<double>& dt, const std::vector<double>& error);

std::vector<double> implicit_midpoint_ladder();
std::vector<double> forward_euler_ladder();

ConvergenceResult run_convergence_study(const RunConfig& cfg);

struct TheoryResult {
  std::vector<theory::InequalityReport> reports;
  std::filesystem::path file;
  bool all_satisfied() const;
};

/// Names accepted by RunConfig::check.
std::vector<std::string> theory_check_names();

TheoryResult run_theory_suite(const RunConfig& cfg);

/// Rising entropy steps: indices n >= 1 with entropy[n] > entropy[n-1] + tol.
std::vector<std::size_t> entropy_increases(const std::vector<ExperimentRecord>& rows,
                                           double rel_tol);

/// Largest |mass[n] / mass[0] - 1| over a trajectory.
double max_mass_drift(const std::vector<ExperimentRecord>& rows);

}  // namespace entropic::harness
