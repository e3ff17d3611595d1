#include "entropic/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "entropic/boltzmann.hpp"
#include "entropic/fokker_planck.hpp"

namespace entropic::harness {

namespace {

constexpr double kMassTolerance = 1e-10;
constexpr double kEntropyTolerance = 1e-12;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  // Accept fractions such as 1/512 for time steps.
  const auto slash = value.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const std::string num = value.substr(0, slash);
      const std::string den = value.substr(slash + 1);
      std::size_t un = 0;
      std::size_t ud = 0;
      const double a = std::stod(num, &un);
      const double b = std::stod(den, &ud);
      if (un != num.size() || ud != den.size() || b == 0.0) throw std::invalid_argument(value);
      return a / b;
    }
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + key + ": '" + value + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid integer for " + key + ": '" + value + "'");
  }
}

std::vector<ExperimentRecord> run_trajectory(const Distribution& f0, const Stepper& step,
                                             double dt, int n_steps, bool with_fix,
                                             FixMode mode, const ReferenceSolution& ref) {
  TrajectoryRecorder rec;
  IntegrateOptions opts;
  opts.dt = dt;
  opts.n_steps = n_steps;
  opts.with_fix = with_fix;
  opts.mode = mode;
  integrate(f0, step, opts, Equilibrium::constant(f0.size()), rec, ref);
  return rec.rows();
}

void check_properties(TrajectoryPair& out, const char* label) {
  auto check_mass = [&](const std::vector<ExperimentRecord>& rows, const char* which) {
    if (rows.empty()) return;
    const double drift = max_mass_drift(rows);
    if (drift > kMassTolerance) {
      out.properties_hold = false;
      std::ostringstream os;
      os << label << " " << which << ": mass drift " << drift;
      out.diagnostics.push_back(os.str());
    }
  };
  check_mass(out.fix_on, "fix on");
  check_mass(out.fix_off, "fix off");
  if (!out.fix_on.empty()) {
    const auto rising = entropy_increases(out.fix_on, kEntropyTolerance);
    if (!rising.empty()) {
      out.properties_hold = false;
      std::ostringstream os;
      os << label << " fix on: entropy rises at step " << rising.front();
      out.diagnostics.push_back(os.str());
    }
  }
}

void emit_pair(TrajectoryPair& out, const RunConfig& cfg, const std::string& prefix) {
  std::filesystem::create_directories(cfg.out_dir);
  if (cfg.fix != FixSelection::off) {
    const auto path = cfg.out_dir / (prefix + "_fix_on.csv");
    write_file_atomic(path, format_csv(out.fix_on));
    out.files.push_back(path);
  }
  if (cfg.fix != FixSelection::on) {
    const auto path = cfg.out_dir / (prefix + "_fix_off.csv");
    write_file_atomic(path, format_csv(out.fix_off));
    out.files.push_back(path);
  }
}

theory::InequalityReport closed_form_report() {
  theory::InequalityReport r("closed_forms");
  for (double c = 1.25; c <= 64.0; c *= 1.5) {
    const double pairs[2][2] = {{theory::G_at_zero_closed(c), theory::G_func(0.0, c)},
                                {theory::G_at_half_closed(c), theory::G_func(0.5, c)}};
    for (const auto& p : pairs) {
      const double tol = 1e-12 * std::max(1.0, std::abs(p[1]));
      std::ostringstream os;
      os.precision(17);
      os << "C=" << c << " closed=" << p[0] << " direct=" << p[1];
      r.record(tol - std::abs(p[0] - p[1]), 1.0, os.str());
    }
  }
  return r;
}

theory::InequalityReport g_minimum_report() {
  theory::InequalityReport r("G_two_endpoint_minimum");
  for (double c = 1.25; c <= 64.0; c *= 1.5) {
    const double floor = std::min(theory::G_func(0.0, c), theory::G_func(0.5, c));
    for (int i = 0; i <= 200; ++i) {
      const double x = 0.5 * i / 200.0;
      const double g = theory::G_func(x, c);
      std::ostringstream os;
      os.precision(17);
      os << "C=" << c << " x=" << x << " G=" << g;
      r.record(g - floor, std::max(1.0, std::abs(floor)), os.str());
    }
  }
  return r;
}

theory::InequalityReport maxlogratio_report() {
  theory::InequalityReport r("maxlogratio_examples");
  auto expect = [&r](bool got, bool want, const std::string& what) {
    r.record(got == want ? 0.0 : -1.0, 1.0,
             what + (got ? " -> true" : " -> false"));
  };
  expect(theory::check_maxlogratio(theory::example_gaussian(20, 6.0), 0.5, 0.125), true,
         "gaussian N=20 L=6 c1=1/2 cf=1/8");
  for (const double cf : {1.0, 0.5, 0.125, 0.01}) {
    std::ostringstream os;
    os << "piecewise N=30 I1=10 c1=1/3 cf=" << cf;
    expect(theory::check_maxlogratio(theory::example_piecewise(30, 10), 1.0 / 3.0, cf), true,
           os.str());
  }
  for (const int n : {300, 1000, 10000}) {
    for (const double c1 : {1.0 / 3.0, 0.1, 0.01}) {
      std::ostringstream os;
      os << "piecewise N=" << n << " I1=1 c1=" << c1 << " cf=1";
      expect(theory::check_maxlogratio(theory::example_piecewise(n, 1), c1, 1.0), false,
             os.str());
    }
  }
  return r;
}

std::string csv_field(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double RunConfig::dt_or_default() const {
  if (dt) return *dt;
  switch (experiment) {
    case Experiment::boltzmann: return 0.0007;
    default: return 1.0 / 512.0;
  }
}

double RunConfig::t_end_or_default() const {
  if (t_end) return *t_end;
  return experiment == Experiment::boltzmann ? 0.07 : 0.1;
}

Experiment parse_experiment(const std::string& name) {
  if (name == "fp") return Experiment::fp;
  if (name == "boltzmann") return Experiment::boltzmann;
  if (name == "convergence") return Experiment::convergence;
  if (name == "theory") return Experiment::theory;
  throw UsageError("unknown experiment '" + name + "'");
}

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::fp: return "fp";
    case Experiment::boltzmann: return "boltzmann";
    case Experiment::convergence: return "convergence";
    case Experiment::theory: return "theory";
  }
  return "unknown";
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = trim(raw_value);
  if (key == "experiment") {
    cfg.experiment = parse_experiment(value);
  } else if (key == "n") {
    const long long v = parse_integer(key, value);
    if (v < 4 || v > 4096) throw UsageError("n must lie in [4, 4096]");
    cfg.n = static_cast<int>(v);
  } else if (key == "m_lattice") {
    const long long v = parse_integer(key, value);
    if (v < 3 || v % 2 == 0 || v > 33) throw UsageError("m_lattice must be odd, in [3, 33]");
    cfg.m_lattice = static_cast<int>(v);
  } else if (key == "dt") {
    const double v = parse_real(key, value);
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("dt must be positive");
    cfg.dt = v;
  } else if (key == "t_end") {
    const double v = parse_real(key, value);
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("t_end must be positive");
    cfg.t_end = v;
  } else if (key == "fix") {
    if (value == "on") cfg.fix = FixSelection::on;
    else if (value == "off") cfg.fix = FixSelection::off;
    else if (value == "both") cfg.fix = FixSelection::both;
    else throw UsageError("fix must be on, off or both");
  } else if (key == "fix_mode") {
    if (value == "root") cfg.fix_mode = FixMode::root_solve;
    else if (value == "cheap") cfg.fix_mode = FixMode::cheap_bound;
    else throw UsageError("fix_mode must be root or cheap");
  } else if (key == "seed") {
    const long long v = parse_integer(key, value);
    if (v < 0) throw UsageError("seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(v);
  } else if (key == "out") {
    if (value.empty()) throw UsageError("out must not be empty");
    cfg.out_dir = value;
  } else if (key == "threads") {
    const long long v = parse_integer(key, value);
    if (v < 1 || v > 256) throw UsageError("threads must lie in [1, 256]");
    cfg.threads = static_cast<unsigned>(v);
  } else if (key == "check") {
    const auto names = theory_check_names();
    if (!value.empty() && std::find(names.begin(), names.end(), value) == names.end()) {
      throw UsageError("unknown theory check '" + value + "'");
    }
    cfg.check = value;
  } else if (key == "samples") {
    const long long v = parse_integer(key, value);
    if (v < 0 || v > 10000000) throw UsageError("samples out of range");
    cfg.samples = static_cast<int>(v);
  } else {
    throw UsageError("unknown setting '" + raw_key + "'");
  }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_csv(const std::vector<ExperimentRecord>& rows) {
  std::string out = "t,entropy,l2_rel_error,fix_fired,beta,mass\n";
  for (const auto& r : rows) {
    out += format_double(r.t);
    out += ',';
    out += format_double(r.entropy);
    out += ',';
    out += format_double(r.l2_rel_error);
    out += ',';
    out += std::to_string(r.fix_fired);
    out += ',';
    out += format_double(r.beta);
    out += ',';
    out += format_double(r.mass);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

int step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw UsageError("dt and t_end must be positive");
  const long long n = std::llround(t_end / dt);
  if (n < 1) throw UsageError("t_end is shorter than half a time step");
  if (n > 100000000LL) throw UsageError("too many time steps");
  return static_cast<int>(n);
}

std::vector<std::size_t> entropy_increases(const std::vector<ExperimentRecord>& rows,
                                           double rel_tol) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const double prev = rows[n - 1].entropy;
    if (rows[n].entropy > prev + rel_tol * (1.0 + std::abs(prev))) out.push_back(n);
  }
  return out;
}

double max_mass_drift(const std::vector<ExperimentRecord>& rows) {
  double worst = 0.0;
  if (rows.empty()) return worst;
  const double m0 = rows.front().mass;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r.mass / m0 - 1.0));
  return worst;
}

TrajectoryPair run_fp_experiment(const RunConfig& cfg) {
  const double dt = cfg.dt_or_default();
  const int steps = step_count(cfg.t_end_or_default(), dt);
  const fp::FPSystem sys(fp::FPConfig{cfg.n, fp::default_potential});
  const Distribution g0 = fp::fp_initial(sys);
  const ImplicitMidpoint cn(sys.rhs(), dt);
  const Stepper step = [&cn](std::span<const double> f) { return cn(f); };
  const std::vector<double> g0_values = g0.vector();
  const ReferenceSolution ref = [&sys, &g0_values](double t, int) {
    return sys.exact(g0_values, t);
  };

  TrajectoryPair out;
  if (cfg.fix != FixSelection::off) {
    out.fix_on = run_trajectory(g0, step, dt, steps, true, cfg.fix_mode, ref);
  }
  if (cfg.fix != FixSelection::on) {
    out.fix_off = run_trajectory(g0, step, dt, steps, false, cfg.fix_mode, ref);
  }
  check_properties(out, "fp");
  emit_pair(out, cfg, "fp");
  return out;
}

TrajectoryPair run_boltzmann_experiment(const RunConfig& cfg) {
  const double dt = cfg.dt_or_default();
  const int steps = step_count(cfg.t_end_or_default(), dt);
  const bz::BoltzConfig bc{cfg.m_lattice};
  const bz::SpectralOperator op(bc, cfg.threads);
  const Rhs rhs = [&op](std::span<const double> f) { return op.collision_rhs(f); };
  const Stepper step = [&rhs, dt](std::span<const double> f) {
    return forward_euler_step(f, rhs, dt);
  };
  const Distribution f0 = bz::bz_initial(bc);

  // Reference: the unfixed scheme at dt / 4, sampled every fourth step.
  std::vector<std::vector<double>> reference;
  reference.reserve(static_cast<std::size_t>(steps) + 1);
  std::vector<double> f = f0.vector();
  reference.push_back(f);
  const double fine = dt / 4.0;
  for (int n = 1; n <= steps; ++n) {
    for (int sub = 0; sub < 4; ++sub) f = forward_euler_step(f, rhs, fine);
    reference.push_back(f);
  }
  const ReferenceSolution ref = [&reference](double, int n) {
    return reference.at(static_cast<std::size_t>(n));
  };

  TrajectoryPair out;
  if (cfg.fix != FixSelection::off) {
    out.fix_on = run_trajectory(f0, step, dt, steps, true, cfg.fix_mode, ref);
  }
  if (cfg.fix != FixSelection::on) {
    out.fix_off = run_trajectory(f0, step, dt, steps, false, cfg.fix_mode, ref);
  }
  check_properties(out, "boltzmann");
  emit_pair(out, cfg, "boltzmann");
  return out;
}

double fit_slope(const std::vector<double>& dt, const std::vector<double>& error) {
  if (dt.size() != error.size() || dt.size() < 2) {
    throw std::invalid_argument("fit_slope: need at least two matching points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(dt.size());
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (!(dt[i] > 0.0) || !(error[i] > 0.0)) {
      throw std::domain_error("fit_slope: values must be positive");
    }
    const double x = std::log(dt[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> implicit_midpoint_ladder() {
  return {1.0 / 128, 1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048};
}

std::vector<double> forward_euler_ladder() {
  return {1.0 / 16384, 1.0 / 32768, 1.0 / 65536, 1.0 / 131072, 1.0 / 262144};
}

ConvergenceResult run_convergence_study(const RunConfig& cfg) {
  const double t_end = cfg.t_end_or_default();
  const fp::FPSystem sys(fp::FPConfig{cfg.n, fp::default_potential});
  const Distribution g0 = fp::fp_initial(sys);
  const Rhs rhs = [&sys](std::span<const double> f) { return sys.rhs().apply(f); };

  ConvergenceResult result;
  auto run_series = [&](const std::string& scheme, bool with_fix,
                        const std::vector<double>& ladder) {
    ConvergenceSeries s;
    s.scheme = scheme;
    s.with_fix = with_fix;
    for (const double dt : ladder) {
      Stepper step;
      std::shared_ptr<ImplicitMidpoint> cn;
      if (scheme == "implicit_midpoint") {
        cn = std::make_shared<ImplicitMidpoint>(sys.rhs(), dt);
        step = [cn](std::span<const double> f) { return (*cn)(f); };
      } else {
        step = [&rhs, dt](std::span<const double> f) { return forward_euler_step(f, rhs, dt); };
      }
      TrajectoryRecorder rec;
      IntegrateOptions opts;
      opts.dt = dt;
      opts.n_steps = step_count(t_end, dt);
      opts.with_fix = with_fix;
      opts.mode = cfg.fix_mode;
      const Distribution last =
          integrate(g0, step, opts, Equilibrium::constant(g0.size()), rec);
      // t_end / dt is rounded to whole steps, so compare at the time reached.
      const std::vector<double> exact = sys.exact(g0.values(), opts.n_steps * dt);
      s.dt.push_back(dt);
      s.error.push_back(l2_rel_error(last.values(), exact, last.weights()));
    }
    s.slope = fit_slope(s.dt, s.error);
    result.series.push_back(std::move(s));
  };

  const bool on = cfg.fix != FixSelection::off;
  const bool off = cfg.fix != FixSelection::on;
  if (off) run_series("implicit_midpoint", false, implicit_midpoint_ladder());
  if (on) run_series("implicit_midpoint", true, implicit_midpoint_ladder());
  if (on) run_series("forward_euler", true, forward_euler_ladder());

  std::string csv = "scheme,fix,dt,error,observed_order,ls_slope\n";
  for (const auto& s : result.series) {
    for (std::size_t i = 0; i < s.dt.size(); ++i) {
      const double order =
          i == 0 ? std::numeric_limits<double>::quiet_NaN()
                 : std::log(s.error[i - 1] / s.error[i]) / std::log(s.dt[i - 1] / s.dt[i]);
      csv += s.scheme + ',' + (s.with_fix ? "on" : "off") + ',' + format_double(s.dt[i]) +
             ',' + format_double(s.error[i]) + ',' + format_double(order) + ',' +
             format_double(s.slope) + '\n';
    }
  }
  std::filesystem::create_directories(cfg.out_dir);
  result.file = cfg.out_dir / "convergence.csv";
  write_file_atomic(result.file, csv);
  return result;
}

bool TheoryResult::all_satisfied() const {
  return std::all_of(reports.begin(), reports.end(),
                     [](const theory::InequalityReport& r) { return r.satisfied; });
}

std::vector<std::string> theory_check_names() {
  return {"sandwich",       "diff_bound",  "F_bound",  "G_minimum",
          "closed_forms",   "cheap_vs_root", "thm_log", "thm_c0",
          "thm_linf",       "maxlogratio"};
}

TheoryResult run_theory_suite(const RunConfig& cfg) {
  auto wanted = [&cfg](const char* name) { return cfg.check.empty() || cfg.check == name; };
  auto plan = [&cfg](int default_samples) {
    theory::SamplingPlan p;
    p.seed = cfg.seed;
    p.samples = cfg.samples > 0 ? cfg.samples : default_samples;
    p.max_n = 64;
    return p;
  };

  TheoryResult result;
  if (wanted("sandwich")) result.reports.push_back(theory::check_entropy_sandwich(plan(10000)));
  if (wanted("diff_bound")) {
    for (const double c0 : {0.1, 0.5}) {
      result.reports.push_back(theory::check_entropy_diff_bound(plan(10000), c0));
    }
  }
  if (wanted("F_bound")) {
    const std::vector<double> c1 = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    result.reports.push_back(theory::check_F_lower_bound(c1, 201));
  }
  if (wanted("G_minimum")) result.reports.push_back(g_minimum_report());
  if (wanted("closed_forms")) result.reports.push_back(closed_form_report());
  if (wanted("cheap_vs_root")) result.reports.push_back(theory::check_cheap_vs_root(plan(1000)));
  if (wanted("thm_log")) {
    result.reports.push_back(theory::check_thm_bounds(theory::Theorem::log_bound, plan(1000)));
  }
  if (wanted("thm_c0")) {
    result.reports.push_back(theory::check_thm_bounds(theory::Theorem::c0_bound, plan(1000)));
  }
  if (wanted("thm_linf")) {
    result.reports.push_back(theory::check_thm_bounds(theory::Theorem::linf_bound, plan(1000)));
  }
  if (wanted("maxlogratio")) result.reports.push_back(maxlogratio_report());

  std::string csv = "check,samples,skipped,satisfied,worst_margin,worst_sample\n";
  for (const auto& r : result.reports) {
    csv += r.name + ',' + std::to_string(r.samples) + ',' + std::to_string(r.skipped) + ',' +
           (r.satisfied ? "1" : "0") + ',' + format_double(r.worst_margin) + ',' +
           csv_field(r.worst_sample) + '\n';
  }
  std::filesystem::create_directories(cfg.out_dir);
  result.file = cfg.out_dir / "theory.csv";
  write_file_atomic(result.file, csv);
  return result;
}

}  // namespace entropic::harness
