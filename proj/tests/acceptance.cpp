// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails. Set ENTROPIC_EXTENDED=1 to add the M = 17
// Boltzmann run (reported, never gating).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "entropic/boltzmann.hpp"
#include "entropic/harness.hpp"
#include "oracles.hpp"

using namespace entropic;
using namespace entropic::harness;
using entropic::bz::Index3;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "[x] ") + what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path workdir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "entropic_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int first_firing(const std::vector<ExperimentRecord>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].fix_fired) return static_cast<int>(i);
  }
  return -1;
}

int firings(const std::vector<ExperimentRecord>& rows) {
  int n = 0;
  for (const auto& r : rows) n += r.fix_fired;
  return n;
}

RunConfig fp_config(double dt, const std::string& dir) {
  RunConfig cfg;
  cfg.experiment = Experiment::fp;
  cfg.n = 64;
  cfg.dt = dt;
  cfg.t_end = 0.1;
  cfg.out_dir = workdir(dir);
  return cfg;
}

Outcome criterion1(TrajectoryPair& pair) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  pair = run_fp_experiment(fp_config(1.0 / 512, "c1"));
  const double elapsed = seconds_since(start);
  const auto rising_off = entropy_increases(pair.fix_off, 1e-12);
  const auto rising_on = entropy_increases(pair.fix_on, 1e-12);
  const int first = first_firing(pair.fix_on);
  int last = -1;
  for (std::size_t i = 0; i < pair.fix_on.size(); ++i) {
    if (pair.fix_on[i].fix_fired) last = static_cast<int>(i);
  }
  o.require(!rising_off.empty(),
            "fix off: entropy increases at " + std::to_string(rising_off.size()) + " steps (need >= 1)");
  o.require(rising_on.empty(),
            "fix on: entropy increases at " + std::to_string(rising_on.size()) + " steps (need 0)");
  o.require(last <= 10, "fix fired " + std::to_string(firings(pair.fix_on)) + " times, first step " +
                            std::to_string(first) + ", last step " + std::to_string(last) +
                            " (need last <= 10)");
  o.require(elapsed < 10.0, "runtime " + fmt("%.2f", elapsed) + " s (< 10 s)");
  return o;
}

Outcome criterion2(TrajectoryPair& pair) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  pair = run_fp_experiment(fp_config(1.0 / 1024, "c2"));
  const double elapsed = seconds_since(start);
  const int first = first_firing(pair.fix_on);
  o.require(first >= 0, "fix fired " + std::to_string(firings(pair.fix_on)) + " times (need an activation)");
  if (first >= 0) {
    const double t = pair.fix_on[static_cast<std::size_t>(first)].t;
    o.require(t >= 0.015, "first activation at t = " + fmt("%.6g", t) + " (need >= 0.015)");
  }
  o.require(entropy_increases(pair.fix_on, 1e-12).empty(), "fix on: entropy nonincreasing");
  o.require(elapsed < 20.0, "runtime " + fmt("%.2f", elapsed) + " s (< 20 s)");
  return o;
}

Outcome criterion3(const TrajectoryPair& p512, const TrajectoryPair& p1024) {
  Outcome o;
  for (const auto* p : {&p512, &p1024}) {
    const double on = p->fix_on.back().l2_rel_error;
    const double off = p->fix_off.back().l2_rel_error;
    const double rel = std::abs(on - off) / std::max(std::abs(off), 1e-300);
    o.require(rel < 0.1, std::string(p == &p512 ? "dt=1/512" : "dt=1/1024") + ": final error on " +
                             fmt("%.6e", on) + " off " + fmt("%.6e", off) + ", relative difference " +
                             fmt("%.3e", rel) + " (< 0.1)");
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  RunConfig cfg;
  cfg.experiment = Experiment::convergence;
  cfg.out_dir = workdir("c4");
  const auto start = std::chrono::steady_clock::now();
  const ConvergenceResult r = run_convergence_study(cfg);
  const double elapsed = seconds_since(start);
  for (const auto& s : r.series) {
    const bool cn = s.scheme == "implicit_midpoint";
    const double lo = cn ? 1.9 : 0.9;
    const double hi = cn ? 2.1 : 1.1;
    std::string errs;
    for (double e : s.error) errs += fmt(" %.3e", e);
    o.require(s.slope >= lo && s.slope <= hi,
              s.scheme + " fix " + (s.with_fix ? "on" : "off") + ": slope " + fmt("%.4f", s.slope) +
                  " in [" + fmt("%.1f", lo) + ", " + fmt("%.1f", hi) + "]; errors" + errs);
  }
  o.require(elapsed < 60.0, "runtime " + fmt("%.2f", elapsed) + " s (< 60 s)");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const bz::BoltzConfig cfg{3};
  const bz::BruteForceCoefficients brute(cfg);
  const Index3 origin{0, 0, 0};
  const oracle::CoefficientTable table(3, [&](const Index3& dp, const Index3& dq, const Index3& dr) {
    return brute(dp, dq, dr, origin);
  });
  const bz::SpectralOperator op(cfg);
  std::mt19937_64 rng(20230917);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  double worst = 0.0;
  const int trials = 24;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> f(cfg.points());
    for (double& v : f) v = u(rng);
    if (t % 4 == 3) f[static_cast<std::size_t>(t) % f.size()] = 0.0;
    const auto q = op.collision_rhs(f);
    const auto expect = oracle::quadratic_rhs(table, f);
    double diff = 0.0, scale = 0.0;
    for (std::size_t r = 0; r < q.size(); ++r) {
      diff = std::max(diff, std::abs(q[r] - expect[r]));
      scale = std::max(scale, std::abs(expect[r]));
    }
    worst = std::max(worst, diff / scale);
  }
  const double elapsed = seconds_since(start);
  o.require(worst <= 1e-10, std::to_string(trials) + " random states: worst relative Linf difference " +
                                fmt("%.3e", worst) + " (<= 1e-10)");
  o.require(elapsed < 120.0, "runtime " + fmt("%.2f", elapsed) + " s (< 120 s)");
  return o;
}

Outcome boltzmann_run(int m_lattice, double budget, const std::string& dir) {
  Outcome o;
  RunConfig cfg;
  cfg.experiment = Experiment::boltzmann;
  cfg.m_lattice = m_lattice;
  cfg.dt = 0.0007;
  cfg.t_end = 0.07;
  cfg.threads = 4;
  cfg.out_dir = workdir(dir);
  const auto start = std::chrono::steady_clock::now();
  const TrajectoryPair p = run_boltzmann_experiment(cfg);
  const double elapsed = seconds_since(start);
  o.require(p.fix_on.size() == 101, "steps " + std::to_string(p.fix_on.size() - 1) + " (need 100)");
  double step_drift = 0.0;
  for (const auto* rows : {&p.fix_on, &p.fix_off}) {
    for (std::size_t i = 1; i < rows->size(); ++i) {
      step_drift = std::max(step_drift, std::abs((*rows)[i].mass / (*rows)[i - 1].mass - 1.0));
    }
  }
  o.require(step_drift <= 1e-10, "per-step mass drift " + fmt("%.3e", step_drift) + " (<= 1e-10)");
  o.require(entropy_increases(p.fix_on, 1e-12).empty(),
            "fix on: entropy nonincreasing; fix fired " + std::to_string(firings(p.fix_on)) + " times");
  double worst = 0.0;
  for (std::size_t i = 0; i < p.fix_on.size(); ++i) {
    if (p.fix_on[i].t < 0.01 - 1e-12) continue;
    const double a = p.fix_on[i].l2_rel_error;
    const double b = p.fix_off[i].l2_rel_error;
    worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
  }
  o.require(worst < 0.1, "error curves differ by at most " + fmt("%.3e", worst) +
                             " relative for t >= 0.01 (< 0.1); final error " +
                             fmt("%.3e", p.fix_on.back().l2_rel_error));
  o.require(elapsed < budget, "runtime " + fmt("%.2f", elapsed) + " s (< " + fmt("%.0f", budget) + " s)");
  return o;
}

Outcome criterion7() {
  Outcome o;
  RunConfig cfg;
  cfg.experiment = Experiment::theory;
  cfg.out_dir = workdir("c7");
  const auto start = std::chrono::steady_clock::now();
  const TheoryResult r = run_theory_suite(cfg);
  const double elapsed = seconds_since(start);
  for (const auto& rep : r.reports) {
    o.require(rep.satisfied, rep.name + ": samples " + std::to_string(rep.samples) + ", skipped " +
                                 std::to_string(rep.skipped) + ", worst margin " +
                                 fmt("%.3e", rep.worst_margin));
  }
  o.require(elapsed < 60.0, "runtime " + fmt("%.2f", elapsed) + " s (< 60 s)");
  return o;
}

Outcome criterion8() {
  Outcome o;
  auto twice = [&o](const std::string& label, RunConfig cfg,
                    const std::function<void(const RunConfig&)>& run,
                    const std::vector<std::string>& files) {
    cfg.out_dir = workdir("c8_" + label + "_a");
    run(cfg);
    const fs::path a = cfg.out_dir;
    cfg.out_dir = workdir("c8_" + label + "_b");
    run(cfg);
    for (const auto& f : files) {
      const std::string x = slurp(a / f);
      o.require(!x.empty() && x == slurp(cfg.out_dir / f), label + ": " + f + " byte-identical");
    }
  };
  RunConfig fp;
  fp.experiment = Experiment::fp;
  twice("fp", fp, [](const RunConfig& c) { run_fp_experiment(c); }, {"fp_fix_on.csv", "fp_fix_off.csv"});
  RunConfig bz;
  bz.experiment = Experiment::boltzmann;
  bz.m_lattice = 9;
  bz.t_end = 0.014;
  bz.threads = 4;
  twice("boltzmann", bz, [](const RunConfig& c) { run_boltzmann_experiment(c); },
        {"boltzmann_fix_on.csv", "boltzmann_fix_off.csv"});
  RunConfig th;
  th.experiment = Experiment::theory;
  th.samples = 500;
  twice("theory", th, [](const RunConfig& c) { run_theory_suite(c); }, {"theory.csv"});
  return o;
}

bool report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str());
  for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main() {
  bool all = true;
  TrajectoryPair p512, p1024;
  all &= report(1, "Fokker-Planck N=64 dt=1/512: fix restores monotone entropy early",
                [&] { return criterion1(p512); });
  all &= report(2, "Fokker-Planck N=64 dt=1/1024: fix first needed at t >= 0.015",
                [&] { return criterion2(p1024); });
  all &= report(3, "Fokker-Planck final L2 error with and without fix within 10%", [&] {
    if (p512.fix_on.empty() || p1024.fix_on.empty()) {
      Outcome o;
      o.require(false, "trajectories unavailable");
      return o;
    }
    return criterion3(p512, p1024);
  });
  all &= report(4, "convergence orders on the Fokker-Planck testbed", criterion4);
  all &= report(5, "Boltzmann spectral operator equals brute-force sum at M=3", criterion5);
  all &= report(6, "Boltzmann M=9 dt=0.0007 100 steps", [] { return boltzmann_run(9, 300.0, "c6"); });
  all &= report(7, "theory suite", criterion7);
  all &= report(8, "identical configurations give byte-identical CSVs", criterion8);

  const char* ext = std::getenv("ENTROPIC_EXTENDED");
  if (ext != nullptr && std::string(ext) == "1") {
    Outcome o;
    try {
      o = boltzmann_run(17, 1e9, "c6_m17");
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("INFO extended (non-gating): Boltzmann M=17 dt=0.0007 100 steps %s\n",
                o.pass ? "reproduces the M=9 behaviour" : "differs");
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
  }
  return all ? 0 : 1;
}
