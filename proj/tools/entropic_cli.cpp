// Command-line entry point: entropic {fp|boltzmann|convergence|theory} [flags]

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "entropic/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProperty = 1;
constexpr int kExitUsage = 2;
constexpr int kExitGuard = 3;

using entropic::harness::RunConfig;

struct FlagValues {
  std::map<std::string, std::string> settings;
  std::string config_file;
};

void add_common_flags(CLI::App* sub, FlagValues& flags) {
  auto bind = [sub, &flags](const std::string& flag, const std::string& key,
                            const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&flags, key](const std::string& v) { flags.settings[key] = v; }, help);
  };
  bind("--n", "n", "Fokker-Planck grid size");
  bind("--m-lattice", "m_lattice", "Boltzmann lattice size M (odd)");
  bind("--dt", "dt", "time step, e.g. 0.0007 or 1/512");
  bind("--t-end", "t_end", "final time");
  bind("--fix", "fix", "on, off or both");
  bind("--fix-mode", "fix_mode", "root or cheap");
  bind("--seed", "seed", "sampling seed");
  bind("--out", "out", "output directory");
  bind("--threads", "threads", "worker threads for the collision operator");
  sub->add_option("--config", flags.config_file, "key=value configuration file");
}

int report_pair(const entropic::harness::TrajectoryPair& pair) {
  for (const auto& path : pair.files) std::cout << "wrote " << path.string() << "\n";
  auto summarize = [](const char* label, const std::vector<entropic::ExperimentRecord>& rows) {
    if (rows.empty()) return;
    int fired = 0;
    for (const auto& r : rows) fired += r.fix_fired;
    std::printf("%s: steps=%zu fix_fired=%d final_entropy=%.17g final_l2_rel_error=%.17g\n",
                label, rows.size() - 1, fired, rows.back().entropy, rows.back().l2_rel_error);
  };
  summarize("fix on", pair.fix_on);
  summarize("fix off", pair.fix_off);
  for (const auto& d : pair.diagnostics) std::cerr << "property failure: " << d << "\n";
  return pair.properties_hold ? kExitOk : kExitProperty;
}

int run(const RunConfig& cfg) {
  using entropic::harness::Experiment;
  switch (cfg.experiment) {
    case Experiment::fp:
      return report_pair(entropic::harness::run_fp_experiment(cfg));
    case Experiment::boltzmann:
      return report_pair(entropic::harness::run_boltzmann_experiment(cfg));
    case Experiment::convergence: {
      const auto result = entropic::harness::run_convergence_study(cfg);
      std::cout << "wrote " << result.file.string() << "\n";
      for (const auto& s : result.series) {
        std::printf("%s fix=%s slope=%.6f\n", s.scheme.c_str(), s.with_fix ? "on" : "off",
                    s.slope);
      }
      return kExitOk;
    }
    case Experiment::theory: {
      const auto result = entropic::harness::run_theory_suite(cfg);
      std::cout << "wrote " << result.file.string() << "\n";
      for (const auto& r : result.reports) {
        std::printf("%-28s %s samples=%zu skipped=%zu worst_margin=%.6g\n", r.name.c_str(),
                    r.satisfied ? "ok    " : "FAILED", r.samples, r.skipped, r.worst_margin);
        if (!r.satisfied) std::cerr << r.name << " worst sample: " << r.worst_sample << "\n";
      }
      return result.all_satisfied() ? kExitOk : kExitProperty;
    }
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-fix experiments for kinetic discretizations"};
  app.require_subcommand(1);

  FlagValues flags;
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"fp", "boltzmann", "convergence", "theory"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common_flags(sub, flags);
    subs[name] = sub;
  }
  subs["fp"]->description("Fokker-Planck run with and without the fix");
  subs["boltzmann"]->description("Boltzmann run with and without the fix");
  subs["convergence"]->description("order study against the exact Fokker-Planck flow");
  subs["theory"]->description("numerical checks of the error-estimate inequalities");
  subs["theory"]->add_option_function<std::string>(
      "--check", [&flags](const std::string& v) { flags.settings["check"] = v; },
      "run a single check");
  subs["theory"]->add_option_function<std::string>(
      "--samples", [&flags](const std::string& v) { flags.settings["samples"] = v; },
      "override sample counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) cfg.experiment = entropic::harness::parse_experiment(name);
    }
    if (!flags.config_file.empty()) {
      const auto before = cfg.experiment;
      entropic::harness::load_config_file(cfg, flags.config_file);
      cfg.experiment = before;
    }
    for (const auto& [key, value] : flags.settings) {
      entropic::harness::apply_setting(cfg, key, value);
    }
  } catch (const entropic::harness::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return run(cfg);
  } catch (const entropic::harness::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const entropic::GuardViolation& e) {
    std::cerr << "guard violation: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProperty;
  }
}
