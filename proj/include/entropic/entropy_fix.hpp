#pragma once

// Post-step entropy fix: when a step raises the (relative) entropy, blend the
// new state toward the equal-mass equilibrium until the entropy is back at or
// below its previous value.

#include <functional>
#include <span>

#include "entropic/entropy.hpp"

namespace entropic {

enum class FixMode { root_solve, cheap_bound };

/// Relative mass drift tolerated from a wrapped step (H1 guard).
inline constexpr double kMassDriftTolerance = 1e-10;

struct FixReport {
  bool fired = false;
  double beta = 0.0;
  /// Relative entropy sum f log(f/m) dv of the raw step output.
  double entropy_before_fix = 0.0;
  /// Relative entropy of the returned state.
  double entropy_after_fix = 0.0;
  /// Relative entropy of the state the step started from.
  double target_entropy = 0.0;
  FixMode mode = FixMode::root_solve;
};

/// (eta_next - eta_target) / eta_next clamped to [0, 1]. The arguments are
/// entropies of normalized distributions, so the constant state sits at 0.
double cheap_beta(double eta_next, double eta_target);

/// Smallest-bracket beta in [0, 1] with
/// eta(f~ + beta (1 - f~)) == eta_target, f~ = f_next / weighted_mean.
/// The returned value is the upper end of the final bisection bracket, so the
/// blended entropy never lands above the target.
double solve_beta(const Distribution& f_next, double eta_target);

/// f + beta (e - f). `equilibrium` must already carry the same mass as f.
Distribution apply_fix(const Distribution& f_next, double beta,
                       std::span<const double> equilibrium);

struct StepResult {
  Distribution state;
  FixReport report;
};

using RawStep = std::function<std::vector<double>(const Distribution&)>;

/// Checks the H1/H2 guards on a raw step output. Throws MassDriftError or
/// NegativeValueError (via the Distribution constructor).
Distribution guarded_output(const Distribution& prev, std::vector<double> next);

/// One step of `raw_step` followed by the entropy fix with respect to `eq`.
StepResult entropic_step(const Distribution& f_prev, const RawStep& raw_step,
                         const Equilibrium& eq,
                         FixMode mode = FixMode::root_solve);

/// Fix applied to an already computed step output (no guards re-run).
StepResult fix_step(const Distribution& f_prev, const Distribution& f_next,
                    const Equilibrium& eq, FixMode mode = FixMode::root_solve);

}  // namespace entropic
