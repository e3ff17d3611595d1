#include "entropic/entropy_fix.hpp"

#include <algorithm>
#include <cmath>

namespace entropic {

namespace {

constexpr int kMaxBisections = 60;
constexpr double kBetaWidth = 1e-14;
constexpr double kResidualTol = 1e-12;

// Values and weights in the g = f / m, dw = m dv coordinates.
Distribution to_equilibrium_frame(const Distribution& d, const Equilibrium& eq,
                                  const WeightsPtr& frame_weights) {
  std::vector<double> g(d.values().begin(), d.values().end());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] /= eq[i];
  return Distribution(std::move(g), frame_weights);
}

WeightsPtr frame_weights(const Distribution& d, const Equilibrium& eq) {
  if (eq.is_constant() && eq[0] == 1.0) return d.weights_ptr();
  std::vector<double> w(d.weights().dv().begin(), d.weights().dv().end());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= eq[i];
  return Weights::make(std::move(w));
}

double blended_entropy(std::span<const double> f, double beta,
                       const Weights& w, std::vector<double>& scratch) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    scratch[i] = (1.0 - beta) * f[i] + beta;
  }
  return gibbs_entropy(scratch, w);
}

}  // namespace

double cheap_beta(double eta_next, double eta_target) {
  if (eta_next <= eta_target) return 0.0;
  if (eta_next <= 0.0) {
    throw std::domain_error(
        "cheap_beta: entropy above target but not positive");
  }
  return std::clamp((eta_next - eta_target) / eta_next, 0.0, 1.0);
}

double solve_beta(const Distribution& f_next, double eta_target) {
  if (eta_target < 0.0) {
    throw std::domain_error(
        "solve_beta: target below the minimum entropy of the constant state");
  }
  const Distribution f = normalized(f_next);
  const double eta0 = gibbs_entropy(f);
  if (eta0 <= eta_target) return 0.0;
  if (eta_target == 0.0) return 1.0;

  const auto values = f.values();
  const Weights& w = f.weights();
  std::vector<double> scratch(values.size());
  const double tol = kResidualTol * (1.0 + std::abs(eta_target));

  // eta along the segment is convex with its minimum at beta = 1, hence
  // nonincreasing on [0, 1].
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < kMaxBisections && hi - lo >= kBetaWidth; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double phi = blended_entropy(values, mid, w, scratch);
    if (phi > eta_target) {
      lo = mid;
    } else {
      hi = mid;
      if (eta_target - phi <= tol) break;
    }
  }
  return hi;
}

Distribution apply_fix(const Distribution& f_next, double beta,
                       std::span<const double> equilibrium) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("apply_fix: beta outside [0, 1]");
  }
  if (equilibrium.size() != f_next.size()) {
    throw std::invalid_argument("apply_fix: equilibrium length mismatch");
  }
  const auto dv = f_next.weights().dv();
  double eq_mass = 0.0;
  for (std::size_t i = 0; i < dv.size(); ++i) eq_mass += equilibrium[i] * dv[i];
  const double mass = total_mass(f_next);
  if (std::abs(eq_mass - mass) > 1e-12 * std::max(std::abs(mass), 1e-300)) {
    throw std::invalid_argument("apply_fix: equilibrium mass differs from state mass");
  }
  const auto f = f_next.values();
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = (1.0 - beta) * f[i] + beta * equilibrium[i];
  }
  return Distribution(std::move(out), f_next.weights_ptr());
}

Distribution guarded_output(const Distribution& prev, std::vector<double> next) {
  Distribution out(std::move(next), prev.weights_ptr());
  const double m0 = total_mass(prev);
  const double m1 = total_mass(out);
  if (std::abs(m1 - m0) > kMassDriftTolerance * std::max(std::abs(m0), 1e-300)) {
    throw MassDriftError(m0, m1);
  }
  return out;
}

StepResult fix_step(const Distribution& f_prev, const Distribution& f_next,
                    const Equilibrium& eq, FixMode mode) {
  FixReport report;
  report.mode = mode;
  report.target_entropy = relative_entropy(f_prev, eq);
  report.entropy_before_fix = relative_entropy(f_next, eq);
  if (report.entropy_before_fix <= report.target_entropy) {
    report.entropy_after_fix = report.entropy_before_fix;
    return {f_next, report};
  }

  const WeightsPtr w = frame_weights(f_next, eq);
  const Distribution g_prev = to_equilibrium_frame(f_prev, eq, w);
  const Distribution g_next = to_equilibrium_frame(f_next, eq, w);
  const double target = std::max(0.0, gibbs_entropy(normalized(g_prev)));

  double beta = 0.0;
  if (mode == FixMode::root_solve) {
    beta = solve_beta(g_next, target);
  } else {
    beta = cheap_beta(gibbs_entropy(normalized(g_next)), target);
  }

  const double c = weighted_mean(g_next);
  std::vector<double> scaled_eq(eq.values().begin(), eq.values().end());
  for (double& v : scaled_eq) v *= c;
  Distribution fixed = beta == 0.0 ? f_next : apply_fix(f_next, beta, scaled_eq);

  report.fired = true;
  report.beta = beta;
  report.entropy_after_fix = relative_entropy(fixed, eq);
  return {std::move(fixed), report};
}

StepResult entropic_step(const Distribution& f_prev, const RawStep& raw_step,
                         const Equilibrium& eq, FixMode mode) {
  Distribution next = guarded_output(f_prev, raw_step(f_prev));
  return fix_step(f_prev, next, eq, mode);
}

}  // namespace entropic
