#include "entropic/integrators.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace entropic {

namespace {

Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> f) {
  return {f.data(), static_cast<Eigen::Index>(f.size())};
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

void check_dt(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
}

Eigen::PartialPivLU<Eigen::MatrixXd> factor_implicit(const Eigen::MatrixXd& a,
                                                     double dt) {
  const auto n = a.rows();
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - 0.5 * dt * a;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  // Partial pivoting never reports singularity; look at the pivots instead.
  const Eigen::VectorXd diag = lu.matrixLU().diagonal();
  const double scale = lhs.cwiseAbs().maxCoeff();
  if (diag.cwiseAbs().minCoeff() <= 1e-14 * scale || !std::isfinite(diag.sum())) {
    throw SingularMatrixError("implicit midpoint: I - dt/2 A is singular");
  }
  return lu;
}

ExperimentRecord make_record(double t, const Distribution& d,
                             const Equilibrium& eq, const FixReport* report,
                             const ReferenceSolution& reference, int step) {
  ExperimentRecord row;
  row.t = t;
  row.mass = total_mass(d);
  row.entropy = relative_entropy(d, eq) - row.mass;
  row.l2_rel_error = std::numeric_limits<double>::quiet_NaN();
  if (reference) {
    const std::vector<double> ref = reference(t, step);
    row.l2_rel_error = l2_rel_error(d.values(), ref, d.weights());
  }
  if (report) {
    row.fix_fired = report->fired ? 1 : 0;
    row.beta = report->beta;
  }
  return row;
}

}  // namespace

std::vector<double> LinearSystem::apply(std::span<const double> f) const {
  if (f.size() != size()) throw std::invalid_argument("LinearSystem: size mismatch");
  return to_vector(a * as_eigen(f));
}

std::vector<double> forward_euler_step(std::span<const double> f, const Rhs& rhs,
                                       double dt) {
  check_dt(dt);
  const std::vector<double> q = rhs(f);
  if (q.size() != f.size()) throw std::invalid_argument("rhs size mismatch");
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] + dt * q[i];
  return out;
}

std::vector<double> implicit_midpoint_step(std::span<const double> f,
                                           const LinearSystem& sys, double dt) {
  return ImplicitMidpoint(sys, dt)(f);
}

ImplicitMidpoint::ImplicitMidpoint(const LinearSystem& sys, double dt) : dt_(dt) {
  check_dt(dt);
  const auto n = sys.a.rows();
  explicit_half_ = Eigen::MatrixXd::Identity(n, n) + 0.5 * dt * sys.a;
  implicit_half_ = factor_implicit(sys.a, dt);
}

std::vector<double> ImplicitMidpoint::operator()(std::span<const double> f) const {
  if (static_cast<Eigen::Index>(f.size()) != explicit_half_.rows()) {
    throw std::invalid_argument("ImplicitMidpoint: size mismatch");
  }
  const Eigen::VectorXd rhs = explicit_half_ * as_eigen(f);
  return to_vector(implicit_half_.solve(rhs));
}

void TrajectoryRecorder::push(const ExperimentRecord& row) {
  if (!rows_.empty() && !(row.t > rows_.back().t)) {
    std::ostringstream os;
    os << "trajectory time stamps must increase: " << rows_.back().t << " then "
       << row.t;
    throw std::invalid_argument(os.str());
  }
  rows_.push_back(row);
}

Distribution integrate(const Distribution& f0, const Stepper& stepper,
                       const IntegrateOptions& opts, const Equilibrium& eq,
                       TrajectoryRecorder& recorder,
                       const ReferenceSolution& reference) {
  check_dt(opts.dt);
  if (opts.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");

  const RawStep raw = [&](const Distribution& d) { return stepper(d.values()); };
  recorder.push(make_record(0.0, f0, eq, nullptr, reference, 0));

  Distribution f = f0;
  for (int n = 1; n <= opts.n_steps; ++n) {
    const double t = n * opts.dt;
    try {
      if (opts.with_fix) {
        StepResult r = entropic_step(f, raw, eq, opts.mode);
        recorder.push(make_record(t, r.state, eq, &r.report, reference, n));
        f = std::move(r.state);
      } else {
        Distribution next = guarded_output(f, raw(f));
        recorder.push(make_record(t, next, eq, nullptr, reference, n));
        f = std::move(next);
      }
    } catch (const GuardViolation& e) {
      throw GuardViolation("step " + std::to_string(n) + ": " + e.what());
    }
  }
  return f;
}

}  // namespace entropic
