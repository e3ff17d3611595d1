#pragma once

// Baseline one-step schemes and the trajectory driver that optionally wraps
// them in the entropy fix.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "entropic/entropy.hpp"
#include "entropic/entropy_fix.hpp"

namespace entropic {

using Rhs = std::function<std::vector<double>(std::span<const double>)>;

/// Dense operator A of the linear system dg/dt = A g.
struct LinearSystem {
  Eigen::MatrixXd a;

  std::size_t size() const { return static_cast<std::size_t>(a.rows()); }
  std::vector<double> apply(std::span<const double> f) const;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> forward_euler_step(std::span<const double> f, const Rhs& rhs,
                                       double dt);

/// Solves (I - dt/2 A) f' = (I + dt/2 A) f with a fresh LU factorization.
std::vector<double> implicit_midpoint_step(std::span<const double> f,
                                           const LinearSystem& sys, double dt);

/// Implicit midpoint with the factorization cached for a fixed dt.
class ImplicitMidpoint {
 public:
  ImplicitMidpoint(const LinearSystem& sys, double dt);
  std::vector<double> operator()(std::span<const double> f) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  Eigen::MatrixXd explicit_half_;
  Eigen::PartialPivLU<Eigen::MatrixXd> implicit_half_;
};

/// One row of a trajectory: time, entropy H = sum (f log(f/m) - f) dv,
/// relative L2 error against a reference (NaN without one), fix activity and
/// total mass.
struct ExperimentRecord {
  double t = 0.0;
  double entropy = 0.0;
  double l2_rel_error = 0.0;
  int fix_fired = 0;
  double beta = 0.0;
  double mass = 0.0;
};

class TrajectoryRecorder {
 public:
  void push(const ExperimentRecord& row);
  const std::vector<ExperimentRecord>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  void clear() { rows_.clear(); }

 private:
  std::vector<ExperimentRecord> rows_;
};

using Stepper = std::function<std::vector<double>(std::span<const double>)>;
using ReferenceSolution = std::function<std::vector<double>(double t, int step)>;

struct IntegrateOptions {
  double dt = 0.0;
  int n_steps = 1;
  bool with_fix = true;
  FixMode mode = FixMode::root_solve;
};

/// Advances f0 by n_steps of `stepper`, recording the initial state and every
/// step. H1/H2 guard violations propagate as GuardViolation.
Distribution integrate(const Distribution& f0, const Stepper& stepper,
                       const IntegrateOptions& opts, const Equilibrium& eq,
                       TrajectoryRecorder& recorder,
                       const ReferenceSolution& reference = nullptr);

}  // namespace entropic
