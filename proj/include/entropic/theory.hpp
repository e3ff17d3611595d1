#pragma once

// Executable forms of the analytic quantities behind the entropy fix error
// estimates, and samplers that check the inequalities numerically.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entropic/entropy.hpp"

namespace entropic::theory {

/// Aggregated outcome of checking `rhs - lhs >= 0` over many samples.
struct InequalityReport {
  std::string name;
  bool satisfied = true;
  /// min over samples of rhs - lhs; +inf when nothing was checked.
  double worst_margin;
  /// Scale attached to the worst sample.
  double worst_scale = 1.0;
  std::string worst_sample;
  std::size_t samples = 0;
  std::size_t skipped = 0;

  explicit InequalityReport(std::string check_name = {});

  /// Records one sample; it fails when margin < -1e-12 * scale.
  void record(double margin, double scale, const std::string& sample);
  void skip() { ++skipped; }
  void merge(const InequalityReport& other);
};

/// x log x - x with h(0) = 0.
double h_func(double x);

/// [h(x+y) - h(x+Cy)] / [h(x) - h(x+y)] on 0 <= x <= 1/2, C > 1,
/// 0 < y <= 1/(2C).
double F_quotient(double x, double y, double C);

/// F(x, 1/(2C), C).
double G_func(double x, double C);

/// C (1 + log 2) / (log 2C + 1) - 1.
double G_at_zero_closed(double C);

/// [C + (C+1)(log(1/C + 1) - log 2) - 1] / [1 + log 2 - (C+1) log(1/C + 1)].
double G_at_half_closed(double C);

/// (2 (1 + c1) / (c1 (1 + log 2)))^2 for c1 in (0, 1].
double c2_of_c1(double c1);

struct SamplingPlan {
  std::uint64_t seed = 20230917;
  int samples = 10000;
  int max_n = 64;
};

/// One-sample form: (1/(2|f|inf)) |f-1|_2^2 <= eta(f) <= |f-1|_2^2 for a
/// distribution with mean 1.
InequalityReport check_entropy_sandwich(const Distribution& f);
InequalityReport check_entropy_sandwich(const SamplingPlan& plan);

/// |eta(f1) - eta(f2)| <= max(2, 2|log C0|) |f1-f2|_2 (|f1-1|_2 + |f2-1|_2).
/// Pairs outside the hypotheses (unequal mass, f1 below C0, f2 neither above
/// C0 nor of lower entropy) are skipped.
InequalityReport check_entropy_diff_bound(const Distribution& f1, const Distribution& f2,
                                          double c0);
InequalityReport check_entropy_diff_bound(const SamplingPlan& plan, double c0);

/// F(x, y, c2_of_c1(c1)) >= 1/c1 on a grid x in [0, 1/2], y in (0, 1/(2 C2)].
InequalityReport check_F_lower_bound(std::span<const double> c1_grid, int grid = 201);

/// Tests 1/|log f_1| >= cf / |log f_{I1}| on the ascending reordering of f,
/// I1 = min{I : sum_{i<=I} dv_i >= c1 V}, with 1/|log 0| = 0 and 1/|log 1| = inf.
bool check_maxlogratio(const Distribution& f, double c1, double cf);

/// cheap_beta >= solve_beta on random normalized states and targets.
InequalityReport check_cheap_vs_root(const SamplingPlan& plan);

enum class Theorem { log_bound, c0_bound, linf_bound };

const char* theorem_name(Theorem thm);

struct BoundEvaluation {
  bool applicable = false;
  double beta = 0.0;
  /// |beta (1 - f_next)|_2
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Solves eta(f_next + beta (1 - f_next)) = eta(f_exact) and evaluates the
/// theorem's bound with its explicit constant. Both inputs must have mean 1.
BoundEvaluation evaluate_thm_bound(Theorem thm, const Distribution& f_next,
                                   const Distribution& f_exact);

/// Draws instances until `plan.samples` applicable ones have been checked.
InequalityReport check_thm_bounds(Theorem thm, const SamplingPlan& plan);

/// Sorted discretized Gaussian on [-L, L] with N + 1 points, mean 1.
Distribution example_gaussian(int n = 20, double half_width = 6.0);

/// N cells of width 1/N: I1 zeros, then ones, then I1 twos.
Distribution example_piecewise(int n, int i1);

}  // namespace entropic::theory
