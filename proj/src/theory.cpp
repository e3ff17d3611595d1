#include "entropic/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "entropic/entropy_fix.hpp"

namespace entropic::theory {

namespace {

constexpr double kMarginSlack = 1e-12;
constexpr double kLog2 = std::numbers::ln2;
constexpr double kMinEntropyGap = 1e-8;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

WeightsPtr random_weights(Rng& rng, int n) {
  std::vector<double> dv(static_cast<std::size_t>(n));
  for (auto& w : dv) w = uniform(rng, 0.5, 1.5) / n;
  return Weights::make(std::move(dv));
}

// Raw nonnegative values drawn from one of several shapes: flat, heavy
// tailed, sparse with exact zeros, and near-equilibrium.
std::vector<double> random_shape(Rng& rng, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  const int kind = uniform_int(rng, 0, 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& x : v) {
    switch (kind) {
      case 0: x = uniform(rng, 1e-6, 10.0); break;
      case 1: x = std::exp(2.0 * gauss(rng)); break;
      case 2: x = uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(rng, 0.0, 10.0); break;
      default: x = 1.0 + 0.05 * gauss(rng); break;
    }
    x = std::max(x, 0.0);
  }
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
  return v;
}

Distribution to_mean_one(std::vector<double> v, const WeightsPtr& w) {
  return normalized(Distribution(std::move(v), w));
}

Distribution random_normalized(Rng& rng, int n, const WeightsPtr& w) {
  return to_mean_one(random_shape(rng, n), w);
}

// Mean-one state with every entry >= c0.
Distribution random_floor(Rng& rng, int n, const WeightsPtr& w, double c0) {
  std::vector<double> p = random_shape(rng, n);
  const Distribution q = to_mean_one(std::move(p), w);
  std::vector<double> v(q.values().begin(), q.values().end());
  for (auto& x : v) x = c0 + (1.0 - c0) * x;
  return Distribution(std::move(v), w);
}

std::vector<double> difference(const Distribution& a, const Distribution& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

std::vector<double> minus_one(const Distribution& a) {
  std::vector<double> d(a.values().begin(), a.values().end());
  for (auto& x : d) x -= 1.0;
  return d;
}

double linf(const Distribution& d) { return norm(d.values(), Norm::linf, d.weights()); }

std::string describe(const Distribution& d) {
  std::ostringstream os;
  os.precision(17);
  os << "f=[";
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? " " : "") << d[i];
  os << "] dv=[";
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? " " : "") << d.weights()[i];
  os << "]";
  return os.str();
}

std::string describe_pair(const Distribution& a, const Distribution& b) {
  return "first " + describe(a) + "; second " + describe(b);
}

double inv_abs_log(double x) {
  if (x == 0.0) return 0.0;
  const double l = std::abs(std::log(x));
  if (l == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / l;
}

bool same_mass(const Distribution& a, const Distribution& b) {
  const double ma = total_mass(a);
  const double mb = total_mass(b);
  return std::abs(ma - mb) <= 1e-10 * std::max(std::abs(ma), std::abs(mb));
}

int random_size(Rng& rng, const SamplingPlan& plan) {
  return uniform_int(rng, 2, std::max(2, plan.max_n));
}

}  // namespace

InequalityReport::InequalityReport(std::string check_name)
    : name(std::move(check_name)), worst_margin(std::numeric_limits<double>::infinity()) {}

void InequalityReport::record(double margin, double scale, const std::string& sample) {
  ++samples;
  if (margin < -kMarginSlack * scale) satisfied = false;
  if (margin < worst_margin) {
    worst_margin = margin;
    worst_scale = scale;
    worst_sample = sample;
  }
}

void InequalityReport::merge(const InequalityReport& other) {
  samples += other.samples;
  skipped += other.skipped;
  satisfied = satisfied && other.satisfied;
  if (other.worst_margin < worst_margin) {
    worst_margin = other.worst_margin;
    worst_scale = other.worst_scale;
    worst_sample = other.worst_sample;
  }
}

double h_func(double x) {
  if (!(x >= 0.0)) throw std::domain_error("h_func: negative argument");
  if (x == 0.0) return 0.0;
  return x * std::log(x) - x;
}

double F_quotient(double x, double y, double C) {
  if (!(x >= 0.0 && x <= 0.5)) throw std::domain_error("F_quotient: x outside [0, 1/2]");
  if (!(C > 1.0)) throw std::domain_error("F_quotient: C must exceed 1");
  if (!(y > 0.0)) throw std::domain_error("F_quotient: y must be positive");
  if (y > 0.5 / C * (1.0 + 1e-15)) throw std::domain_error("F_quotient: y above 1/(2C)");
  return (h_func(x + y) - h_func(x + C * y)) / (h_func(x) - h_func(x + y));
}

double G_func(double x, double C) {
  if (!(C > 1.0)) throw std::domain_error("G_func: C must exceed 1");
  return F_quotient(x, 0.5 / C, C);
}

double G_at_zero_closed(double C) {
  if (!(C > 1.0)) throw std::domain_error("G_at_zero_closed: C must exceed 1");
  return C * (1.0 + kLog2) / (std::log(2.0 * C) + 1.0) - 1.0;
}

double G_at_half_closed(double C) {
  if (!(C > 1.0)) throw std::domain_error("G_at_half_closed: C must exceed 1");
  const double l = std::log1p(1.0 / C);
  return (C + (C + 1.0) * (l - kLog2) - 1.0) / (1.0 + kLog2 - (C + 1.0) * l);
}

double c2_of_c1(double c1) {
  if (!(c1 > 0.0 && c1 <= 1.0)) throw std::domain_error("c2_of_c1: c1 outside (0, 1]");
  const double r = 2.0 * (1.0 + c1) / (c1 * (1.0 + kLog2));
  return r * r;
}

InequalityReport check_entropy_sandwich(const Distribution& f) {
  InequalityReport report("entropy_sandwich");
  const double eta = gibbs_entropy(f);
  const std::vector<double> dev = minus_one(f);
  const double l2sq = std::pow(norm(dev, Norm::l2, f.weights()), 2);
  const double lower = l2sq / (2.0 * linf(f));
  const double margin = std::min(eta - lower, l2sq - eta);
  report.record(margin, std::max(1.0, l2sq), describe(f));
  return report;
}

InequalityReport check_entropy_sandwich(const SamplingPlan& plan) {
  InequalityReport report("entropy_sandwich");
  Rng rng(plan.seed);
  for (int s = 0; s < plan.samples; ++s) {
    const int n = random_size(rng, plan);
    const WeightsPtr w = random_weights(rng, n);
    report.merge(check_entropy_sandwich(random_normalized(rng, n, w)));
  }
  return report;
}

InequalityReport check_entropy_diff_bound(const Distribution& f1, const Distribution& f2,
                                          double c0) {
  InequalityReport report("entropy_diff_bound");
  if (!(c0 > 0.0 && c0 <= 1.0)) throw std::domain_error("entropy diff bound: C0 outside (0, 1]");
  const double eta1 = gibbs_entropy(f1);
  const double eta2 = gibbs_entropy(f2);
  const auto v1 = f1.values();
  const auto v2 = f2.values();
  const bool f1_floor = std::all_of(v1.begin(), v1.end(), [c0](double x) { return x >= c0; });
  const bool f2_floor = std::all_of(v2.begin(), v2.end(), [c0](double x) { return x >= c0; });
  if (!same_mass(f1, f2) || !f1_floor || !(f2_floor || eta2 < eta1)) {
    report.skip();
    return report;
  }
  const Weights& w = f1.weights();
  const double k = std::max(2.0, 2.0 * std::abs(std::log(c0)));
  const double rhs = k * norm(difference(f1, f2), Norm::l2, w) *
                     (norm(minus_one(f1), Norm::l2, w) + norm(minus_one(f2), Norm::l2, w));
  const double lhs = std::abs(eta1 - eta2);
  report.record(rhs - lhs, std::max({1.0, lhs, rhs}), describe_pair(f1, f2));
  return report;
}

InequalityReport check_entropy_diff_bound(const SamplingPlan& plan, double c0) {
  std::ostringstream name;
  name << "entropy_diff_bound_c0_" << c0;
  InequalityReport report(name.str());
  Rng rng(plan.seed ^ static_cast<std::uint64_t>(std::llround(c0 * 1e6)));
  for (int s = 0; s < plan.samples; ++s) {
    const int n = random_size(rng, plan);
    const WeightsPtr w = random_weights(rng, n);
    const Distribution f1 = random_floor(rng, n, w, c0);
    // Alternate between both hypotheses of the bound: f2 above the floor, or
    // an arbitrary f2 with lower entropy than f1.
    Distribution f2 = (s % 2 == 0) ? random_floor(rng, n, w, c0)
                                   : random_normalized(rng, n, w);
    if (s % 2 == 1 && gibbs_entropy(f2) >= gibbs_entropy(f1)) {
      const double t = uniform(rng, 0.0, 1.0);
      std::vector<double> v(f2.values().begin(), f2.values().end());
      // Pull f2 toward the constant state until its entropy drops below f1's.
      for (int it = 0; it < 60 && gibbs_entropy(v, *w) >= gibbs_entropy(f1); ++it) {
        for (auto& x : v) x = 0.5 * (x + 1.0);
      }
      for (auto& x : v) x = (1.0 - 0.1 * t) * x + 0.1 * t;
      f2 = Distribution(std::move(v), w);
    }
    InequalityReport one = check_entropy_diff_bound(f1, f2, c0);
    one.name = report.name;
    report.merge(one);
  }
  return report;
}

InequalityReport check_F_lower_bound(std::span<const double> c1_grid, int grid) {
  InequalityReport report("F_lower_bound");
  if (grid < 2) throw std::invalid_argument("check_F_lower_bound: grid must be >= 2");
  for (const double c1 : c1_grid) {
    const double c2 = c2_of_c1(c1);
    const double bound = 1.0 / c1;
    const double y_max = 0.5 / c2;
    for (int i = 0; i < grid; ++i) {
      const double x = 0.5 * i / (grid - 1);
      for (int j = 1; j <= grid; ++j) {
        const double y = j == grid ? y_max : y_max * j / grid;
        const double value = F_quotient(x, y, c2);
        std::ostringstream os;
        os.precision(17);
        os << "c1=" << c1 << " x=" << x << " y=" << y << " F=" << value;
        report.record(value - bound, bound, os.str());
      }
    }
  }
  return report;
}

bool check_maxlogratio(const Distribution& f, double c1, double cf) {
  if (!(c1 > 0.0 && c1 <= 1.0) || !(cf > 0.0 && cf <= 1.0)) {
    throw std::domain_error("check_maxlogratio: constants outside (0, 1]");
  }
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&f](std::size_t a, std::size_t b) { return f[a] < f[b]; });

  const double threshold = c1 * f.weights().volume() * (1.0 - 1e-12);
  double acc = 0.0;
  std::size_t i1 = order.size() - 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    acc += f.weights()[order[i]];
    if (acc >= threshold) {
      i1 = i;
      break;
    }
  }
  const double left = inv_abs_log(f[order.front()]);
  const double right = inv_abs_log(f[order[i1]]);
  if (std::isinf(left)) return true;
  return left >= cf * right;
}

InequalityReport check_cheap_vs_root(const SamplingPlan& plan) {
  InequalityReport report("cheap_vs_root");
  Rng rng(plan.seed + 7);
  int done = 0;
  while (done < plan.samples) {
    const int n = random_size(rng, plan);
    const WeightsPtr w = random_weights(rng, n);
    const Distribution f = random_normalized(rng, n, w);
    const double eta = gibbs_entropy(f);
    if (!(eta > 0.0)) {
      report.skip();
      continue;
    }
    const double target = uniform(rng, 0.0, 1.0) * eta;
    const double cheap = cheap_beta(eta, target);
    const double root = solve_beta(f, target);
    std::ostringstream os;
    os.precision(17);
    os << "target=" << target << " cheap=" << cheap << " root=" << root << " " << describe(f);
    report.record(cheap - root, 1.0, os.str());
    ++done;
  }
  return report;
}

const char* theorem_name(Theorem thm) {
  switch (thm) {
    case Theorem::log_bound: return "thm_log_bound";
    case Theorem::c0_bound: return "thm_c0_bound";
    case Theorem::linf_bound: return "thm_linf_bound";
  }
  return "unknown";
}

BoundEvaluation evaluate_thm_bound(Theorem thm, const Distribution& f_next,
                                   const Distribution& f_exact) {
  BoundEvaluation out;
  if (f_next.size() != f_exact.size() || !same_mass(f_next, f_exact)) return out;
  const double eta_exact = gibbs_entropy(f_exact);
  if (!(gibbs_entropy(f_next) > eta_exact)) return out;

  const Weights& w = f_next.weights();
  const std::vector<double> diff = difference(f_next, f_exact);
  const double eps2 = norm(diff, Norm::l2, w);
  const double epsinf = norm(diff, Norm::linf, w);
  const double fn_inf = linf(f_next);
  const double fe_factor = 1.0 + std::sqrt(linf(f_exact));
  const double sqrt_v = std::sqrt(w.volume());

  switch (thm) {
    case Theorem::log_bound: {
      if (!(eps2 > 0.0 && eps2 <= 1.0)) return out;
      const double m2 = 8.0 * (sqrt_v * fn_inf + 1.0) * fn_inf * fe_factor;
      out.rhs = m2 * eps2 * (std::abs(std::log(eps2)) + 1.0);
      break;
    }
    case Theorem::c0_bound: {
      const auto v = f_next.values();
      const double c0 = *std::min_element(v.begin(), v.end());
      if (!(c0 > 0.0)) return out;
      const double k = std::max(2.0, 2.0 * std::abs(std::log(std::min(c0, 1.0))));
      out.rhs = 2.0 * k * fn_inf * fe_factor * eps2;
      break;
    }
    case Theorem::linf_bound: {
      if (!(epsinf > 0.0 && epsinf <= 1.0 / 3.0)) return out;
      const double m1 = 4.0 * fn_inf * fe_factor;
      out.rhs = (m1 * sqrt_v + 3.0 * sqrt_v * (m1 + 1.0) * fn_inf) * epsinf;
      break;
    }
  }
  out.applicable = true;
  out.beta = solve_beta(f_next, std::max(0.0, eta_exact));
  out.lhs = out.beta * norm(minus_one(f_next), Norm::l2, w);
  return out;
}

InequalityReport check_thm_bounds(Theorem thm, const SamplingPlan& plan) {
  InequalityReport report(theorem_name(thm));
  Rng rng(plan.seed + 101 + static_cast<std::uint64_t>(thm));
  int done = 0;
  // Every draw either counts or is skipped; the cap only guards against a
  // plan that can never produce admissible instances.
  const long long cap = 1000LL * std::max(plan.samples, 1);
  for (long long draws = 0; done < plan.samples && draws < cap; ++draws) {
    const int n = random_size(rng, plan);
    const WeightsPtr w = random_weights(rng, n);
    const Distribution exact = random_normalized(rng, n, w);
    const Distribution pert = random_normalized(rng, n, w);
    const double s = std::pow(10.0, uniform(rng, -6.0, 0.0));
    std::vector<double> v(exact.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - s) * exact[i] + s * pert[i];
    const Distribution next(std::move(v), w);
    // The bisection resolves beta only to the 1e-12 entropy residual, so
    // instances whose entropy gap is near that level say nothing about the bound.
    const double gap = gibbs_entropy(next) - gibbs_entropy(exact);
    if (!(gap > kMinEntropyGap * (1.0 + gibbs_entropy(exact)))) {
      report.skip();
      continue;
    }
    const BoundEvaluation e = evaluate_thm_bound(thm, next, exact);
    if (!e.applicable) {
      report.skip();
      continue;
    }
    std::ostringstream os;
    os.precision(17);
    os << "beta=" << e.beta << " lhs=" << e.lhs << " rhs=" << e.rhs << " next "
       << describe(next) << "; exact " << describe(exact);
    report.record(e.rhs - e.lhs, std::max({1e-300, e.lhs, e.rhs}), os.str());
    ++done;
  }
  if (done < plan.samples) {
    report.satisfied = false;
    report.worst_sample = "too few admissible instances: " + std::to_string(done);
  }
  return report;
}

Distribution example_gaussian(int n, double half_width) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("example_gaussian: N must be even");
  const double dv = 2.0 * half_width / (n + 1);
  std::vector<double> f(static_cast<std::size_t>(n + 1));
  for (int i = 1; i <= n + 1; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    const int steps = (n + 1 - i + 1) / 2;  // ceil((N + 1 - i) / 2)
    const double v = sign * steps * 2.0 * half_width / n;
    f[static_cast<std::size_t>(i - 1)] = std::exp(-v * v) / std::sqrt(std::numbers::pi);
  }
  return normalized(Distribution(std::move(f), Weights::uniform(static_cast<std::size_t>(n + 1), dv)));
}

Distribution example_piecewise(int n, int i1) {
  if (n < 2 || i1 < 0 || 2 * i1 > n) {
    throw std::invalid_argument("example_piecewise: need 0 <= 2 I1 <= N");
  }
  std::vector<double> f(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < i1; ++i) {
    f[static_cast<std::size_t>(i)] = 0.0;
    f[static_cast<std::size_t>(n - 1 - i)] = 2.0;
  }
  return Distribution(std::move(f), Weights::uniform(static_cast<std::size_t>(n), 1.0 / n));
}

}  // namespace entropic::theory
