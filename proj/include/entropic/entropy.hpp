#pragma once

// Distributions over weighted discrete states and the Gibbs entropy family
// acting on them.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace entropic {

/// Values in [-kNegativeClampTolerance, 0) are treated as roundoff and clamped
/// to zero when a Distribution is built; anything below is rejected.
inline constexpr double kNegativeClampTolerance = 1e-13;

/// Base class for violations of the mass-conservation (H1) and nonnegativity
/// (H2) hypotheses placed on a wrapped time stepper.
class GuardViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NegativeValueError : public GuardViolation {
 public:
  NegativeValueError(std::size_t index, double value);
  std::size_t index() const { return index_; }
  double value() const { return value_; }

 private:
  std::size_t index_;
  double value_;
};

class MassDriftError : public GuardViolation {
 public:
  MassDriftError(double mass_before, double mass_after);
  double relative_drift() const { return drift_; }

 private:
  double drift_;
};

/// Positive quadrature weights dv_i with their cached total V.
class Weights {
 public:
  explicit Weights(std::vector<double> dv);

  static std::shared_ptr<const Weights> uniform(std::size_t n, double dv);
  static std::shared_ptr<const Weights> make(std::vector<double> dv);

  std::span<const double> dv() const { return dv_; }
  double operator[](std::size_t i) const { return dv_[i]; }
  double volume() const { return volume_; }
  std::size_t size() const { return dv_.size(); }

 private:
  std::vector<double> dv_;
  double volume_;
};

using WeightsPtr = std::shared_ptr<const Weights>;

/// Nonnegative state values paired with (shared, immutable) weights.
class Distribution {
 public:
  Distribution(std::vector<double> values, WeightsPtr weights);

  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  const Weights& weights() const { return *weights_; }
  const WeightsPtr& weights_ptr() const { return weights_; }

 private:
  std::vector<double> values_;
  WeightsPtr weights_;
};

/// Strictly positive equilibrium state used by the relative entropy.
class Equilibrium {
 public:
  explicit Equilibrium(std::vector<double> m);
  static Equilibrium constant(std::size_t n, double value = 1.0);

  std::span<const double> values() const { return m_; }
  double operator[](std::size_t i) const { return m_[i]; }
  std::size_t size() const { return m_.size(); }
  bool is_constant() const;

 private:
  std::vector<double> m_;
};

enum class Norm { l1, l2, linf };

double total_mass(const Distribution& d);
double weighted_mean(const Distribution& d);

/// sum f log f dv, with 0 log 0 = 0.
double gibbs_entropy(const Distribution& d);
double gibbs_entropy(std::span<const double> f, const Weights& w);

/// sum (f log f - f) dv.
double entropy_H(const Distribution& d);

/// sum f log(f / m) dv.
double relative_entropy(const Distribution& d, const Equilibrium& e);

double norm(std::span<const double> f, Norm p, const Weights& w);
double l2_rel_error(std::span<const double> a, std::span<const double> b,
                    const Weights& w);

/// f divided by its weighted mean; the weighted mean of the result is 1.
Distribution normalized(const Distribution& d);

}  // namespace entropic
