#include "entropic/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace entropic {

namespace {

std::string negative_message(std::size_t index, double value) {
  std::ostringstream os;
  os.precision(17);
  os << "nonnegativity violated: value " << value << " at index " << index;
  return os.str();
}

std::string drift_message(double before, double after) {
  std::ostringstream os;
  os.precision(17);
  os << "mass conservation violated: " << before << " -> " << after;
  return os.str();
}

void check_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("length mismatch: " + std::to_string(a) +
                                " vs " + std::to_string(b));
  }
}

}  // namespace

NegativeValueError::NegativeValueError(std::size_t index, double value)
    : GuardViolation(negative_message(index, value)),
      index_(index),
      value_(value) {}

MassDriftError::MassDriftError(double mass_before, double mass_after)
    : GuardViolation(drift_message(mass_before, mass_after)),
      drift_(std::abs(mass_after - mass_before) /
             std::max(std::abs(mass_before), 1e-300)) {}

Weights::Weights(std::vector<double> dv) : dv_(std::move(dv)), volume_(0.0) {
  if (dv_.empty()) throw std::invalid_argument("weights must be non-empty");
  for (std::size_t i = 0; i < dv_.size(); ++i) {
    if (!(dv_[i] > 0.0) || !std::isfinite(dv_[i])) {
      throw std::invalid_argument("weight " + std::to_string(i) +
                                  " is not strictly positive");
    }
    volume_ += dv_[i];
  }
}

WeightsPtr Weights::uniform(std::size_t n, double dv) {
  return std::make_shared<const Weights>(std::vector<double>(n, dv));
}

WeightsPtr Weights::make(std::vector<double> dv) {
  return std::make_shared<const Weights>(std::move(dv));
}

Distribution::Distribution(std::vector<double> values, WeightsPtr weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
  if (!weights_) throw std::invalid_argument("distribution needs weights");
  check_length(values_.size(), weights_->size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double& v = values_[i];
    if (std::isnan(v)) throw NegativeValueError(i, v);
    if (v < 0.0) {
      if (v < -kNegativeClampTolerance) throw NegativeValueError(i, v);
      v = 0.0;
    }
  }
}

Equilibrium::Equilibrium(std::vector<double> m) : m_(std::move(m)) {
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (!(m_[i] > 0.0)) {
      throw std::invalid_argument("equilibrium entry " + std::to_string(i) +
                                  " is not strictly positive");
    }
  }
}

Equilibrium Equilibrium::constant(std::size_t n, double value) {
  return Equilibrium(std::vector<double>(n, value));
}

bool Equilibrium::is_constant() const {
  return std::all_of(m_.begin(), m_.end(),
                     [&](double v) { return v == m_.front(); });
}

double total_mass(const Distribution& d) {
  const auto f = d.values();
  const auto dv = d.weights().dv();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * dv[i];
  return s;
}

double weighted_mean(const Distribution& d) {
  return total_mass(d) / d.weights().volume();
}

double gibbs_entropy(std::span<const double> f, const Weights& w) {
  check_length(f.size(), w.size());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > 0.0) s += f[i] * std::log(f[i]) * w[i];
  }
  return s;
}

double gibbs_entropy(const Distribution& d) {
  return gibbs_entropy(d.values(), d.weights());
}

double entropy_H(const Distribution& d) {
  return gibbs_entropy(d) - total_mass(d);
}

double relative_entropy(const Distribution& d, const Equilibrium& e) {
  check_length(d.size(), e.size());
  const auto f = d.values();
  const auto dv = d.weights().dv();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > 0.0) s += f[i] * std::log(f[i] / e[i]) * dv[i];
  }
  return s;
}

double norm(std::span<const double> f, Norm p, const Weights& w) {
  check_length(f.size(), w.size());
  switch (p) {
    case Norm::l1: {
      double s = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i]) * w[i];
      return s;
    }
    case Norm::l2: {
      double s = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * f[i] * w[i];
      return std::sqrt(s);
    }
    case Norm::linf: {
      double m = 0.0;
      for (double v : f) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return 0.0;
}

double l2_rel_error(std::span<const double> a, std::span<const double> b,
                    const Weights& w) {
  check_length(a.size(), b.size());
  const double denom = norm(b, Norm::l2, w);
  if (denom == 0.0) {
    throw std::domain_error("l2_rel_error: reference has zero norm");
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return norm(diff, Norm::l2, w) / denom;
}

Distribution normalized(const Distribution& d) {
  const double c = weighted_mean(d);
  if (!(c > 0.0)) throw std::domain_error("cannot normalize a zero distribution");
  std::vector<double> out(d.values().begin(), d.values().end());
  for (double& v : out) v /= c;
  return Distribution(std::move(out), d.weights_ptr());
}

}  // namespace entropic
