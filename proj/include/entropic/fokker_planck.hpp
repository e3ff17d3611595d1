#pragma once

// Periodic 1-D linear Fokker-Planck testbed in the g = f / M variable,
// M = exp(-V), central differences on x_j = j / N.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "entropic/entropy.hpp"
#include "entropic/integrators.hpp"

namespace entropic::fp {

/// V(x) = cos(20 pi x) / (2 pi).
double default_potential(double x);

struct FPConfig {
  int n = 64;
  std::function<double(double)> potential = default_potential;
};

class FPSystem {
 public:
  explicit FPSystem(const FPConfig& cfg);

  int n() const { return n_; }
  double dx() const { return dx_; }
  /// dv_j = M_j dx.
  const WeightsPtr& weights() const { return weights_; }
  /// M_j = M(j dx).
  std::span<const double> m() const { return m_; }
  /// M_{j+1/2} = M((j + 1/2) dx); M_{j-1/2} is m_half()[j - 1 mod N].
  std::span<const double> m_half() const { return m_half_; }
  const LinearSystem& rhs() const { return system_; }

  /// D^{1/2} A D^{-1/2} with D = diag(M_j), symmetric up to roundoff.
  const Eigen::MatrixXd& symmetrized() const { return symmetrized_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

  /// Exact flow of dg/dt = A g from g0 over time t.
  std::vector<double> exact(std::span<const double> g0, double t) const;

 private:
  int n_;
  double dx_;
  std::vector<double> m_;
  std::vector<double> m_half_;
  WeightsPtr weights_;
  LinearSystem system_;
  Eigen::MatrixXd symmetrized_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

FPSystem fp_build(const FPConfig& cfg);

/// g(0, x) = 1.2 + sum_{j=1}^{20} (j / 210) sin(2 j pi x) at x_j = j / n.
std::vector<double> fp_initial_values(int n);
Distribution fp_initial(const FPSystem& sys);

std::vector<double> fp_exact(const FPSystem& sys, std::span<const double> g0,
                             double t);

}  // namespace entropic::fp
