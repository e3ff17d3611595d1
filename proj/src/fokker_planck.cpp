#include "entropic/fokker_planck.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace entropic::fp {

double default_potential(double x) {
  return std::cos(20.0 * std::numbers::pi * x) / (2.0 * std::numbers::pi);
}

FPSystem::FPSystem(const FPConfig& cfg) : n_(cfg.n), dx_(0.0) {
  if (n_ < 4) throw std::invalid_argument("Fokker-Planck grid needs n >= 4");
  if (!cfg.potential) throw std::invalid_argument("potential is not set");
  dx_ = 1.0 / n_;
  const auto n = static_cast<std::size_t>(n_);

  m_.resize(n);
  m_half_.resize(n);
  std::vector<double> dv(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) * dx_;
    m_[j] = std::exp(-cfg.potential(x));
    m_half_[j] = std::exp(-cfg.potential(x + 0.5 * dx_));
    dv[j] = m_[j] * dx_;
  }
  weights_ = Weights::make(std::move(dv));

  const double inv_dx2 = 1.0 / (dx_ * dx_);
  system_.a = Eigen::MatrixXd::Zero(n_, n_);
  for (int j = 0; j < n_; ++j) {
    const int jp = (j + 1) % n_;
    const int jm = (j + n_ - 1) % n_;
    const double right = m_half_[j];
    const double left = m_half_[jm];
    const double scale = inv_dx2 / m_[j];
    system_.a(j, jp) += right * scale;
    system_.a(j, jm) += left * scale;
    system_.a(j, j) -= (right + left) * scale;
  }

  // S = D^{1/2} A D^{-1/2}. Exact symmetry is imposed before the solve.
  Eigen::VectorXd sqrt_m(n_);
  for (int j = 0; j < n_; ++j) sqrt_m[j] = std::sqrt(m_[j]);
  symmetrized_ = sqrt_m.asDiagonal() * system_.a * sqrt_m.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd sym = 0.5 * (symmetrized_ + symmetrized_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Fokker-Planck eigendecomposition failed");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

std::vector<double> FPSystem::exact(std::span<const double> g0, double t) const {
  if (static_cast<int>(g0.size()) != n_) {
    throw std::invalid_argument("fp exact: size mismatch");
  }
  if (t < 0.0) throw std::invalid_argument("fp exact: negative time");
  Eigen::VectorXd u(n_);
  for (int j = 0; j < n_; ++j) u[j] = std::sqrt(m_[j]) * g0[j];
  Eigen::VectorXd c = eigenvectors_.transpose() * u;
  for (int k = 0; k < n_; ++k) c[k] *= std::exp(eigenvalues_[k] * t);
  const Eigen::VectorXd v = eigenvectors_ * c;
  std::vector<double> out(n_);
  for (int j = 0; j < n_; ++j) out[j] = v[j] / std::sqrt(m_[j]);
  return out;
}

FPSystem fp_build(const FPConfig& cfg) { return FPSystem(cfg); }

std::vector<double> fp_initial_values(int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) / n;
    double s = 1.2;
    for (int k = 1; k <= 20; ++k) {
      s += k / 210.0 * std::sin(2.0 * k * std::numbers::pi * x);
    }
    g[j] = s;
  }
  return g;
}

Distribution fp_initial(const FPSystem& sys) {
  return Distribution(fp_initial_values(sys.n()), sys.weights());
}

std::vector<double> fp_exact(const FPSystem& sys, std::span<const double> g0,
                             double t) {
  return sys.exact(g0, t);
}

}  // namespace entropic::fp
