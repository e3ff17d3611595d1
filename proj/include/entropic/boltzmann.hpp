#pragma once

// Fourier-spectral model of the spatially homogeneous Boltzmann equation for
// Maxwell molecules on an M^3 velocity lattice (M = 2m + 1), with filtered
// kernel modes and a direct (non-FFT) transform.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "entropic/entropy.hpp"

namespace entropic::bz {

using Index3 = std::array<int, 3>;
using Complex = std::complex<double>;

struct BoltzConfig {
  int m_lattice = 17;

  /// Half width m with M = 2m + 1.
  int m() const { return (m_lattice - 1) / 2; }
  /// lambda = 2 / (3 + sqrt 2).
  double lambda() const;
  /// Half period T = 3 / lambda.
  double t_period() const;
  /// Cell volume (2T / M)^3.
  double dv_cell() const;
  std::size_t points() const;
  void validate() const;
};

/// Thrown when a transform yields an imaginary part it should not have.
class TransformConventionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Representative of i mod M in [-m, m]; M must be odd.
int sym_mod(int i, int M);
Index3 sym_mod(const Index3& i, int M);

/// One-dimensional modified Jackson filter factor for |beta| <= m + 1.
double jackson_sigma(int beta, int m);

/// int_0^1 r^2 Sinc(xi r) Sinc(eta r) dr for xi, eta >= 0.
double kernel_bhat(double xi, double eta);

/// Flat index of lattice point r in [0, M)^3.
std::size_t lattice_index(const Index3& r, int M);
/// Flat index of mode k in [-m, m]^3.
std::size_t mode_index(const Index3& k, int M);

/// fhat_k = M^-3 sum_j f_j exp(-2 pi i k.j / M), k in [-m, m]^3.
std::vector<Complex> dft_forward(const BoltzConfig& cfg, std::span<const double> f);
/// u_r = sum_k uhat_k exp(2 pi i k.r / M), r in [0, M)^3.
std::vector<Complex> dft_inverse(const BoltzConfig& cfg,
                                 std::span<const Complex> uhat);

/// Kernel values B(xi, eta) tabulated by the integer pair (|l+h|^2, |l-h|^2).
class KernelTable {
 public:
  explicit KernelTable(const BoltzConfig& cfg);
  double operator()(int sum_sq, int diff_sq) const {
    return values_[static_cast<std::size_t>(sum_sq) * stride_ +
                   static_cast<std::size_t>(diff_sq)];
  }

 private:
  std::size_t stride_;
  std::vector<double> values_;
};

class SpectralOperator {
 public:
  explicit SpectralOperator(const BoltzConfig& cfg, unsigned threads = 1);

  const BoltzConfig& config() const { return cfg_; }
  /// sigma(k) = prod_i jackson_sigma(k_i, m), indexed by mode_index.
  std::span<const double> sigma() const { return sigma_; }
  /// B(k, k) sigma(k)^2, indexed by mode_index.
  std::span<const double> loss_diag() const { return loss_diag_; }
  /// B(l, h) sigma(l) sigma(h).
  double pair_weight(const Index3& l, const Index3& h) const;

  /// Q_r = gain_r - f_r * loss_r, see collision_rhs.
  std::vector<double> collision_rhs(std::span<const double> f) const;

 private:
  void gain_modes(std::span<const Complex> fhat, std::span<Complex> out, int k1_begin,
                  int k1_end) const;

  BoltzConfig cfg_;
  unsigned threads_;
  KernelTable kernel_;
  std::vector<double> sigma1_;  // per-axis filter, index beta + m
  std::vector<double> sigma_;
  std::vector<double> loss_diag_;
};

std::vector<double> collision_rhs(const SpectralOperator& op,
                                  std::span<const double> f);

/// Brute-force coefficients A_pq^rs of the quadratic collision model, summed
/// directly over l, h, k in K^3. Only practical for M <= 5.
class BruteForceCoefficients {
 public:
  explicit BruteForceCoefficients(const BoltzConfig& cfg);
  double operator()(const Index3& p, const Index3& q, const Index3& r,
                    const Index3& s) const;

 private:
  BoltzConfig cfg_;
  KernelTable kernel_;
  std::vector<double> sigma1_;
  std::vector<Complex> phase_;
};

double coefficient_A_bruteforce(const BoltzConfig& cfg, const Index3& p,
                                const Index3& q, const Index3& r, const Index3& s);

WeightsPtr bz_weights(const BoltzConfig& cfg);
std::vector<double> bz_initial_values(const BoltzConfig& cfg);
Distribution bz_initial(const BoltzConfig& cfg);

}  // namespace entropic::bz
