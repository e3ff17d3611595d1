#include "entropic/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace entropic::bz {

namespace {

constexpr double kTaylorSwitch = 1e-3;
constexpr double kImagTolerance = 1e-10;

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// P_n(x) = int_0^1 r^n Sinc(x r) dr.
double sinc_moment(int n, double x) {
  if (x < 2.0) {
    double sum = 0.0;
    double term = 1.0;  // (-1)^k x^{2k} / (2k+1)!
    for (int k = 0; k < 40; ++k) {
      const double add = term / (n + 2 * k + 1);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      term *= -x * x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return sum;
  }
  // s_j = int r^j sin(x r), c_j = int r^j cos(x r) over [0, 1].
  const double sx = std::sin(x);
  const double cx = std::cos(x);
  double s = (1.0 - cx) / x;
  double c = sx / x;
  for (int j = 1; j <= n - 1; ++j) {
    const double s_next = -cx / x + j / x * c;
    const double c_next = sx / x - j / x * s;
    s = s_next;
    c = c_next;
  }
  return s / x;
}

void check_config(const BoltzConfig& cfg) { cfg.validate(); }

// Per-axis 1-D DFT applied along one axis of an M^3 complex array.
void transform_axis(std::vector<Complex>& data, int M, int axis,
                    const std::vector<Complex>& twiddle) {
  const std::size_t mm = static_cast<std::size_t>(M);
  const std::size_t stride = axis == 0 ? mm * mm : (axis == 1 ? mm : 1);
  std::vector<Complex> line(mm);
  std::vector<Complex> out(mm);
  for (std::size_t a = 0; a < mm; ++a) {
    for (std::size_t b = 0; b < mm; ++b) {
      std::size_t base;
      if (axis == 0) base = a * mm + b;
      else if (axis == 1) base = a * mm * mm + b;
      else base = (a * mm + b) * mm;
      for (std::size_t i = 0; i < mm; ++i) line[i] = data[base + i * stride];
      for (std::size_t o = 0; o < mm; ++o) {
        Complex acc = 0.0;
        for (std::size_t i = 0; i < mm; ++i) acc += twiddle[o * mm + i] * line[i];
        out[o] = acc;
      }
      for (std::size_t o = 0; o < mm; ++o) data[base + o * stride] = out[o];
    }
  }
}

// twiddle[o][i] = exp(sign 2 pi i k_o j_i / M) with the mode/lattice roles
// chosen by `to_modes`.
std::vector<Complex> twiddles(int M, bool to_modes) {
  const int m = (M - 1) / 2;
  std::vector<Complex> t(static_cast<std::size_t>(M) * M);
  for (int o = 0; o < M; ++o) {
    for (int i = 0; i < M; ++i) {
      const int k = to_modes ? o - m : i - m;
      const int j = to_modes ? i : o;
      const int phase = ((k * j) % M + M) % M;
      const double angle = 2.0 * std::numbers::pi * phase / M;
      t[static_cast<std::size_t>(o) * M + i] =
          to_modes ? std::polar(1.0, -angle) : std::polar(1.0, angle);
    }
  }
  return t;
}

std::vector<double> axis_sigma(int m) {
  std::vector<double> s(static_cast<std::size_t>(2 * m + 1));
  for (int b = -m; b <= m; ++b) s[static_cast<std::size_t>(b + m)] = jackson_sigma(b, m);
  return s;
}

}  // namespace

double BoltzConfig::lambda() const { return 2.0 / (3.0 + std::numbers::sqrt2); }

double BoltzConfig::t_period() const { return 3.0 / lambda(); }

double BoltzConfig::dv_cell() const {
  const double h = 2.0 * t_period() / m_lattice;
  return h * h * h;
}

std::size_t BoltzConfig::points() const {
  const auto mm = static_cast<std::size_t>(m_lattice);
  return mm * mm * mm;
}

void BoltzConfig::validate() const {
  if (m_lattice < 3 || m_lattice % 2 == 0) {
    std::ostringstream os;
    os << "lattice size must be odd and >= 3, got " << m_lattice;
    throw std::invalid_argument(os.str());
  }
}

int sym_mod(int i, int M) {
  if (M < 1 || M % 2 == 0) throw std::invalid_argument("sym_mod: M must be odd");
  const int m = (M - 1) / 2;
  int r = ((i + m) % M + M) % M;
  return r - m;
}

Index3 sym_mod(const Index3& i, int M) {
  return {sym_mod(i[0], M), sym_mod(i[1], M), sym_mod(i[2], M)};
}

double jackson_sigma(int beta, int m) {
  if (m < 1) throw std::invalid_argument("jackson_sigma: m must be >= 1");
  const int a = std::abs(beta);
  if (a > m + 1) throw std::invalid_argument("jackson_sigma: |beta| > m + 1");
  if (a == m + 1) return 0.0;
  const double q = std::numbers::pi / (m + 1);
  const double v = ((m + 1 - a) * std::cos(q * a) + std::sin(q * a) / std::tan(q)) / (m + 1);
  return std::clamp(v, 0.0, 1.0);
}

double kernel_bhat(double xi, double eta) {
  if (!(xi >= 0.0) || !(eta >= 0.0)) {
    throw std::invalid_argument("kernel_bhat: arguments must be non-negative");
  }
  const double a = std::max(xi, eta);
  const double b = std::min(xi, eta);
  if (a < kTaylorSwitch) {
    const double a2 = a * a;
    const double b2 = b * b;
    return 1.0 / 3.0 - (a2 + b2) / 30.0 + ((a2 * a2 + b2 * b2) / 120.0 + a2 * b2 / 36.0) / 7.0;
  }
  if (b < kTaylorSwitch) {
    const double b2 = b * b;
    return sinc_moment(2, a) - b2 / 6.0 * sinc_moment(4, a) +
           b2 * b2 / 120.0 * sinc_moment(6, a);
  }
  return (sinc(a - b) - sinc(a + b)) / (2.0 * a * b);
}

std::size_t lattice_index(const Index3& r, int M) {
  const auto mm = static_cast<std::size_t>(M);
  return (static_cast<std::size_t>(r[0]) * mm + static_cast<std::size_t>(r[1])) * mm +
         static_cast<std::size_t>(r[2]);
}

std::size_t mode_index(const Index3& k, int M) {
  const int m = (M - 1) / 2;
  return lattice_index({k[0] + m, k[1] + m, k[2] + m}, M);
}

std::vector<Complex> dft_forward(const BoltzConfig& cfg, std::span<const double> f) {
  check_config(cfg);
  if (f.size() != cfg.points()) throw std::invalid_argument("dft_forward: size mismatch");
  const int M = cfg.m_lattice;
  std::vector<Complex> data(f.begin(), f.end());
  const auto tw = twiddles(M, true);
  for (int axis = 0; axis < 3; ++axis) transform_axis(data, M, axis, tw);
  const double scale = 1.0 / static_cast<double>(cfg.points());
  for (auto& v : data) v *= scale;
  return data;
}

std::vector<Complex> dft_inverse(const BoltzConfig& cfg,
                                 std::span<const Complex> uhat) {
  check_config(cfg);
  if (uhat.size() != cfg.points()) {
    throw std::invalid_argument("dft_inverse: size mismatch");
  }
  const int M = cfg.m_lattice;
  std::vector<Complex> data(uhat.begin(), uhat.end());
  const auto tw = twiddles(M, false);
  for (int axis = 0; axis < 3; ++axis) transform_axis(data, M, axis, tw);
  return data;
}

KernelTable::KernelTable(const BoltzConfig& cfg) {
  check_config(cfg);
  const int m = cfg.m();
  // |l +- h|^2 with every component of l, h in [-m, m].
  const int max_sq = 12 * m * m;
  stride_ = static_cast<std::size_t>(max_sq) + 1;
  values_.assign(stride_ * stride_, 0.0);
  const double scale = cfg.lambda() * std::numbers::pi;
  for (int s = 0; s <= max_sq; ++s) {
    for (int d = 0; d <= max_sq; ++d) {
      // |l+h|^2 - |l-h|^2 = 4 l.h, so other pairs never occur.
      if ((s - d) % 4 != 0) continue;
      values_[static_cast<std::size_t>(s) * stride_ + static_cast<std::size_t>(d)] =
          kernel_bhat(std::sqrt(static_cast<double>(s)) * scale,
                      std::sqrt(static_cast<double>(d)) * scale);
    }
  }
}

SpectralOperator::SpectralOperator(const BoltzConfig& cfg, unsigned threads)
    : cfg_(cfg), threads_(std::max(1u, threads)), kernel_(cfg), sigma1_(axis_sigma(cfg.m())) {
  const int m = cfg.m();
  const int M = cfg.m_lattice;
  sigma_.resize(cfg.points());
  loss_diag_.resize(cfg.points());
  for (int k1 = -m; k1 <= m; ++k1) {
    for (int k2 = -m; k2 <= m; ++k2) {
      for (int k3 = -m; k3 <= m; ++k3) {
        const std::size_t idx = mode_index({k1, k2, k3}, M);
        const double s = sigma1_[k1 + m] * sigma1_[k2 + m] * sigma1_[k3 + m];
        sigma_[idx] = s;
        const int norm2 = k1 * k1 + k2 * k2 + k3 * k3;
        loss_diag_[idx] = kernel_(4 * norm2, 0) * s * s;
      }
    }
  }
}

double SpectralOperator::pair_weight(const Index3& l, const Index3& h) const {
  const int m = cfg_.m();
  int s2 = 0;
  int d2 = 0;
  double sig = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(l[i]) > m || std::abs(h[i]) > m) {
      throw std::out_of_range("pair_weight: mode outside [-m, m]^3");
    }
    s2 += (l[i] + h[i]) * (l[i] + h[i]);
    d2 += (l[i] - h[i]) * (l[i] - h[i]);
    sig *= sigma1_[l[i] + m] * sigma1_[h[i] + m];
  }
  return kernel_(s2, d2) * sig;
}

void SpectralOperator::gain_modes(std::span<const Complex> fhat, std::span<Complex> out,
                                  int k1_begin, int k1_end) const {
  const int m = cfg_.m();
  const int M = cfg_.m_lattice;
  const auto mm = static_cast<std::size_t>(M);
  // Per axis, for k_i and l_i: h_i = symmod(k_i - l_i), (l_i + h_i)^2, (l_i - h_i)^2.
  std::vector<int> h1(mm * mm), sum_sq(mm * mm), diff_sq(mm * mm);
  for (int k = -m; k <= m; ++k) {
    for (int l = -m; l <= m; ++l) {
      const std::size_t at = static_cast<std::size_t>(k + m) * mm + static_cast<std::size_t>(l + m);
      const int h = sym_mod(k - l, M);
      h1[at] = h;
      sum_sq[at] = (l + h) * (l + h);
      diff_sq[at] = (l - h) * (l - h);
    }
  }
  for (int k1 = k1_begin; k1 < k1_end; ++k1) {
    for (int k2 = -m; k2 <= m; ++k2) {
      for (int k3 = -m; k3 <= m; ++k3) {
        const std::size_t r1 = static_cast<std::size_t>(k1 + m) * mm;
        const std::size_t r2 = static_cast<std::size_t>(k2 + m) * mm;
        const std::size_t r3 = static_cast<std::size_t>(k3 + m) * mm;
        Complex acc = 0.0;
        for (int l1 = -m; l1 <= m; ++l1) {
          const std::size_t a1 = r1 + static_cast<std::size_t>(l1 + m);
          const int hh1 = h1[a1];
          const double sg1 = sigma1_[l1 + m] * sigma1_[hh1 + m];
          for (int l2 = -m; l2 <= m; ++l2) {
            const std::size_t a2 = r2 + static_cast<std::size_t>(l2 + m);
            const int hh2 = h1[a2];
            const double sg2 = sg1 * sigma1_[l2 + m] * sigma1_[hh2 + m];
            const int s12 = sum_sq[a1] + sum_sq[a2];
            const int d12 = diff_sq[a1] + diff_sq[a2];
            for (int l3 = -m; l3 <= m; ++l3) {
              const std::size_t a3 = r3 + static_cast<std::size_t>(l3 + m);
              const int hh3 = h1[a3];
              const double w = kernel_(s12 + sum_sq[a3], d12 + diff_sq[a3]) * sg2 *
                               sigma1_[l3 + m] * sigma1_[hh3 + m];
              acc += w * fhat[mode_index({l1, l2, l3}, M)] *
                     fhat[mode_index({hh1, hh2, hh3}, M)];
            }
          }
        }
        out[mode_index({k1, k2, k3}, M)] = acc;
      }
    }
  }
}

std::vector<double> SpectralOperator::collision_rhs(std::span<const double> f) const {
  if (f.size() != cfg_.points()) {
    throw std::invalid_argument("collision_rhs: size mismatch");
  }
  const int m = cfg_.m();
  const std::vector<Complex> fhat = dft_forward(cfg_, f);

  std::vector<Complex> gain_hat(cfg_.points());
  const int rows = 2 * m + 1;
  const unsigned workers = std::min<unsigned>(threads_, static_cast<unsigned>(rows));
  if (workers <= 1) {
    gain_modes(fhat, gain_hat, -m, m + 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const int begin = -m + static_cast<int>(w) * rows / static_cast<int>(workers);
      const int end = -m + static_cast<int>(w + 1) * rows / static_cast<int>(workers);
      pool.emplace_back([this, &fhat, &gain_hat, begin, end] {
        gain_modes(fhat, gain_hat, begin, end);
      });
    }
  }

  std::vector<Complex> loss_hat(cfg_.points());
  for (std::size_t i = 0; i < loss_hat.size(); ++i) loss_hat[i] = loss_diag_[i] * fhat[i];

  const std::vector<Complex> gain = dft_inverse(cfg_, gain_hat);
  const std::vector<Complex> loss = dft_inverse(cfg_, loss_hat);

  std::vector<double> q(f.size());
  double scale = 0.0;
  double imag = 0.0;
  for (std::size_t r = 0; r < f.size(); ++r) {
    q[r] = gain[r].real() - f[r] * loss[r].real();
    scale = std::max({scale, std::abs(gain[r].real()), std::abs(f[r] * loss[r].real())});
    imag = std::max({imag, std::abs(gain[r].imag()), std::abs(f[r] * loss[r].imag())});
  }
  if (imag > kImagTolerance * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "collision_rhs: imaginary residue " << imag << " exceeds tolerance (scale "
       << scale << ")";
    throw TransformConventionError(os.str());
  }
  return q;
}

std::vector<double> collision_rhs(const SpectralOperator& op, std::span<const double> f) {
  return op.collision_rhs(f);
}

BruteForceCoefficients::BruteForceCoefficients(const BoltzConfig& cfg)
    : cfg_(cfg), kernel_(cfg), sigma1_(axis_sigma(cfg.m())) {
  if (cfg.m_lattice > 5) {
    throw std::invalid_argument("brute-force coefficients only supported for M <= 5");
  }
  const int M = cfg.m_lattice;
  phase_.resize(static_cast<std::size_t>(M));
  for (int n = 0; n < M; ++n) {
    phase_[static_cast<std::size_t>(n)] = std::polar(1.0, 2.0 * std::numbers::pi * n / M);
  }
}

double BruteForceCoefficients::operator()(const Index3& p, const Index3& q,
                                          const Index3& r, const Index3& s) const {
  const int M = cfg_.m_lattice;
  const int m = cfg_.m();
  Index3 dp{}, dq{}, dr{};
  for (int i = 0; i < 3; ++i) {
    dp[i] = p[i] - s[i];
    dq[i] = q[i] - s[i];
    dr[i] = r[i] - s[i];
  }
  auto wrap = [M](int n) { return static_cast<std::size_t>(((n % M) + M) % M); };

  Complex total = 0.0;
  double magnitude = 0.0;
  Index3 l{}, h{}, k{};
  for (l[0] = -m; l[0] <= m; ++l[0])
  for (l[1] = -m; l[1] <= m; ++l[1])
  for (l[2] = -m; l[2] <= m; ++l[2])
  for (h[0] = -m; h[0] <= m; ++h[0])
  for (h[1] = -m; h[1] <= m; ++h[1])
  for (h[2] = -m; h[2] <= m; ++h[2])
  for (k[0] = -m; k[0] <= m; ++k[0])
  for (k[1] = -m; k[1] <= m; ++k[1])
  for (k[2] = -m; k[2] <= m; ++k[2]) {
    int s2 = 0;
    int d2 = 0;
    double sig = 1.0;
    int phase = 0;
    for (int i = 0; i < 3; ++i) {
      const int a = sym_mod(h[i] - k[i], M);
      const int b = sym_mod(l[i] - k[i], M);
      s2 += (a + b) * (a + b);
      d2 += (a - b) * (a - b);
      sig *= sigma1_[a + m] * sigma1_[b + m];
      phase += -l[i] * dp[i] - h[i] * dq[i] + k[i] * dr[i];
    }
    const double w = kernel_(s2, d2) * sig;
    total += w * phase_[wrap(phase)];
    magnitude += std::abs(w);
  }
  const double norm = std::pow(static_cast<double>(M), 9);
  total /= norm;
  magnitude /= norm;
  if (std::abs(total.imag()) > 1e-12 * std::max(1.0, magnitude)) {
    std::ostringstream os;
    os << "brute-force coefficient has imaginary part " << total.imag();
    throw TransformConventionError(os.str());
  }
  return total.real();
}

double coefficient_A_bruteforce(const BoltzConfig& cfg, const Index3& p,
                                const Index3& q, const Index3& r, const Index3& s) {
  return BruteForceCoefficients(cfg)(p, q, r, s);
}

WeightsPtr bz_weights(const BoltzConfig& cfg) {
  check_config(cfg);
  return Weights::uniform(cfg.points(), cfg.dv_cell());
}

std::vector<double> bz_initial_values(const BoltzConfig& cfg) {
  check_config(cfg);
  const int M = cfg.m_lattice;
  std::vector<double> axis(static_cast<std::size_t>(M));
  for (int r = 0; r < M; ++r) {
    double s = 0.0;
    for (int j = 1; j <= 10; ++j) {
      s += j / 55.0 * std::sin(j * std::numbers::pi * (static_cast<double>(r) / M - 0.5));
    }
    axis[static_cast<std::size_t>(r)] = s;
  }
  std::vector<double> f(cfg.points());
  for (int r1 = 0; r1 < M; ++r1)
    for (int r2 = 0; r2 < M; ++r2)
      for (int r3 = 0; r3 < M; ++r3)
        f[lattice_index({r1, r2, r3}, M)] = 3.2 + axis[r1] + axis[r2] + axis[r3];
  return f;
}

Distribution bz_initial(const BoltzConfig& cfg) {
  return Distribution(bz_initial_values(cfg), bz_weights(cfg));
}

}  // namespace entropic::bz
