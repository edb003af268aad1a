#include "msd/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace msd {

void fft_inplace(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_inplace: size must be a power of two");
  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

namespace {

std::vector<std::complex<double>> windowed_spectrum(const Eigen::VectorXd& x, int pad_factor) {
  const size_t m = static_cast<size_t>(x.size());
  if (m < 4) throw std::invalid_argument("signal too short for spectral analysis");
  size_t nfft = 1;
  while (nfft < m) nfft <<= 1;
  nfft *= static_cast<size_t>(pad_factor);
  std::vector<std::complex<double>> a(nfft, 0.0);
  const double mean = x.mean();
  for (size_t k = 0; k < m; ++k) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m - 1));
    a[k] = (x[static_cast<Eigen::Index>(k)] - mean) * w;
  }
  fft_inplace(a);
  return a;
}

}  // namespace

double dominant_frequency(const Eigen::VectorXd& x, double dt) {
  const auto a = windowed_spectrum(x, 8);
  const size_t nfft = a.size();
  const size_t half = nfft / 2;
  size_t kmax = 1;
  double best = 0.0;
  for (size_t k = 1; k < half; ++k) {
    const double mag = std::abs(a[k]);
    if (mag > best) {
      best = mag;
      kmax = k;
    }
  }
  double kref = static_cast<double>(kmax);
  if (kmax > 1 && kmax + 1 < half) {
    // quadratic interpolation on log magnitude
    const double l = std::log(std::abs(a[kmax - 1]) + 1e-300);
    const double c = std::log(std::abs(a[kmax]) + 1e-300);
    const double r = std::log(std::abs(a[kmax + 1]) + 1e-300);
    const double denom = l - 2.0 * c + r;
    if (std::abs(denom) > 1e-12) kref += 0.5 * (l - r) / denom;
  }
  return kref / (static_cast<double>(nfft) * dt);
}

double low_band_energy_fraction(const Eigen::VectorXd& x, double dt, double f_cut) {
  const auto a = windowed_spectrum(x, 2);
  const size_t nfft = a.size();
  const size_t half = nfft / 2;
  const double df = 1.0 / (static_cast<double>(nfft) * dt);
  double low = 0.0, total = 0.0;
  for (size_t k = 1; k < half; ++k) {
    const double e = std::norm(a[k]);
    total += e;
    if (static_cast<double>(k) * df < f_cut) low += e;
  }
  return total > 0.0 ? low / total : 0.0;
}

double period_from_upcrossings(const Eigen::VectorXd& x, double dt) {
  const double level = x.mean();
  std::vector<double> crossings;
  for (Eigen::Index k = 1; k < x.size(); ++k) {
    const double a = x[k - 1] - level;
    const double b = x[k] - level;
    if (a < 0.0 && b >= 0.0) {
      const double frac = a / (a - b);
      crossings.push_back((static_cast<double>(k - 1) + frac) * dt);
    }
  }
  if (crossings.size() < 2) throw std::runtime_error("period_from_upcrossings: fewer than two crossings");
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

double period_from_peaks(const Eigen::VectorXd& x, double dt) {
  std::vector<double> peaks;
  for (Eigen::Index k = 1; k + 1 < x.size(); ++k) {
    if (x[k] > x[k - 1] && x[k] >= x[k + 1]) {
      const double denom = x[k - 1] - 2.0 * x[k] + x[k + 1];
      double off = 0.0;
      if (std::abs(denom) > 1e-300) off = 0.5 * (x[k - 1] - x[k + 1]) / denom;
      peaks.push_back((static_cast<double>(k) + off) * dt);
    }
  }
  if (peaks.size() < 2) throw std::runtime_error("period_from_peaks: fewer than two peaks");
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

}  // namespace msd
