#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace msd {

/// In-place radix-2 FFT; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a);

/// Dominant nonzero frequency (cycles per unit time) of a real signal.
/// Hann window, zero-padded to 8x the next power of two, quadratic peak
/// interpolation on log magnitude. DC is excluded.
double dominant_frequency(const Eigen::VectorXd& x, double dt);

/// Fraction of (non-DC) spectral energy below `f_cut`, cycles/time.
double low_band_energy_fraction(const Eigen::VectorXd& x, double dt, double f_cut);

/// Mean spacing of upward level crossings, with linear interpolation at the
/// crossing. `level` defaults to the signal mean.
double period_from_upcrossings(const Eigen::VectorXd& x, double dt);

/// Mean spacing of local maxima (quadratic refinement). Suited to signals
/// that peak once per cycle regardless of sign, e.g. Lorenz z.
double period_from_peaks(const Eigen::VectorXd& x, double dt);

}  // namespace msd
