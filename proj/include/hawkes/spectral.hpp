#pragma once

#include <complex>
#include <span>
#include <vector>

#include "hawkes/covariance.hpp"

namespace hawkes {

// Nonparametric kernel samples phi_hat(k * delta), k = 0 .. size - 1.
struct KernelEstimate {
    std::vector<double> values;
    double delta = 0.0;
    double tau_max = 0.0;

    double time(std::size_t k) const { return static_cast<double>(k) * delta; }
};

struct SpectralOptions {
    // |1 + psi|^2 is clamped below at floor_ratio * max before the log.
    double floor_ratio = 1e-8;
    // FFT length is the next power of two >= pad_factor * grid length.
    std::size_t pad_factor = 4;
};

// Fourier transform of the triangular window (1 - |t|/h)^+: (4 / (w^2 h)) sin^2(w h / 2).
double triangular_g_spectrum(double omega, double h);

// The same window sampled on a grid of step `delta` has a periodised spectrum
// sum_m g(omega + 2 pi m / delta); truncated at |m| <= terms.
double periodized_g_spectrum(double omega, double h, double delta, int terms = 2000);

// Discrete Hilbert transform through the -i sgn(k) frequency multiplier.
// DC and (for even lengths) Nyquist bins are zeroed.
std::vector<double> hilbert_transform(std::span<const double> samples);

// Minimal-phase inversion of the covariance grid into a kernel estimate.
KernelEstimate invert_to_kernel(const CovarianceGrid& grid, const SpectralOptions& options = {});

// Trapezoid integral of the estimate with negative samples clamped to zero.
double estimate_mass(const KernelEstimate& estimate);

namespace fft {

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> input);
// Unnormalised inverse (sum without the 1/N factor).
std::vector<std::complex<double>> backward(std::span<const std::complex<double>> input);

}  // namespace fft

}  // namespace hawkes
