#include "hawkes/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "hawkes/error.hpp"

namespace hawkes {

namespace fft {

namespace {

// FFTW's planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> input, int sign) {
    const int n = static_cast<int>(input.size());
    if (n == 0) return {};
    std::unique_ptr<fftw_complex[], FftwFree> in(fftw_alloc_complex(n));
    std::unique_ptr<fftw_complex[], FftwFree> out(fftw_alloc_complex(n));

    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, in.get(), out.get(), sign, FFTW_ESTIMATE);
    }
    for (int i = 0; i < n; ++i) {
        in[i][0] = input[i].real();
        in[i][1] = input[i].imag();
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    std::vector<std::complex<double>> result(n);
    for (int i = 0; i < n; ++i) result[i] = {out[i][0], out[i][1]};
    return result;
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> input) {
    return transform(input, FFTW_FORWARD);
}

std::vector<std::complex<double>> backward(std::span<const std::complex<double>> input) {
    return transform(input, FFTW_BACKWARD);
}

}  // namespace fft

double triangular_g_spectrum(double omega, double h) {
    if (!(h > 0.0)) throw InvalidInput("bandwidth must be positive");
    const double x = 0.5 * omega * h;
    if (std::abs(x) < 1e-8) return h;
    const double s = std::sin(x);
    return 4.0 * s * s / (omega * omega * h);
}

double periodized_g_spectrum(double omega, double h, double delta, int terms) {
    const double step = 2.0 * std::numbers::pi / delta;
    double total = 0.0;
    for (int m = -terms; m <= terms; ++m) total += triangular_g_spectrum(omega + m * step, h);
    return total;
}

std::vector<double> hilbert_transform(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw InvalidInput("Hilbert transform needs at least two samples");

    std::vector<std::complex<double>> x(samples.begin(), samples.end());
    auto spectrum = fft::forward(x);
    const std::complex<double> minus_i{0.0, -1.0};
    spectrum[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        if (2 * k == n) {
            spectrum[k] = 0.0;
        } else if (2 * k < n) {
            spectrum[k] *= minus_i;
        } else {
            spectrum[k] *= -minus_i;
        }
    }
    auto back = fft::backward(spectrum);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = back[i].real() / static_cast<double>(n);
    return out;
}

KernelEstimate invert_to_kernel(const CovarianceGrid& grid, const SpectralOptions& options) {
    if (grid.values.empty()) throw InvalidInput("covariance grid is empty");
    if (!(grid.lambda_hat > 0.0)) throw InvalidInput("mean rate must be positive for spectral inversion");
    if (!(grid.delta > 0.0)) throw InvalidInput("grid step must be positive");

    const std::size_t m = grid.values.size();
    const std::size_t n = std::bit_ceil(std::max<std::size_t>(options.pad_factor * m, 2));

    // Symmetric circular layout: nu(-tau) = nu(tau).
    std::vector<std::complex<double>> nu(n, 0.0);
    nu[0] = grid.values[0];
    for (std::size_t k = 1; k < m; ++k) {
        nu[k] = grid.values[k];
        nu[n - k] = grid.values[k];
    }
    const auto nu_hat = fft::forward(nu);

    // With h = delta the periodised triangular spectrum equals h at every frequency,
    // so the division by Lambda * g reduces to a constant.
    const double scale = grid.delta / (grid.lambda_hat * grid.h);
    std::vector<double> power(n);
    for (std::size_t k = 0; k < n; ++k) power[k] = nu_hat[k].real() * scale;

    const double peak = *std::max_element(power.begin(), power.end());
    if (!(peak > 0.0) || !std::isfinite(peak)) {
        throw DegenerateSpectrum("degenerate spectrum: no positive power to factorise");
    }
    const double floor = options.floor_ratio * peak;

    std::vector<double> log_mag(n);
    for (std::size_t k = 0; k < n; ++k) log_mag[k] = 0.5 * std::log(std::max(power[k], floor));
    const auto phase = hilbert_transform(log_mag);

    std::vector<std::complex<double>> phi_hat(n);
    for (std::size_t k = 0; k < n; ++k) {
        phi_hat[k] = 1.0 - std::exp(std::complex<double>(-log_mag[k], phase[k]));
    }
    const auto phi = fft::backward(phi_hat);

    KernelEstimate estimate;
    estimate.delta = grid.delta;
    estimate.tau_max = grid.tau_max;
    estimate.values.resize(m);
    const double norm = 1.0 / (static_cast<double>(n) * grid.delta);
    for (std::size_t k = 0; k < m; ++k) {
        const double v = phi[k].real() * norm;
        if (!std::isfinite(v)) throw DegenerateSpectrum("spectral inversion produced a non-finite sample");
        estimate.values[k] = v;
    }
    return estimate;
}

double estimate_mass(const KernelEstimate& estimate) {
    const auto& v = estimate.values;
    if (v.size() < 2) return v.empty() ? 0.0 : std::max(v[0], 0.0) * estimate.delta;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        total += 0.5 * (std::max(v[k], 0.0) + std::max(v[k + 1], 0.0)) * estimate.delta;
    }
    return total;
}

}  // namespace hawkes
