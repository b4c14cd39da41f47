#pragma once

#include <optional>
#include <string>

#include "hawkes/error.hpp"
#include "hawkes/kernels.hpp"
#include "hawkes/nelder_mead.hpp"
#include "hawkes/spectral.hpp"

namespace hawkes {

enum class Expansion { Add, Multiply };

std::string_view expansion_name(Expansion op);

struct FitResult {
    CompositeKernel kernel;
    double residue = 0.0;  // sum_k |phi_hat(t_k) - phi(t_k)| * delta
    StationarityVerdict verdict;
    Family family;                      // family added at this level
    std::optional<Expansion> expansion; // empty for single-kernel fits

    std::string label() const;  // "EXP", "+SQR", "xPWL", ...
};

struct FitOptions {
    NelderMeadOptions optimizer{};
    StationarityOptions stationarity{};
    // Bounds in time units normalised by tau_max.
    double lower_bound = 1e-8;
    double upper_bound = 1e8;
    double max_exponent = 10.0;
};

// Raised when every start yields a non-finite objective.
class FitFailure : public Error {
public:
    FitFailure(const std::string& what, std::optional<FitResult> best)
        : Error(what), best_so_far(std::move(best)) {}
    std::optional<FitResult> best_so_far;
};

double residue(const KernelEstimate& estimate, const CompositeKernel& kernel);

// Best kernel of one family by multi-start simplex search on the L1 residue.
FitResult fit_single(const KernelEstimate& estimate, Family family, const FitOptions& options = {});

// Level-two expansion of a single-kernel fit. Add keeps `fixed` frozen and fits the new
// addend to the residual; Multiply re-optimises both factors jointly.
FitResult fit_expansion(const KernelEstimate& estimate, const FitResult& fixed, Expansion op, Family family,
                        const FitOptions& options = {});

// Kernel in time units scaled by `time_scale`: returns psi(u) = amplitude * phi(time_scale * u).
BaseKernel rescale(const BaseKernel& kernel, double time_scale, double amplitude);
CompositeKernel rescale(const CompositeKernel& kernel, double time_scale, double amplitude);

}  // namespace hawkes
