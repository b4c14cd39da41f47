#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hawkes {

struct NelderMeadOptions {
    std::size_t max_evaluations = 3000;
    double f_tolerance = 1e-13;
    double x_tolerance = 1e-9;
    // Rebuild the simplex around the incumbent this many times after convergence.
    int restarts = 2;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value;
    std::size_t evaluations = 0;
};

// Unconstrained simplex search (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
// `steps` sets the initial simplex edge per coordinate. Non-finite objective values are
// treated as +inf. The returned value never exceeds f(start).
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> steps,
                             const NelderMeadOptions& options = {});

}  // namespace hawkes
