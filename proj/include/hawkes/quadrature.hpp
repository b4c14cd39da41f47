#pragma once

#include <functional>
#include <span>

namespace hawkes::quadrature {

// Adaptive Gauss-Kronrod over [a, b] (b may be +inf). Interior breakpoints,
// when given, are integrated piece by piece so jumps never fall inside a panel.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints = {}, double tolerance = 1e-12);

}  // namespace hawkes::quadrature
