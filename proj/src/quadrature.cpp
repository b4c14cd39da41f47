#include "hawkes/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hawkes::quadrature {

namespace {

double finite_piece(const std::function<double(double)>& f, double a, double b, double tolerance) {
    if (!(b > a)) return 0.0;
    // Boost compares an unscaled error estimate with a scaled tolerance, so tiny
    // panels never converge. Work on [0, 1] and rescale.
    const double width = b - a;
    auto unit = [&](double u) { return f(a + width * u); };
    return width * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(unit, 0.0, 1.0, 15, tolerance);
}

double tail_piece(const std::function<double(double)>& f, double a, double tolerance) {
    // exp_sinh only accepts [a, inf) with finite a; shift so the lower end is 0.
    boost::math::quadrature::exp_sinh<double> integrator;
    auto shifted = [&](double u) { return f(a + u); };
    return integrator.integrate(shifted, 0.0, std::numeric_limits<double>::infinity(), tolerance);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, double tolerance) {
    std::vector<double> cuts{a};
    for (double x : breakpoints) {
        if (x > a && x < b) cuts.push_back(x);
    }
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += finite_piece(f, cuts[i], cuts[i + 1], tolerance);
    }
    if (std::isinf(b)) {
        total += tail_piece(f, cuts.back(), tolerance);
    } else {
        total += finite_piece(f, cuts.back(), b, tolerance);
    }
    return total;
}

}  // namespace hawkes::quadrature
