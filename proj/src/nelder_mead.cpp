#include "hawkes/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hawkes {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> steps,
                             const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    std::size_t evaluations = 0;
    auto f = [&](const std::vector<double>& x) {
        ++evaluations;
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    Vertex best{start, f(start)};
    if (n == 0) return {best.x, best.f, evaluations};

    for (int round = 0; round <= options.restarts; ++round) {
        std::vector<Vertex> simplex;
        simplex.push_back(best);
        for (std::size_t i = 0; i < n; ++i) {
            auto x = best.x;
            x[i] += steps[i];
            simplex.push_back({x, f(x)});
        }

        const double before = best.f;
        std::vector<double> centroid(n);
        auto along = [&](double t) {
            // centroid + t * (centroid - worst)
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (centroid[j] - simplex.back().x[j]);
            return x;
        };

        while (evaluations < options.max_evaluations) {
            std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });

            const double spread = simplex.back().f - simplex.front().f;
            double diameter = 0.0;
            for (std::size_t i = 1; i <= n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    diameter = std::max(diameter, std::abs(simplex[i].x[j] - simplex[0].x[j]));
                }
            }
            if (spread <= options.f_tolerance * (std::abs(simplex.front().f) + 1e-300) &&
                diameter <= options.x_tolerance) {
                break;
            }
            if (diameter <= options.x_tolerance * 1e-3) break;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j] / static_cast<double>(n);
            }

            Vertex reflected{along(1.0), 0.0};
            reflected.f = f(reflected.x);
            if (reflected.f < simplex.front().f) {
                Vertex expanded{along(2.0), 0.0};
                expanded.f = f(expanded.x);
                simplex.back() = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
                continue;
            }
            if (reflected.f < simplex[n - 1].f) {
                simplex.back() = std::move(reflected);
                continue;
            }

            const bool outside = reflected.f < simplex.back().f;
            Vertex contracted{along(outside ? 0.5 : -0.5), 0.0};
            contracted.f = f(contracted.x);
            if (contracted.f < (outside ? reflected.f : simplex.back().f)) {
                simplex.back() = std::move(contracted);
                continue;
            }

            for (std::size_t i = 1; i <= n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    simplex[i].x[j] = simplex[0].x[j] + 0.5 * (simplex[i].x[j] - simplex[0].x[j]);
                }
                simplex[i].f = f(simplex[i].x);
            }
        }

        auto top = std::min_element(simplex.begin(), simplex.end(),
                                    [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (top->f < best.f) best = *top;
        if (evaluations >= options.max_evaluations) break;
        if (round > 0 && !(best.f < before)) break;
    }
    return {best.x, best.f, evaluations};
}

}  // namespace hawkes
