#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include "hawkes/covariance.hpp"
#include "hawkes/fit.hpp"
#include "hawkes/kernels.hpp"
#include "hawkes/model.hpp"
#include "hawkes/quadrature.hpp"

namespace testing {

using namespace hawkes;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline BaseKernel random_base(std::mt19937_64& rng, Family f) {
    switch (f) {
        case Family::Exp: return ExpKernel{uniform(rng, 0.05, 3.0), uniform(rng, 0.2, 5.0)};
        case Family::Pwl: return PwlKernel{uniform(rng, 0.05, 2.0), uniform(rng, 0.1, 3.0), uniform(rng, 1.2, 4.0)};
        case Family::Sqr: return SqrKernel{uniform(rng, 0.05, 2.0), uniform(rng, 0.1, 5.0)};
        case Family::Sns: return SnsKernel{uniform(rng, 0.05, 2.0), uniform(rng, 0.3, 6.0)};
    }
    return ExpKernel{1.0, 1.0};
}

// Random product for an ordered row; discontinuous pairs share their endpoint.
inline Product random_product(std::mt19937_64& rng, Family a, Family b) {
    auto left = random_base(rng, a);
    auto right = random_base(rng, b);
    if (a == Family::Sqr && b == Family::Sns) {
        std::get<SqrKernel>(left).l = std::numbers::pi / std::get<SnsKernel>(right).omega;
    }
    if (a == Family::Sns && b == Family::Sns) {
        std::get<SnsKernel>(right).omega = std::get<SnsKernel>(left).omega;
    }
    return {left, right};
}

// Integral of phi over [0, s] by adaptive quadrature, split at support ends.
inline double quadrature_integral(const CompositeKernel& k, double s) {
    const double end = std::min(s, support_end(k));
    std::vector<double> cuts;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (!std::is_same_v<T, Single>) {
                for (double e : {support_end(c.left), support_end(c.right)}) {
                    if (e > 0.0 && e < end) cuts.push_back(e);
                }
            }
        },
        k);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (!(end > 0.0)) return 0.0;
    auto f = [&](double t) { return evaluate(k, t); };
    return quadrature::integrate(f, 0.0, end, cuts, 1e-13);
}

inline double quadrature_mass(const CompositeKernel& k) { return quadrature_integral(k, INFINITY); }

// Direct O(n) intensity sum with no truncation.
inline double brute_intensity(const HawkesModel& m, const std::vector<double>& times, double t) {
    double rate = m.mu;
    for (double s : times) {
        if (s < t) rate += evaluate(m.kernel, t - s);
    }
    return rate;
}

// Expected binned-count covariance grid of a stationary EXP Hawkes process:
// nu_k = Lambda [k == 0] + integral c(u) tri((u - k delta) / delta) du with
// c(u) = Lambda alpha (2 beta - alpha) / (2 (beta - alpha)) exp(-(beta - alpha) |u|).
inline CovarianceGrid analytic_exp_grid(double mu, double alpha, double beta, double tau_max, std::size_t points) {
    const double lambda = mu / (1.0 - alpha / beta);
    const double decay = beta - alpha;
    const double amp = lambda * alpha * (2.0 * beta - alpha) / (2.0 * decay);
    CovarianceGrid g;
    g.delta = g.h = tau_max / static_cast<double>(points);
    g.tau_max = tau_max;
    g.lambda_hat = lambda;
    for (std::size_t k = 0; k < points; ++k) {
        const double tk = static_cast<double>(k) * g.delta;
        auto f = [&](double u) { return amp * std::exp(-decay * std::abs(u)) * std::max(0.0, 1.0 - std::abs(u - tk) / g.delta); };
        const double cuts[] = {0.0, tk};
        const double lo = tk - g.delta, hi = tk + g.delta;
        std::vector<double> inner;
        for (double c : cuts) {
            if (c > lo && c < hi) inner.push_back(c);
        }
        std::sort(inner.begin(), inner.end());
        inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
        g.values.push_back(quadrature::integrate(f, lo, hi, inner, 1e-13) + (k == 0 ? lambda : 0.0));
    }
    return g;
}

// Random Single, Sum or Product kernel over all family pairs, rescaled to the given mass.
inline CompositeKernel random_composite(std::mt19937_64& rng, double mass) {
    const Family a = kAllFamilies[rng() % 4];
    const Family b = kAllFamilies[rng() % 4];
    CompositeKernel k;
    switch (rng() % 3) {
        case 0: k = Single{random_base(rng, a)}; break;
        case 1: k = Sum{random_base(rng, a), random_base(rng, b)}; break;
        default: k = random_product(rng, std::min(a, b), std::max(a, b)); break;
    }
    return rescale(k, 1.0, mass / quadrature_mass(k));
}

// Model with a random kernel and an arbitrary (not Hawkes-distributed) event sequence.
inline std::pair<HawkesModel, EventSequence> random_model_and_sequence(std::mt19937_64& rng, std::size_t max_events) {
    HawkesModel m{uniform(rng, 0.2, 2.0), random_composite(rng, uniform(rng, 0.1, 0.9))};
    const double horizon = uniform(rng, 5.0, 200.0);
    const std::size_t n = 1 + rng() % max_events;
    std::vector<double> times;
    for (std::size_t i = 0; i < n; ++i) times.push_back(uniform(rng, 0.0, horizon));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return {m, EventSequence(times, horizon)};
}

// sum log lambda(t_i) - mu T - sum_i integral_0^{T - t_i} phi, with every integral by quadrature.
inline double quadrature_log_likelihood(const HawkesModel& m, const EventSequence& events) {
    double value = -m.mu * events.horizon();
    std::vector<double> history;
    for (double t : events.times()) {
        value += std::log(brute_intensity(m, history, t));
        history.push_back(t);
        value -= quadrature_integral(m.kernel, events.horizon() - t);
    }
    return value;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hawkes_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
