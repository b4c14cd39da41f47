#include "hawkes/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "hawkes/error.hpp"

namespace hawkes {

double estimate_lambda(const EventSequence& events) {
    if (!(events.horizon() > 0.0)) throw InvalidInput("horizon must be positive to estimate a rate");
    if (events.empty()) throw InvalidInput("no events: rate is not estimable");
    return static_cast<double>(events.size()) / events.horizon();
}

CovarianceGrid covariance_grid(const EventSequence& events, double delta, double tau_max, unsigned threads) {
    if (events.size() < 2) throw InvalidInput("covariance estimation needs at least two events");
    const double horizon = events.horizon();
    if (!(delta > 0.0) || !(tau_max > delta) || tau_max > horizon) {
        throw InvalidInput("covariance grid requires 0 < delta < tau_max <= T (delta=" + std::to_string(delta) +
                           ", tau_max=" + std::to_string(tau_max) + ", T=" + std::to_string(horizon) + ")");
    }

    CovarianceGrid grid;
    grid.delta = delta;
    grid.h = delta;
    grid.tau_max = tau_max;
    grid.lambda_hat = estimate_lambda(events);

    const auto bins = static_cast<std::size_t>(std::floor(horizon / delta));
    std::vector<double> centred(bins, -grid.lambda_hat * delta);
    for (double t : events.times()) {
        const auto i = static_cast<std::size_t>(std::floor(t / delta));
        if (i < bins) centred[i] += 1.0;
    }

    // Tolerance absorbs tau_max = resolution * delta rounding to just below an integer.
    auto lags = static_cast<std::size_t>(std::floor(tau_max / delta + 1e-9));
    lags = std::min(lags, bins);
    grid.values.assign(lags, 0.0);

    auto lag_value = [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + k < bins; ++i) acc += centred[i] * centred[i + k];
        return acc / horizon;
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(lags)));
    if (threads == 1) {
        for (std::size_t k = 0; k < lags; ++k) grid.values[k] = lag_value(k);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t k = w; k < lags; k += threads) grid.values[k] = lag_value(k);
            });
        }
    }
    return grid;
}

double horizon_from_histogram(const EventSequence& events, double percentile, std::size_t bins) {
    if (!(percentile > 0.0 && percentile < 1.0)) {
        throw InvalidInput("histogram percentile must lie in the open interval (0, 1)");
    }
    if (events.size() < 2) throw InvalidInput("horizon heuristic needs at least two events");
    if (bins == 0) throw InvalidInput("histogram needs at least one bin");

    const auto times = events.times();
    std::vector<double> gaps(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) gaps[i - 1] = times[i] - times[i - 1];

    auto [lo_it, hi_it] = std::minmax_element(gaps.begin(), gaps.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (hi <= 0.0) throw InvalidInput("degenerate sequence: all inter-event intervals are zero");
    if (lo == hi) {
        // Same convention as numpy for a zero-width range.
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);

    std::vector<std::size_t> counts(bins, 0);
    for (double g : gaps) {
        auto i = static_cast<std::size_t>(std::floor((g - lo) / width));
        counts[std::min(i, bins - 1)] += 1;
    }

    const double total = static_cast<double>(gaps.size());
    std::size_t cumulative = 0;
    for (std::size_t i = 0; i < bins; ++i) {
        cumulative += counts[i];
        if (static_cast<double>(cumulative) / total > percentile) return lo + width * static_cast<double>(i + 1);
    }
    return hi;
}

}  // namespace hawkes
