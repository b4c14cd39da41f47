#include "hawkes/simulate.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hawkes/error.hpp"

namespace hawkes {

double intensity_upper_bound(const HawkesModel& model, const EventSequence& history, double t) {
    double bound = model.mu;
    for (double ti : history.times()) {
        if (ti >= t) break;
        bound += sup_from(model.kernel, t - ti);
    }
    return bound;
}

EventSequence simulate(const HawkesModel& model, double horizon, std::uint64_t seed,
                       const SimulationOptions& options) {
    if (!(model.mu > 0.0) || !std::isfinite(model.mu)) throw InvalidInput("background rate must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidInput("simulation horizon must be positive");

    const auto verdict = stationarity_norm(model.kernel);
    if (!verdict.stationary) {
        throw InvalidInput("cannot simulate a non-stationary model (||phi|| = " + std::to_string(verdict.norm_value) +
                           ")");
    }
    const double expected = model.mu / (1.0 - verdict.norm_value) * horizon;
    if (expected > options.max_events) {
        throw InvalidInput("blow-up guard: expected " + std::to_string(expected) + " events exceeds cap " +
                           std::to_string(options.max_events));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> times;
    std::size_t first_active = 0;
    double t = 0.0;
    for (;;) {
        // Bound valid from t until the next accepted event.
        while (first_active < times.size() &&
               sup_from(model.kernel, t - times[first_active]) < options.active_cutoff) {
            ++first_active;
        }
        double bound = model.mu;
        for (std::size_t j = first_active; j < times.size(); ++j) bound += sup_from(model.kernel, t - times[j]);

        const double wait = -std::log1p(-unit(rng)) / bound;
        if (!(wait > 0.0)) continue;
        t += wait;
        if (t > horizon) break;

        double rate = model.mu;
        for (std::size_t j = first_active; j < times.size(); ++j) rate += evaluate(model.kernel, t - times[j]);
        if (unit(rng) * bound <= rate) {
            times.push_back(t);
            if (static_cast<double>(times.size()) > options.max_events) {
                throw InvalidInput("blow-up guard: event count exceeded cap " + std::to_string(options.max_events));
            }
        }
    }
    return EventSequence(std::move(times), horizon);
}

}  // namespace hawkes
