#pragma once

#include <cstdint>

#include "hawkes/model.hpp"

namespace hawkes {

struct SimulationOptions {
    // Abort when the expected (or realised) event count exceeds this.
    double max_events = 1e7;
    double active_cutoff = kDefaultActiveCutoff;
};

// Bound on lambda(s) valid for every s >= t while no new event arrives:
// mu + sum_i sup_{u >= t - t_i} phi(u).
double intensity_upper_bound(const HawkesModel& model, const EventSequence& history, double t);

// Ogata thinning on [0, horizon]. Deterministic for a given seed.
// Throws InvalidInput for non-stationary models or when the blow-up guard trips.
EventSequence simulate(const HawkesModel& model, double horizon, std::uint64_t seed,
                       const SimulationOptions& options = {});

}  // namespace hawkes
