#pragma once

#include "hawkes/events.hpp"
#include "hawkes/kernels.hpp"

namespace hawkes {

// Univariate Hawkes process: lambda(t) = mu + sum_{t_i < t} phi(t - t_i).
struct HawkesModel {
    double mu;
    CompositeKernel kernel;
};

// Contributions below this are dropped from the active history.
inline constexpr double kDefaultActiveCutoff = 1e-12;

// Left-limit intensity: events at exactly t are excluded.
double intensity_at(const HawkesModel& model, const EventSequence& history, double t);

}  // namespace hawkes
