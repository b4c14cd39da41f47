#include "hawkes/events.hpp"

#include <cmath>
#include <string>

#include "hawkes/error.hpp"

namespace hawkes {

EventSequence::EventSequence(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
    if (!std::isfinite(horizon_) || horizon_ < 0.0) {
        throw InvalidInput("event horizon must be finite and non-negative");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const double t = times_[i];
        if (!std::isfinite(t) || t < 0.0 || t > horizon_) {
            throw InvalidInput("event " + std::to_string(i) + " at t=" + std::to_string(t) +
                               " lies outside [0, " + std::to_string(horizon_) + "]");
        }
        if (i > 0 && !(t > times_[i - 1])) {
            throw InvalidInput("event times must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
}

}  // namespace hawkes
