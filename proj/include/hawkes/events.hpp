#pragma once

#include <span>
#include <vector>

namespace hawkes {

// Ordered event times of a simple point process observed on [0, horizon].
class EventSequence {
public:
    EventSequence() = default;

    // Throws InvalidInput unless times are strictly increasing and lie in [0, horizon].
    EventSequence(std::vector<double> times, double horizon);

    std::span<const double> times() const { return times_; }
    double horizon() const { return horizon_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    double operator[](std::size_t i) const { return times_[i]; }

private:
    std::vector<double> times_;
    double horizon_ = 0.0;
};

}  // namespace hawkes
