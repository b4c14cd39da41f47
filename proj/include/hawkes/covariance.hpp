#pragma once

#include <cstddef>
#include <vector>

#include "hawkes/events.hpp"

namespace hawkes {

// Empirical covariance density nu at lags k * delta, k = 0 .. size - 1.
struct CovarianceGrid {
    std::vector<double> values;
    double delta = 0.0;
    double h = 0.0;  // bandwidth, always equal to delta
    double tau_max = 0.0;
    double lambda_hat = 0.0;

    double lag_time(std::size_t k) const { return static_cast<double>(k) * delta; }
};

// N(T) / T. Throws InvalidInput for empty sequences.
double estimate_lambda(const EventSequence& events);

// Counts in adjacent bins [i delta, (i + 1) delta), centred by lambda_hat * delta, then
// nu_k = (1 / T) sum_i c_i c_{i+k}. Lags whose window would pass T are dropped.
// `threads` > 1 spreads lags across workers; results do not depend on it.
CovarianceGrid covariance_grid(const EventSequence& events, double delta, double tau_max, unsigned threads = 1);

// Upper edge of the first bin of a 100-bin inter-event histogram whose cumulative
// mass strictly exceeds `percentile`.
double horizon_from_histogram(const EventSequence& events, double percentile, std::size_t bins = 100);

}  // namespace hawkes
