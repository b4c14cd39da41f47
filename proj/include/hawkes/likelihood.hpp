#pragma once

#include <limits>
#include <string>
#include <vector>

#include "hawkes/model.hpp"

namespace hawkes {

struct LogLikelihood {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t n_events = 0;
    double horizon = 0.0;
    std::string diagnostic;  // set when value is the -inf sentinel

    bool finite() const { return value > -std::numeric_limits<double>::infinity(); }
};

// Phi(s) = integral of phi over [0, s]; s may be +inf.
double kernel_integral(const BaseKernel& kernel, double s);
double kernel_integral(const CompositeKernel& kernel, double s);

// Exact total mass ||phi||, i.e. kernel_integral(kernel, inf).
double kernel_mass(const CompositeKernel& kernel);

// sum log lambda(t_i) - integral_0^T lambda(u) du.
LogLikelihood log_likelihood(const HawkesModel& model, const EventSequence& events,
                             double cutoff = kDefaultActiveCutoff);

// Compensator increments Lambda(t_i) - Lambda(t_{i-1}) (with t_0 = 0). Unit-exponential
// under a correctly specified model.
std::vector<double> compensator_increments(const HawkesModel& model, const EventSequence& events,
                                           double cutoff = kDefaultActiveCutoff);

}  // namespace hawkes
