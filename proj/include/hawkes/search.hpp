#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "hawkes/covariance.hpp"
#include "hawkes/fit.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/model.hpp"
#include "hawkes/spectral.hpp"

namespace hawkes {

// ---------------------------------------------------------------------------
// Gradient-based exponential baseline (quasi-Newton ascent in log-parameters)

struct GdOptions {
    // Deterministic initial points tried in order; 1 reproduces a single-start fit.
    int restarts = 5;
    int max_iterations = 500;
    double tolerance = 1e-13;
};

struct GdResult {
    HawkesModel model{1.0, Single{ExpKernel{1.0, 2.0}}};
    double llh = -std::numeric_limits<double>::infinity();  // in-sample
    int iterations = 0;
};

// O(n) log-likelihood of an exponential Hawkes process; -inf when the parameters are
// non-positive or alpha / beta >= 1. The gradient is w.r.t. (mu, alpha, beta).
double exp_log_likelihood(double mu, double alpha, double beta, const EventSequence& events,
                          std::array<double, 3>* gradient = nullptr);

GdResult fit_gd_exponential(const EventSequence& events, const GdOptions& options = {});

// ---------------------------------------------------------------------------

// First ceil(f n) events train on [0, t_split]; the rest form the test sequence on
// [t_split, T], shifted to start at zero unless `keep_absolute`.
std::pair<EventSequence, EventSequence> train_test_split(const EventSequence& events, double fraction,
                                                         bool keep_absolute = false);

enum class Chosen { K1, K2, GD };
std::string_view chosen_name(Chosen c);

struct SelectionInput {
    bool k1_stationary;
    bool k2_stationary;
    double mr1;
    double mr2;
    double eta;
    double llh_k1;
    double llh_k2;
    double llh_gd;  // -inf when the baseline failed or is disabled
};

// Level choice followed by the likelihood comparison against the baseline.
// K2 replaces a stationary K1 only when MR1 >= eta * MR2.
// Throws NoStationaryModel when nothing usable remains.
Chosen select_model(const SelectionInput& in);

struct DecompositionConfig {
    std::size_t resolution = 100;
    double horizon_percentile = 0.95;
    double eta = 1.2;
    std::optional<double> holdout;  // train fraction; llh is then evaluated on the rest
    bool keep_absolute_test_times = false;
    int gd_restarts = 5;
    unsigned threads = 0;  // 0: hardware concurrency
    FitOptions fit{};
    SpectralOptions spectral{};
};

struct DecompositionResult {
    Chosen chosen = Chosen::K1;
    FitResult k1;
    FitResult k2;
    GdResult gd;
    double eta = 1.2;

    double mu_k1 = 0.0;  // background rate implied by Lambda_hat (1 - ||phi||)
    double mu_k2 = 0.0;
    double llh_k1 = -std::numeric_limits<double>::infinity();
    double llh_k2 = -std::numeric_limits<double>::infinity();
    double llh_gd = -std::numeric_limits<double>::infinity();
    double llh_chosen = -std::numeric_limits<double>::infinity();

    std::vector<FitResult> audit;  // 4 single fits, then 8 expansions of K1

    KernelEstimate estimate;
    double lambda_hat = 0.0;
    std::size_t n_train = 0;
    std::size_t n_eval = 0;
    bool held_out = false;

    // Model selected by the decomposition alone, before the baseline comparison.
    Chosen decomposition_level = Chosen::K1;
    HawkesModel chosen_model() const;
};

DecompositionResult decompose(const EventSequence& events, const DecompositionConfig& config = {});

// Runs everything after the spectral stage on a supplied estimate. `train` provides
// Lambda_hat and the baseline fit; likelihoods are evaluated on `evaluation`.
DecompositionResult decompose_estimate(const KernelEstimate& estimate, const EventSequence& train,
                                       const EventSequence& evaluation, const DecompositionConfig& config = {});

// The level-two candidates in evaluation order: +EXP, xEXP, +PWL, xPWL, ...
std::vector<std::pair<Expansion, Family>> expansion_candidates();

}  // namespace hawkes
