#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "hawkes/events.hpp"
#include "hawkes/search.hpp"

namespace hawkes {

struct KernelCurves {
    std::vector<double> t;
    std::vector<double> phi_hat;
    std::vector<double> k1;
    std::vector<double> k2;
    std::vector<double> chosen;
};

struct ReportBundle {
    DecompositionResult result;
    KernelCurves curves;
    // (unit-exponential quantile, observed compensator-increment quantile), ascending.
    std::vector<std::pair<double, double>> qq;
};

KernelCurves kernel_curves(const DecompositionResult& result);

// Time-rescaled inter-event increments of `events` under `model`, compared with the
// unit exponential at probabilities (i - 0.5) / quantiles.
std::vector<std::pair<double, double>> qq_pairs(const HawkesModel& model, const EventSequence& events,
                                                std::size_t quantiles = 100);

ReportBundle make_report(DecompositionResult result, const EventSequence& events, std::size_t quantiles = 100);

// Writes result.json, fits.json, phi_curves.csv, qq.csv and report.svg into `out_dir`
// (created if missing). Output bytes depend only on the bundle.
void emit_report(const ReportBundle& bundle, const std::filesystem::path& out_dir);

}  // namespace hawkes
