#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes/covariance.hpp"
#include "hawkes/events.hpp"
#include "hawkes/fit.hpp"
#include "hawkes/model.hpp"
#include "hawkes/search.hpp"
#include "hawkes/spectral.hpp"

namespace hawkes::io {

using Json = nlohmann::json;

// Shortest decimal text that parses back to the same double.
std::string format_number(double x);

// ---------------------------------------------------------------------------
// Event CSV: optional "# horizon=<T>" line, header "t", one time per line.

struct EventReadOptions {
    double unit = 1.0;                // multiplies every timestamp (and the horizon)
    std::optional<double> horizon;    // input units; overrides the file, else the last event time
};

EventSequence read_events(std::istream& in, const EventReadOptions& options = {});
EventSequence read_events(const std::filesystem::path& path, const EventReadOptions& options = {});
void write_events(std::ostream& out, const EventSequence& events);
void write_events(const std::filesystem::path& path, const EventSequence& events);

// ---------------------------------------------------------------------------
// Tick series: header row, then "timestamp,value" rows with nondecreasing timestamps.

struct TickSeries {
    std::vector<double> timestamps;
    std::vector<double> values;
};

TickSeries read_ticks(std::istream& in);
TickSeries read_ticks(const std::filesystem::path& path);

struct ExtractOptions {
    // Emits rows whose value is >= threshold instead of relative moves.
    bool absolute = false;
    std::size_t min_events = 50;
};

// Relative mode: an event whenever |value / reference - 1| > threshold; the reference
// resets to the value at each emitted event. Event times are relative to the first row.
EventSequence extract_events_by_threshold(const TickSeries& series, double threshold,
                                          const ExtractOptions& options = {});

// ---------------------------------------------------------------------------

void write_covariance(const std::filesystem::path& path, const CovarianceGrid& grid);
void write_estimate(std::ostream& out, const KernelEstimate& estimate);
void write_estimate(const std::filesystem::path& path, const KernelEstimate& estimate);
KernelEstimate read_estimate(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// JSON

Json to_json(const BaseKernel& kernel);
Json to_json(const CompositeKernel& kernel);
Json to_json(const HawkesModel& model);
Json to_json(const StationarityVerdict& verdict);
Json to_json(const FitResult& fit);
Json to_json(const DecompositionResult& result);

CompositeKernel kernel_from_json(const Json& j);
HawkesModel model_from_json(const Json& j);
HawkesModel read_model(const std::filesystem::path& path);

// Pretty-printed with a trailing newline; object keys are sorted so output is stable.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

}  // namespace hawkes::io
