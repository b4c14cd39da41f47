#include "hawkes/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hawkes/error.hpp"
#include "hawkes/likelihood.hpp"

namespace hawkes::io {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_number(std::string_view text) {
    const std::string s = trim(text);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

double require_number(std::string_view text, const std::string& where) {
    const auto v = parse_number(text);
    if (!v || !std::isfinite(*v)) throw InvalidInput(where + ": not a finite number: '" + trim(text) + "'");
    return *v;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double param(const Json& j, const char* name) {
    if (!j.contains(name) || !j.at(name).is_number()) {
        throw InvalidInput(std::string("kernel JSON: missing numeric field '") + name + "'");
    }
    return j.at(name).get<double>();
}

BaseKernel base_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        throw InvalidInput("kernel JSON: expected an object with a 'type' field");
    }
    BaseKernel k;
    switch (parse_family(j.at("type").get<std::string>())) {
        case Family::Exp: k = ExpKernel{param(j, "alpha"), param(j, "beta")}; break;
        case Family::Pwl: k = PwlKernel{param(j, "k"), param(j, "c"), param(j, "p")}; break;
        case Family::Sqr: k = SqrKernel{param(j, "b"), param(j, "l")}; break;
        case Family::Sns: k = SnsKernel{param(j, "a"), param(j, "omega")}; break;
    }
    validate(k);
    return k;
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------

EventSequence read_events(std::istream& in, const EventReadOptions& options) {
    if (!(options.unit > 0.0) || !std::isfinite(options.unit)) throw InvalidInput("unit must be positive");
    std::vector<double> times;
    std::optional<double> horizon;
    bool header_seen = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '#') {
            const auto eq = s.find("horizon=");
            if (eq != std::string::npos) horizon = require_number(s.substr(eq + 8), "line " + std::to_string(lineno));
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (!parse_number(s)) continue;  // header row
        }
        times.push_back(require_number(s, "line " + std::to_string(lineno)) * options.unit);
    }
    double T;
    if (options.horizon) {
        T = *options.horizon * options.unit;
    } else if (horizon) {
        T = *horizon * options.unit;
    } else {
        if (times.empty()) throw InvalidInput("event file has no events and no horizon");
        T = times.back();
    }
    return EventSequence(std::move(times), T);
}

EventSequence read_events(const std::filesystem::path& path, const EventReadOptions& options) {
    auto in = open_in(path);
    try {
        return read_events(in, options);
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void write_events(std::ostream& out, const EventSequence& events) {
    out << "# horizon=" << format_number(events.horizon()) << "\n";
    out << "t\n";
    for (double t : events.times()) out << format_number(t) << "\n";
}

void write_events(const std::filesystem::path& path, const EventSequence& events) {
    auto out = open_out(path);
    write_events(out, events);
    finish(out, path);
}

// ---------------------------------------------------------------------------

TickSeries read_ticks(std::istream& in) {
    TickSeries series;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto comma = s.find(',');
        if (comma == std::string::npos) throw InvalidInput("line " + std::to_string(lineno) + ": expected 'timestamp,value'");
        if (!header_seen) {
            header_seen = true;
            if (!parse_number(s.substr(0, comma))) continue;
        }
        const std::string where = "line " + std::to_string(lineno);
        const double ts = require_number(s.substr(0, comma), where);
        const double v = require_number(s.substr(comma + 1), where);
        if (!series.timestamps.empty() && ts < series.timestamps.back()) {
            throw InvalidInput(where + ": timestamps must be nondecreasing");
        }
        series.timestamps.push_back(ts);
        series.values.push_back(v);
    }
    return series;
}

TickSeries read_ticks(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return read_ticks(in);
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

EventSequence extract_events_by_threshold(const TickSeries& series, double threshold, const ExtractOptions& options) {
    if (series.timestamps.size() != series.values.size()) throw InvalidInput("tick series columns differ in length");
    if (series.timestamps.size() < 2) throw InvalidInput("tick series needs at least two rows");
    if (!options.absolute && !(threshold > 0.0)) throw InvalidInput("threshold must be positive");

    const double origin = series.timestamps.front();
    std::vector<double> times;
    auto emit = [&](std::size_t row) {
        const double t = series.timestamps[row] - origin;
        if (times.empty() || t > times.back()) times.push_back(t);
    };
    if (options.absolute) {
        for (std::size_t i = 0; i < series.values.size(); ++i) {
            if (series.values[i] >= threshold) emit(i);
        }
    } else {
        double reference = series.values.front();
        for (std::size_t i = 1; i < series.values.size(); ++i) {
            if (reference == 0.0) {
                reference = series.values[i];
                continue;
            }
            if (std::abs(series.values[i] / reference - 1.0) > threshold) {
                emit(i);
                reference = series.values[i];
            }
        }
    }
    if (times.size() < options.min_events) {
        throw InvalidInput("sequence invalid: " + std::to_string(times.size()) + " events extracted, at least " +
                           std::to_string(options.min_events) + " required");
    }
    return EventSequence(std::move(times), series.timestamps.back() - origin);
}

// ---------------------------------------------------------------------------

void write_covariance(const std::filesystem::path& path, const CovarianceGrid& grid) {
    auto out = open_out(path);
    out << "lag_time,nu_value\n";
    for (std::size_t k = 0; k < grid.values.size(); ++k) {
        out << format_number(grid.lag_time(k)) << ',' << format_number(grid.values[k]) << "\n";
    }
    finish(out, path);
}

void write_estimate(std::ostream& out, const KernelEstimate& estimate) {
    out << "t,phi_hat\n";
    for (std::size_t k = 0; k < estimate.values.size(); ++k) {
        out << format_number(estimate.time(k)) << ',' << format_number(estimate.values[k]) << "\n";
    }
}

void write_estimate(const std::filesystem::path& path, const KernelEstimate& estimate) {
    auto out = open_out(path);
    write_estimate(out, estimate);
    finish(out, path);
}

KernelEstimate read_estimate(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<double> t, v;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto comma = s.find(',');
        const std::string where = path.string() + ": line " + std::to_string(lineno);
        if (comma == std::string::npos) throw InvalidInput(where + ": expected 't,phi_hat'");
        if (!header_seen) {
            header_seen = true;
            if (!parse_number(s.substr(0, comma))) continue;
        }
        t.push_back(require_number(s.substr(0, comma), where));
        v.push_back(require_number(s.substr(comma + 1), where));
    }
    if (t.size() < 2) throw InvalidInput(path.string() + ": an estimate needs at least two samples");
    KernelEstimate e;
    e.delta = t[1] - t[0];
    if (!(e.delta > 0.0) || std::abs(t[0]) > 1e-12 * e.delta) {
        throw InvalidInput(path.string() + ": estimate grid must start at 0 with a positive step");
    }
    for (std::size_t k = 2; k < t.size(); ++k) {
        if (std::abs(t[k] - static_cast<double>(k) * e.delta) > 1e-6 * e.delta) {
            throw InvalidInput(path.string() + ": estimate grid is not uniform");
        }
    }
    e.values = std::move(v);
    e.tau_max = static_cast<double>(e.values.size()) * e.delta;
    return e;
}

// ---------------------------------------------------------------------------

Json to_json(const BaseKernel& kernel) {
    return std::visit(
        [](const auto& k) -> Json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ExpKernel>) return {{"type", "EXP"}, {"alpha", k.alpha}, {"beta", k.beta}};
            if constexpr (std::is_same_v<K, PwlKernel>) return {{"type", "PWL"}, {"k", k.k}, {"c", k.c}, {"p", k.p}};
            if constexpr (std::is_same_v<K, SqrKernel>) return {{"type", "SQR"}, {"b", k.b}, {"l", k.l}};
            if constexpr (std::is_same_v<K, SnsKernel>) return {{"type", "SNS"}, {"a", k.a}, {"omega", k.omega}};
        },
        kernel);
}

Json to_json(const CompositeKernel& kernel) {
    return std::visit(
        [](const auto& k) -> Json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Single>) return to_json(k.kernel);
            if constexpr (std::is_same_v<K, Sum>) return {{"op", "sum"}, {"left", to_json(k.left)}, {"right", to_json(k.right)}};
            if constexpr (std::is_same_v<K, Product>) {
                return {{"op", "product"}, {"left", to_json(k.left)}, {"right", to_json(k.right)}};
            }
        },
        kernel);
}

Json to_json(const HawkesModel& model) { return {{"mu", model.mu}, {"kernel", to_json(model.kernel)}}; }

Json to_json(const StationarityVerdict& verdict) {
    return {{"norm", number_or_null(verdict.norm_value)}, {"is_bound", verdict.is_bound}, {"stationary", verdict.stationary}};
}

Json to_json(const FitResult& fit) {
    return {{"label", fit.label()},
            {"kernel", to_json(fit.kernel)},
            {"description", describe(fit.kernel)},
            {"residue", number_or_null(fit.residue)},
            {"stationarity", to_json(fit.verdict)}};
}

Json to_json(const DecompositionResult& r) {
    Json audit = Json::array();
    for (const auto& f : r.audit) audit.push_back(to_json(f));
    Json gd = {{"model", to_json(r.gd.model)}, {"llh_train", number_or_null(r.gd.llh)}, {"iterations", r.gd.iterations}};
    return {
        {"chosen", std::string(chosen_name(r.chosen))},
        {"decomposition_level", std::string(chosen_name(r.decomposition_level))},
        {"model", to_json(r.chosen_model())},
        {"eta", r.eta},
        {"k1", to_json(r.k1)},
        {"k2", to_json(r.k2)},
        {"gd", gd},
        {"mu_k1", r.mu_k1},
        {"mu_k2", r.mu_k2},
        {"llh", {{"k1", number_or_null(r.llh_k1)},
                 {"k2", number_or_null(r.llh_k2)},
                 {"gd", number_or_null(r.llh_gd)},
                 {"chosen", number_or_null(r.llh_chosen)},
                 {"held_out", r.held_out}}},
        {"audit", audit},
        {"grid", {{"delta", r.estimate.delta},
                  {"tau_max", r.estimate.tau_max},
                  {"points", r.estimate.values.size()},
                  {"lambda_hat", r.lambda_hat}}},
        {"events", {{"train", r.n_train}, {"evaluation", r.n_eval}}},
    };
}

CompositeKernel kernel_from_json(const Json& j) {
    if (j.is_object() && j.contains("op")) {
        const auto op = j.at("op").get<std::string>();
        if (!j.contains("left") || !j.contains("right")) throw InvalidInput("kernel JSON: composition needs 'left' and 'right'");
        const auto left = base_from_json(j.at("left"));
        const auto right = base_from_json(j.at("right"));
        if (op == "sum") return Sum{left, right};
        if (op == "product") return Product{left, right};
        throw InvalidInput("kernel JSON: unknown op '" + op + "'");
    }
    return Single{base_from_json(j)};
}

HawkesModel model_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("mu") || !j.contains("kernel")) {
        throw InvalidInput("model JSON: expected {\"mu\": ..., \"kernel\": ...}");
    }
    HawkesModel m{j.at("mu").get<double>(), kernel_from_json(j.at("kernel"))};
    if (!(m.mu > 0.0) || !std::isfinite(m.mu)) throw InvalidInput("model JSON: mu must be positive");
    return m;
}

HawkesModel read_model(const std::filesystem::path& path) {
    const Json j = read_json(path);
    try {
        return model_from_json(j);
    } catch (const Json::exception& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
    finish(out, path);
}

Json read_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

}  // namespace hawkes::io
