#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "hawkes/error.hpp"
#include "hawkes/io.hpp"
#include "hawkes/report.hpp"
#include "hawkes/search.hpp"
#include "hawkes/simulate.hpp"

namespace hawkes::cli {

namespace fs = std::filesystem;

namespace {

struct DecomposeFlags {
    std::size_t resolution = 100;
    double percentile = 0.95;
    double eta = 1.2;
    double holdout = 0.0;  // 0: in-sample
    bool keep_absolute = false;
    int gd_restarts = 5;
    unsigned threads = 0;

    DecompositionConfig config() const {
        DecompositionConfig c;
        c.resolution = resolution;
        c.horizon_percentile = percentile;
        c.eta = eta;
        if (holdout > 0.0) c.holdout = holdout;
        c.keep_absolute_test_times = keep_absolute;
        c.gd_restarts = gd_restarts;
        c.threads = threads;
        return c;
    }
};

void add_decompose_flags(CLI::App* app, DecomposeFlags& f) {
    app->add_option("--resolution", f.resolution, "Lag points on the covariance grid")->check(CLI::Range(2, 1 << 20));
    app->add_option("--horizon-percentile", f.percentile, "Inter-event histogram percentile giving tau_max")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--eta", f.eta, "Level regularisation: K2 needs MR1 >= eta * MR2")->check(CLI::PositiveNumber);
    app->add_option("--holdout", f.holdout, "Train fraction; likelihoods are scored on the remainder")
        ->check(CLI::Range(0.0, 1.0));
    app->add_flag("--keep-absolute", f.keep_absolute, "Keep absolute times in the held-out sequence");
    app->add_option("--gd-restarts", f.gd_restarts, "Exponential baseline starts (0 disables it)")
        ->check(CLI::Range(0, 5));
    app->add_option("--threads", f.threads, "Worker threads (0: all cores)");
}

struct EventFlags {
    std::string path;
    double unit = 1.0;
    double horizon = 0.0;

    io::EventReadOptions options() const {
        io::EventReadOptions o;
        o.unit = unit;
        if (horizon > 0.0) o.horizon = horizon;
        return o;
    }
};

void add_event_flags(CLI::App* app, EventFlags& f, bool required = true) {
    auto* in = app->add_option("--in", f.path, "Event CSV (header t)");
    if (required) in->required();
    app->add_option("--unit", f.unit, "Multiply timestamps by this factor")->check(CLI::PositiveNumber);
    app->add_option("--horizon", f.horizon, "Observation horizon T (default: file or last event)")
        ->check(CLI::PositiveNumber);
}

std::string llh_text(double x) { return std::isfinite(x) ? io::format_number(x) : std::string("-inf"); }

EventSequence evaluation_events(const EventSequence& events, const DecompositionConfig& c) {
    if (!c.holdout) return events;
    return train_test_split(events, *c.holdout, c.keep_absolute_test_times).second;
}

DecompositionResult run_decompose(const EventSequence& events, const DecompositionConfig& c,
                                  const std::string& estimate_path) {
    if (estimate_path.empty()) return decompose(events, c);
    const auto estimate = io::read_estimate(estimate_path);
    EventSequence train = events, evaluation = events;
    if (c.holdout) std::tie(train, evaluation) = train_test_split(events, *c.holdout, c.keep_absolute_test_times);
    auto r = decompose_estimate(estimate, train, evaluation, c);
    r.held_out = c.holdout.has_value();
    return r;
}

int code_for(const std::exception_ptr& e, std::ostream& err, const std::string& context = {}) {
    const std::string prefix = context.empty() ? "error: " : "error: " + context + ": ";
    try {
        std::rethrow_exception(e);
    } catch (const NoStationaryModel& x) {
        err << prefix << x.what() << "\n";
        return kNoStationaryModel;
    } catch (const InvalidInput& x) {
        err << prefix << x.what() << "\n";
        return kInvalidInput;
    } catch (const DegenerateSpectrum& x) {
        err << prefix << x.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& x) {
        err << prefix << x.what() << "\n";
        return kFailure;
    }
}

// Expands "--config FILE" into "--key=value" tokens placed right after the subcommand,
// so anything given on the command line later takes precedence.
std::vector<std::string> with_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 == args.size()) throw InvalidInput("--config needs a file");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path) return rest;

    std::ifstream in(*path);
    if (!in) throw InvalidInput("cannot open config '" + *path + "'");
    std::vector<std::string> injected;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidInput(*path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        auto key = line.substr(0, eq);
        auto value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        injected.push_back("--" + key + "=" + value);
    }
    if (rest.empty()) return injected;
    rest.insert(rest.begin() + 1, injected.begin(), injected.end());
    return rest;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hawkes kernel simulation, estimation and decomposition", "hawkes-cli"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate events from a model by thinning");
    std::string sim_model, sim_out;
    double sim_horizon = 0.0;
    std::uint64_t sim_seed = 1;
    sim->add_option("--model", sim_model, "Model JSON {mu, kernel}")->required();
    sim->add_option("--horizon", sim_horizon, "Simulation horizon T")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "Output event CSV")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "Empirical covariance and spectral kernel estimate");
    EventFlags est_in;
    DecomposeFlags est_flags;
    std::string est_out, est_phi;
    add_event_flags(est, est_in);
    est->add_option("--resolution", est_flags.resolution, "Lag points")->check(CLI::Range(2, 1 << 20));
    est->add_option("--horizon-percentile", est_flags.percentile, "Histogram percentile giving tau_max")
        ->check(CLI::Range(0.0, 1.0));
    est->add_option("--out", est_out, "Covariance CSV (lag_time,nu_value)")->required();
    est->add_option("--phi-out", est_phi, "Kernel estimate CSV (t,phi_hat)");

    // decompose
    auto* dec = app.add_subcommand("decompose", "Greedy kernel decomposition of an event sequence");
    EventFlags dec_in;
    DecomposeFlags dec_flags;
    std::string dec_out, dec_report, dec_estimate;
    add_event_flags(dec, dec_in);
    add_decompose_flags(dec, dec_flags);
    dec->add_option("--estimate", dec_estimate, "Use this kernel estimate CSV instead of the spectral stage");
    dec->add_option("--out", dec_out, "Result JSON")->required();
    dec->add_option("--report", dec_report, "Also write a report into this directory");

    // decompose-batch
    auto* batch = app.add_subcommand("decompose-batch", "Decompose every .csv in a directory");
    std::string batch_dir, batch_out;
    double batch_unit = 1.0;
    DecomposeFlags batch_flags;
    unsigned batch_jobs = 0;
    batch->add_option("--dir", batch_dir, "Directory of event CSVs")->required()->check(CLI::ExistingDirectory);
    batch->add_option("--unit", batch_unit, "Multiply timestamps by this factor")->check(CLI::PositiveNumber);
    add_decompose_flags(batch, batch_flags);
    batch->add_option("--jobs", batch_jobs, "Files processed concurrently (0: all cores)");
    batch->add_option("--out", batch_out, "Summary CSV")->required();

    // score
    auto* score = app.add_subcommand("score", "Log-likelihood of a model on an event sequence");
    EventFlags score_in;
    std::string score_model;
    add_event_flags(score, score_in);
    score->add_option("--model", score_model, "Model JSON")->required();

    // report
    auto* rep = app.add_subcommand("report", "Decompose and write curves, Q-Q data and an SVG summary");
    EventFlags rep_in;
    DecomposeFlags rep_flags;
    std::string rep_dir, rep_estimate;
    std::size_t rep_quantiles = 100;
    add_event_flags(rep, rep_in);
    add_decompose_flags(rep, rep_flags);
    rep->add_option("--estimate", rep_estimate, "Use this kernel estimate CSV instead of the spectral stage");
    rep->add_option("--quantiles", rep_quantiles, "Q-Q points")->check(CLI::PositiveNumber);
    rep->add_option("--out-dir", rep_dir, "Report directory")->required();

    // extract
    auto* ext = app.add_subcommand("extract", "Threshold-based event extraction from a tick series");
    std::string ext_in, ext_out;
    double ext_threshold = 0.0, ext_absolute = 0.0;
    std::size_t ext_min = 50;
    ext->add_option("--in", ext_in, "Tick CSV (timestamp,value)")->required();
    auto* rel = ext->add_option("--threshold", ext_threshold, "Relative move threshold, e.g. 0.003")
                    ->check(CLI::PositiveNumber);
    auto* abs = ext->add_option("--absolute", ext_absolute, "Absolute floor: emit rows with value >= X");
    rel->excludes(abs);
    ext->add_option("--min-events", ext_min, "Minimum events for a valid sequence");
    ext->add_option("--out", ext_out, "Output event CSV")->required();


    std::string config_path;
    for (auto* sub : app.get_subcommands({})) {
        sub->add_option("--config", config_path, "key=value file mirroring this command's flags; flags override it");
        for (auto* opt : sub->get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }

    std::vector<std::string> tokens;
    try {
        tokens = with_config(args);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    }
    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    }

    try {
        if (sim->parsed()) {
            const auto model = io::read_model(sim_model);
            const auto events = simulate(model, sim_horizon, sim_seed);
            io::write_events(sim_out, events);
            out << "simulated " << events.size() << " events\n";
        } else if (est->parsed()) {
            const auto events = io::read_events(est_in.path, est_in.options());
            const double tau = std::min(horizon_from_histogram(events, est_flags.percentile), events.horizon());
            const auto grid = covariance_grid(events, tau / static_cast<double>(est_flags.resolution), tau);
            io::write_covariance(est_out, grid);
            if (!est_phi.empty()) io::write_estimate(est_phi, invert_to_kernel(grid));
            out << "tau_max=" << io::format_number(tau) << " delta=" << io::format_number(grid.delta)
                << " lambda_hat=" << io::format_number(grid.lambda_hat) << "\n";
        } else if (dec->parsed() || rep->parsed()) {
            const bool is_report = rep->parsed();
            const auto& in = is_report ? rep_in : dec_in;
            const auto config = (is_report ? rep_flags : dec_flags).config();
            const auto events = io::read_events(in.path, in.options());
            auto result = run_decompose(events, config, is_report ? rep_estimate : dec_estimate);
            if (!is_report) io::write_json(dec_out, io::to_json(result));
            const std::string dir = is_report ? rep_dir : dec_report;
            if (!dir.empty()) {
                emit_report(make_report(result, evaluation_events(events, config), is_report ? rep_quantiles : 100), dir);
            }
            out << "chosen " << chosen_name(result.chosen) << ": " << describe(result.chosen_model().kernel)
                << " (llh " << llh_text(result.llh_chosen) << ")\n";
        } else if (batch->parsed()) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(batch_dir)) {
                if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            auto config = batch_flags.config();
            const unsigned jobs = batch_jobs ? batch_jobs : std::max(1u, std::thread::hardware_concurrency());
            // Files run in parallel; each pipeline stays single-threaded.
            if (jobs > 1) config.threads = 1;

            std::vector<std::string> rows(files.size());
            std::vector<int> codes(files.size(), kOk);
            std::mutex err_mutex;
            std::atomic<std::size_t> next{0};
            auto work = [&] {
                for (std::size_t i = next++; i < files.size(); i = next++) {
                    const std::string name = files[i].filename().string();
                    try {
                        io::EventReadOptions o;
                        o.unit = batch_unit;
                        const auto events = io::read_events(files[i], o);
                        const auto r = decompose(events, config);
                        const double llh_decomposition = r.decomposition_level == Chosen::K1 ? r.llh_k1
                                                         : r.decomposition_level == Chosen::K2 ? r.llh_k2
                                                                                               : r.llh_gd;
                        rows[i] = name + ',' + std::to_string(events.size()) + ',' +
                                  std::string(chosen_name(r.chosen)) + ',' + r.k1.label() + ',' + r.k2.label() + ',' +
                                  llh_text(r.llh_k1) + ',' + llh_text(r.llh_k2) + ',' + llh_text(r.llh_gd) + ',' +
                                  llh_text(r.llh_chosen) + ',' + llh_text(std::max(llh_decomposition, r.llh_gd)) +
                                  ",ok";
                    } catch (...) {
                        std::lock_guard lock(err_mutex);
                        codes[i] = code_for(std::current_exception(), err, name);
                        rows[i] = name + ",,,,,,,,,," + (codes[i] == kNoStationaryModel ? "no_stationary_model" : "invalid");
                    }
                }
            };
            {
                std::vector<std::jthread> pool;
                for (unsigned w = 1; w < std::min<std::size_t>(jobs, files.size()); ++w) pool.emplace_back(work);
                work();
            }
            std::ofstream csv(batch_out, std::ios::binary);
            if (!csv) throw Error("cannot open '" + batch_out + "' for writing");
            csv << "file,n,chosen,k1,k2,llh_k1,llh_k2,llh_gd,llh_chosen,ensemble,status\n";
            for (const auto& row : rows) csv << row << "\n";
            if (!csv.flush()) throw Error("write failed for '" + batch_out + "'");
            out << "decomposed " << files.size() << " files\n";
            return codes.empty() ? kOk : *std::max_element(codes.begin(), codes.end());
        } else if (score->parsed()) {
            const auto model = io::read_model(score_model);
            const auto events = io::read_events(score_in.path, score_in.options());
            const auto l = log_likelihood(model, events);
            io::Json j = {{"llh", std::isfinite(l.value) ? io::Json(l.value) : io::Json(nullptr)}, {"n", l.n_events}};
            if (!l.diagnostic.empty()) j["diagnostic"] = l.diagnostic;
            out << j.dump() << "\n";
        } else if (ext->parsed()) {
            const auto ticks = io::read_ticks(ext_in);
            io::ExtractOptions o;
            o.absolute = abs->count() > 0;
            o.min_events = ext_min;
            if (!o.absolute && rel->count() == 0) throw InvalidInput("one of --threshold or --absolute is required");
            const auto events = extract_events_by_threshold(ticks, o.absolute ? ext_absolute : ext_threshold, o);
            io::write_events(ext_out, events);
            out << "extracted " << events.size() << " events\n";
        }
    } catch (...) {
        return code_for(std::current_exception(), err);
    }
    return kOk;
}

}  // namespace hawkes::cli
