#include "hawkes/search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <cmath>
#include <future>
#include <thread>

#include "hawkes/error.hpp"

namespace hawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

unsigned worker_count(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs tasks on up to `threads` workers; results land in task order.
template <class T>
std::vector<T> run_all(std::vector<std::function<T()>> tasks, unsigned threads) {
    std::vector<std::optional<T>> slots(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                slots[i] = tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto n = std::min<std::size_t>(threads, tasks.size());
        for (std::size_t w = 1; w < n; ++w) pool.emplace_back(work);
        work();
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

const FitResult& min_residue(const std::vector<FitResult>& fits, std::size_t first, std::size_t last) {
    std::size_t best = first;
    for (std::size_t i = first + 1; i < last; ++i) {
        if (fits[i].residue < fits[best].residue) best = i;
    }
    return fits[best];
}

}  // namespace

// ---------------------------------------------------------------------------

double exp_log_likelihood(double mu, double alpha, double beta, const EventSequence& events,
                          std::array<double, 3>* gradient) {
    if (!(mu > 0.0 && alpha > 0.0 && beta > 0.0) || !(alpha / beta < 1.0) || !std::isfinite(mu + alpha + beta)) {
        return kNegInf;
    }
    const auto t = events.times();
    const double horizon = events.horizon();

    double log_sum = 0.0;
    double g_mu = 0.0, g_alpha = 0.0, g_beta = 0.0;
    double a = 0.0;  // sum_{j<i} exp(-beta (t_i - t_j))
    double c = 0.0;  // sum_{j<i} (t_i - t_j) exp(-beta (t_i - t_j))
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0) {
            const double gap = t[i] - t[i - 1];
            const double decay = std::exp(-beta * gap);
            c = decay * (c + gap * (a + 1.0));
            a = decay * (a + 1.0);
        }
        const double rate = mu + alpha * a;
        log_sum += std::log(rate);
        g_mu += 1.0 / rate;
        g_alpha += a / rate;
        g_beta -= alpha * c / rate;
    }

    double mass = 0.0;
    double mass_dbeta = 0.0;
    for (double ti : t) {
        const double s = horizon - ti;
        const double one_minus = -std::expm1(-beta * s);
        mass += one_minus;
        mass_dbeta += s * std::exp(-beta * s) / beta - one_minus / (beta * beta);
    }
    const double value = log_sum - mu * horizon - alpha / beta * mass;
    if (gradient) {
        (*gradient)[0] = g_mu - horizon;
        (*gradient)[1] = g_alpha - mass / beta;
        (*gradient)[2] = g_beta - alpha * mass_dbeta;
    }
    return std::isfinite(value) ? value : kNegInf;
}

GdResult fit_gd_exponential(const EventSequence& events, const GdOptions& options) {
    if (events.size() < 2) throw InvalidInput("exponential baseline needs at least two events");
    const double rate = estimate_lambda(events);

    // (mu / rate, alpha / beta, beta / rate)
    constexpr std::array<std::array<double, 3>, 5> inits{{
        {0.5, 0.5, 1.0},
        {0.8, 0.2, 0.1},
        {0.3, 0.7, 10.0},
        {0.5, 0.5, 0.01},
        {0.9, 0.1, 100.0},
    }};

    GdResult best;
    const int starts = std::clamp(options.restarts, 0, static_cast<int>(inits.size()));
    for (int s = 0; s < starts; ++s) {
        const auto& init = inits[static_cast<std::size_t>(s)];
        // Log-parameters keep every iterate positive.
        std::array<double, 3> theta{std::log(init[0] * rate), std::log(init[1] * init[2] * rate),
                                    std::log(init[2] * rate)};
        auto eval = [&](const std::array<double, 3>& th, std::array<double, 3>* g) {
            std::array<double, 3> raw{};
            const double mu = std::exp(th[0]), alpha = std::exp(th[1]), beta = std::exp(th[2]);
            const double v = exp_log_likelihood(mu, alpha, beta, events, g ? &raw : nullptr);
            if (g) *g = {raw[0] * mu, raw[1] * alpha, raw[2] * beta};
            return v;
        };

        // Quasi-Newton ascent: d = H g with a BFGS inverse-curvature estimate H.
        using Mat = std::array<std::array<double, 3>, 3>;
        const double scale = 1.0 / static_cast<double>(events.size());
        Mat inv{{{scale, 0.0, 0.0}, {0.0, scale, 0.0}, {0.0, 0.0, scale}}};
        std::array<double, 3> grad{};
        double value = eval(theta, &grad);
        int it = 0;
        for (; it < options.max_iterations && std::isfinite(value); ++it) {
            std::array<double, 3> dir{};
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) dir[r] += inv[r][c] * grad[c];
            }
            double slope = dir[0] * grad[0] + dir[1] * grad[1] + dir[2] * grad[2];
            if (!(slope > 0.0)) {
                inv = Mat{{{scale, 0.0, 0.0}, {0.0, scale, 0.0}, {0.0, 0.0, scale}}};
                for (int r = 0; r < 3; ++r) dir[r] = scale * grad[r];
                slope = scale * (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]);
                if (!(slope > 0.0)) break;
            }

            double step = 1.0;
            std::array<double, 3> trial{};
            double v = -std::numeric_limits<double>::infinity();
            for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
                for (int r = 0; r < 3; ++r) trial[r] = theta[r] + step * dir[r];
                v = eval(trial, nullptr);
                if (v >= value + 1e-4 * step * slope) break;
            }
            if (!(v >= value + 1e-4 * step * slope)) break;

            std::array<double, 3> next_grad{};
            v = eval(trial, &next_grad);
            std::array<double, 3> s{}, y{};
            for (int r = 0; r < 3; ++r) {
                s[r] = trial[r] - theta[r];
                y[r] = grad[r] - next_grad[r];
            }
            const double gain = v - value;
            theta = trial;
            value = v;
            grad = next_grad;

            const double sy = s[0] * y[0] + s[1] * y[1] + s[2] * y[2];
            if (sy > 1e-12 * std::sqrt((s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]))) {
                if (it == 0) {
                    const double yy = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
                    inv = Mat{{{sy / yy, 0.0, 0.0}, {0.0, sy / yy, 0.0}, {0.0, 0.0, sy / yy}}};
                }
                std::array<double, 3> hy{};
                for (int r = 0; r < 3; ++r) {
                    for (int c = 0; c < 3; ++c) hy[r] += inv[r][c] * y[c];
                }
                const double yhy = y[0] * hy[0] + y[1] * hy[1] + y[2] * hy[2];
                for (int r = 0; r < 3; ++r) {
                    for (int c = 0; c < 3; ++c) {
                        inv[r][c] += (sy + yhy) * s[r] * s[c] / (sy * sy) - (hy[r] * s[c] + s[r] * hy[c]) / sy;
                    }
                }
            }
            if (gain <= options.tolerance * std::abs(value)) {
                ++it;
                break;
            }
        }

        if (value > best.llh || (s == 0 && !std::isfinite(best.llh))) {
            best.model = {std::exp(theta[0]), Single{ExpKernel{std::exp(theta[1]), std::exp(theta[2])}}};
            best.llh = value;
            best.iterations = it;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

std::pair<EventSequence, EventSequence> train_test_split(const EventSequence& events, double fraction,
                                                         bool keep_absolute) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidInput("split fraction must lie in (0, 1)");
    const std::size_t n = events.size();
    const auto n_train = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (n < 2 || n_train == 0 || n_train >= n) {
        throw InvalidInput("too few events (" + std::to_string(n) + ") for a train/test split");
    }
    const auto t = events.times();
    const double split = t[n_train - 1];

    EventSequence train(std::vector<double>(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n_train)), split);
    std::vector<double> rest(t.begin() + static_cast<std::ptrdiff_t>(n_train), t.end());
    if (keep_absolute) return {std::move(train), EventSequence(std::move(rest), events.horizon())};
    for (double& x : rest) x -= split;
    return {std::move(train), EventSequence(std::move(rest), events.horizon() - split)};
}

std::string_view chosen_name(Chosen c) {
    switch (c) {
        case Chosen::K1: return "K1";
        case Chosen::K2: return "K2";
        case Chosen::GD: return "GD";
    }
    return "?";
}

Chosen select_model(const SelectionInput& in) {
    if (!(in.eta > 0.0)) throw InvalidInput("eta must be positive");
    std::optional<Chosen> output;
    if (in.k1_stationary) output = Chosen::K1;
    if (in.k2_stationary) {
        if (!output || in.mr1 >= in.eta * in.mr2) output = Chosen::K2;
    }
    const bool gd_usable = in.llh_gd > kNegInf;
    if (!output) {
        if (!gd_usable) throw NoStationaryModel("no stationary model found: K1, K2 and the baseline all failed");
        return Chosen::GD;
    }
    const double llh = *output == Chosen::K1 ? in.llh_k1 : in.llh_k2;
    if (gd_usable && llh < in.llh_gd) return Chosen::GD;
    return *output;
}

HawkesModel DecompositionResult::chosen_model() const {
    switch (chosen) {
        case Chosen::K1: return {mu_k1, k1.kernel};
        case Chosen::K2: return {mu_k2, k2.kernel};
        case Chosen::GD: return gd.model;
    }
    return gd.model;
}

std::vector<std::pair<Expansion, Family>> expansion_candidates() {
    std::vector<std::pair<Expansion, Family>> out;
    for (Family f : kAllFamilies) {
        out.emplace_back(Expansion::Add, f);
        out.emplace_back(Expansion::Multiply, f);
    }
    return out;
}

DecompositionResult decompose_estimate(const KernelEstimate& estimate, const EventSequence& train,
                                       const EventSequence& evaluation, const DecompositionConfig& config) {
    const unsigned threads = worker_count(config.threads);
    DecompositionResult result;
    result.eta = config.eta;
    result.estimate = estimate;
    result.lambda_hat = estimate_lambda(train);
    result.n_train = train.size();
    result.n_eval = evaluation.size();

    std::vector<std::function<FitResult()>> singles;
    for (Family f : kAllFamilies) {
        singles.emplace_back([&, f] { return fit_single(estimate, f, config.fit); });
    }
    result.audit = run_all(std::move(singles), threads);
    result.k1 = min_residue(result.audit, 0, 4);

    std::vector<std::function<FitResult()>> expansions;
    for (auto [op, f] : expansion_candidates()) {
        expansions.emplace_back([&, op, f] { return fit_expansion(estimate, result.k1, op, f, config.fit); });
    }
    auto level_two = run_all(std::move(expansions), threads);
    result.audit.insert(result.audit.end(), level_two.begin(), level_two.end());
    result.k2 = min_residue(result.audit, 4, 12);

    auto score = [&](const FitResult& fit, double& mu) {
        if (!fit.verdict.stationary) return kNegInf;
        mu = result.lambda_hat * (1.0 - kernel_mass(fit.kernel));
        if (!(mu > 0.0)) return kNegInf;
        return log_likelihood({mu, fit.kernel}, evaluation).value;
    };
    std::vector<std::function<double()>> scoring{
        [&] { return score(result.k1, result.mu_k1); },
        [&] { return score(result.k2, result.mu_k2); },
        [&] {
            if (config.gd_restarts <= 0) return kNegInf;
            result.gd = fit_gd_exponential(train, {.restarts = config.gd_restarts});
            if (!(result.gd.llh > kNegInf)) return kNegInf;
            return log_likelihood(result.gd.model, evaluation).value;
        },
    };
    const auto llh = run_all(std::move(scoring), threads);
    result.llh_k1 = llh[0];
    result.llh_k2 = llh[1];
    result.llh_gd = llh[2];

    SelectionInput in{result.k1.verdict.stationary,
                      result.k2.verdict.stationary,
                      result.k1.residue,
                      result.k2.residue,
                      config.eta,
                      result.llh_k1,
                      result.llh_k2,
                      kNegInf};
    // Level choice without the baseline, kept for reporting.
    try {
        result.decomposition_level = select_model(in);
    } catch (const NoStationaryModel&) {
        result.decomposition_level = Chosen::GD;
    }
    in.llh_gd = result.llh_gd;
    result.chosen = select_model(in);
    switch (result.chosen) {
        case Chosen::K1: result.llh_chosen = result.llh_k1; break;
        case Chosen::K2: result.llh_chosen = result.llh_k2; break;
        case Chosen::GD: result.llh_chosen = result.llh_gd; break;
    }
    return result;
}

DecompositionResult decompose(const EventSequence& events, const DecompositionConfig& config) {
    if (events.size() < 2) throw InvalidInput("decomposition needs at least two events");
    if (config.resolution < 2) throw InvalidInput("grid resolution must be at least 2");

    EventSequence train = events;
    EventSequence evaluation = events;
    if (config.holdout) {
        std::tie(train, evaluation) = train_test_split(events, *config.holdout, config.keep_absolute_test_times);
    }

    const double horizon = std::min(horizon_from_histogram(train, config.horizon_percentile), train.horizon());
    const double delta = horizon / static_cast<double>(config.resolution);
    const auto grid = covariance_grid(train, delta, horizon, worker_count(config.threads));
    const auto estimate = invert_to_kernel(grid, config.spectral);

    auto result = decompose_estimate(estimate, train, evaluation, config);
    result.held_out = config.holdout.has_value();
    return result;
}

}  // namespace hawkes
