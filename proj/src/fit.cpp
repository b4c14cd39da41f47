#include "hawkes/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hawkes {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Fitting happens on the estimate rescaled to tau_max = 1, where phi'(u) = tau * phi(tau * u).
// The L1 residue is invariant under this change of units.
struct Target {
    std::vector<double> values;
    double delta;
};

Target normalised(const KernelEstimate& estimate, double tau) {
    Target t{estimate.values, estimate.delta / tau};
    for (double& v : t.values) v *= tau;
    return t;
}

double scale_of(const KernelEstimate& estimate) {
    if (estimate.tau_max > 0.0) return estimate.tau_max;
    return estimate.delta * static_cast<double>(estimate.values.size());
}

double l1(const Target& target, const auto& phi) {
    double total = 0.0;
    for (std::size_t k = 0; k < target.values.size(); ++k) {
        total += std::abs(target.values[k] - phi(static_cast<double>(k) * target.delta));
    }
    return total * target.delta;
}

// Unconstrained coordinates: log of positive parameters, raw PWL exponent (clamped).
class Codec {
public:
    explicit Codec(const FitOptions& o)
        : lo_(std::log(o.lower_bound)), hi_(std::log(o.upper_bound)), max_p_(o.max_exponent) {}

    double positive(double x) const { return std::exp(std::clamp(x, lo_, hi_)); }
    double exponent(double x) const { return std::clamp(x, 1.0 + 1e-9, max_p_); }
    double encode_positive(double v) const { return std::clamp(std::log(v), lo_, hi_); }
    double encode_exponent(double v) const { return std::clamp(v, 1.0 + 1e-9, max_p_); }
    double clamp_positive(double v) const { return positive(encode_positive(v)); }

    BaseKernel decode(Family family, std::span<const double> x) const {
        switch (family) {
            case Family::Exp: return ExpKernel{positive(x[0]), positive(x[1])};
            case Family::Pwl: return PwlKernel{positive(x[0]), positive(x[1]), exponent(x[2])};
            case Family::Sqr: return SqrKernel{positive(x[0]), positive(x[1])};
            case Family::Sns: return SnsKernel{positive(x[0]), positive(x[1])};
        }
        return ExpKernel{};
    }

    std::vector<double> encode(const BaseKernel& kernel) const {
        auto p = parameters(kernel);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const bool is_exponent = family_of(kernel) == Family::Pwl && i == 2;
            p[i] = is_exponent ? encode_exponent(p[i]) : encode_positive(p[i]);
        }
        return p;
    }

    std::vector<double> steps(Family family) const {
        std::vector<double> s(parameter_count(family), 0.5);
        if (family == Family::Pwl) s[2] = 0.5;
        return s;
    }

private:
    double lo_;
    double hi_;
    double max_p_;
};

// Product layouts. SQR x SNS and SNS x SNS share the support endpoint, so the pair is
// parameterised by one angular velocity.
enum class Layout { Free, SqrSns, SnsSns };

Layout layout_of(Family a, Family b) {
    if ((a == Family::Sqr && b == Family::Sns) || (a == Family::Sns && b == Family::Sqr)) return Layout::SqrSns;
    if (a == Family::Sns && b == Family::Sns) return Layout::SnsSns;
    return Layout::Free;
}

struct ProductCodec {
    const Codec& codec;
    Family left;
    Family right;
    Layout layout;

    Product decode(std::span<const double> x) const {
        switch (layout) {
            case Layout::SqrSns: {
                // x = [left amplitude, right amplitude, omega]
                const double w = codec.positive(x[2]);
                auto make = [&](Family f, double amp) -> BaseKernel {
                    if (f == Family::Sqr) return SqrKernel{amp, kPi / w};
                    return SnsKernel{amp, w};
                };
                return {make(left, codec.positive(x[0])), make(right, codec.positive(x[1]))};
            }
            case Layout::SnsSns: {
                const double w = codec.positive(x[2]);
                return {SnsKernel{codec.positive(x[0]), w}, SnsKernel{codec.positive(x[1]), w}};
            }
            case Layout::Free: break;
        }
        const auto n = parameter_count(left);
        return {codec.decode(left, x.subspan(0, n)), codec.decode(right, x.subspan(n))};
    }

    std::vector<double> encode(const BaseKernel& l, const BaseKernel& r) const {
        if (layout == Layout::Free) {
            auto x = codec.encode(l);
            auto y = codec.encode(r);
            x.insert(x.end(), y.begin(), y.end());
            return x;
        }
        // Angular velocity comes from the left factor: the already fitted level-one kernel.
        double w = 0.0;
        if (const auto* s = std::get_if<SnsKernel>(&l)) {
            w = s->omega;
        } else {
            w = kPi / std::get<SqrKernel>(l).l;
        }
        return {codec.encode_positive(parameters(l)[0]), codec.encode_positive(parameters(r)[0]),
                codec.encode_positive(w)};
    }

    std::vector<double> steps() const {
        if (layout != Layout::Free) return std::vector<double>(3, 0.5);
        auto s = codec.steps(left);
        auto t = codec.steps(right);
        s.insert(s.end(), t.begin(), t.end());
        return s;
    }
};

struct ShapeStats {
    double peak;
    double t_peak;
    double t_decay;  // first time after the peak below peak / e
    double t_zero;   // first time after the peak at or below 5% of the peak
};

ShapeStats shape_of(std::span<const double> values, double delta) {
    ShapeStats s{0.0, 0.0, 0.5, 1.0};
    if (values.empty()) return s;
    const auto peak_it = std::max_element(values.begin(), values.end());
    const auto ip = static_cast<std::size_t>(peak_it - values.begin());
    s.peak = *peak_it;
    s.t_peak = static_cast<double>(ip) * delta;
    bool decay_found = false;
    for (std::size_t k = ip + 1; k < values.size(); ++k) {
        const double t = static_cast<double>(k) * delta;
        if (!decay_found && values[k] < s.peak / std::numbers::e) {
            s.t_decay = t;
            decay_found = true;
        }
        if (values[k] <= 0.05 * s.peak) {
            s.t_zero = t;
            break;
        }
    }
    s.t_decay = std::max(s.t_decay, delta);
    s.t_zero = std::max({s.t_zero, s.t_decay, 2.0 * delta});
    return s;
}

double mean_up_to(std::span<const double> values, double delta, double end) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < values.size() && static_cast<double>(k) * delta <= end; ++k) {
        total += values[k];
        ++count;
    }
    return count ? total / static_cast<double>(count) : 0.0;
}

// Eight deterministic starts per family derived from the target's shape (tau_max = 1).
std::vector<BaseKernel> shape_starts(Family family, std::span<const double> values, double delta, const Codec& codec) {
    const auto s = shape_of(values, delta);
    const double v = s.peak > 0.0 ? s.peak : 1.0;
    std::vector<BaseKernel> out;
    auto pos = [&](double x) { return codec.clamp_positive(x); };
    switch (family) {
        case Family::Exp:
            for (double amp : {1.0, 1.5}) {
                for (double rate : {1.0, 0.5, 2.0, 4.0}) out.push_back(ExpKernel{pos(amp * v), pos(rate / s.t_decay)});
            }
            break;
        case Family::Pwl:
            for (double p : {2.0, 1.5, 3.0, 5.0}) {
                for (double shrink : {1.0, 0.3}) {
                    const double c = pos(shrink * s.t_decay / std::expm1(1.0 / p));
                    out.push_back(PwlKernel{pos(v * std::pow(c, p)), c, p});
                }
            }
            break;
        case Family::Sqr:
            for (double len : {s.t_zero, s.t_decay, 2.0 * s.t_decay, 0.125, 0.25, 0.5, 1.0, 0.5 * s.t_decay}) {
                const double b = std::max(mean_up_to(values, delta, len), 0.05 * v);
                out.push_back(SqrKernel{pos(b), pos(len)});
            }
            break;
        case Family::Sns: {
            const double from_peak = s.t_peak > 0.0 ? 2.0 * s.t_peak + delta : 2.0 * s.t_decay;
            for (double support : {from_peak, s.t_zero, 2.0 * s.t_decay, 0.25, 0.5, 1.0, 2.0, 1.5 * s.t_zero}) {
                out.push_back(SnsKernel{pos(v), pos(kPi / support)});
            }
            break;
        }
    }
    return out;
}

// Addend contributing (almost) nothing on the grid.
BaseKernel zero_addend(Family family, double delta, const FitOptions& o) {
    switch (family) {
        case Family::Exp: return ExpKernel{o.lower_bound, o.upper_bound};
        case Family::Pwl: return PwlKernel{o.lower_bound, o.upper_bound, o.max_exponent};
        case Family::Sqr: return SqrKernel{o.lower_bound, 0.5 * delta};
        case Family::Sns: return SnsKernel{o.lower_bound, o.upper_bound};
    }
    return ExpKernel{};
}

// Factor equal (or close) to one over [0, 1]; SNS has none and gets a slow half-period.
BaseKernel neutral_factor(Family family) {
    switch (family) {
        case Family::Exp: return ExpKernel{1.0, 1e-8};
        case Family::Pwl: return PwlKernel{std::pow(1e7, 1.000001), 1e7, 1.000001};
        case Family::Sqr: return SqrKernel{1.0, 1.01};
        case Family::Sns: return SnsKernel{1.0, kPi / 2.02};
    }
    return ExpKernel{};
}

BaseKernel with_unit_amplitude(BaseKernel kernel) {
    std::visit(overloaded{
                   [](ExpKernel& e) { e.alpha = 1.0; },
                   [](PwlKernel& p) { p.k = std::pow(p.c, p.p); },
                   [](SqrKernel& s) { s.b = 1.0; },
                   [](SnsKernel& s) { s.a = 1.0; },
               },
               kernel);
    return kernel;
}

struct SearchOutcome {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
};

SearchOutcome multi_start(const std::function<double(std::span<const double>)>& objective,
                          const std::vector<std::vector<double>>& starts, std::span<const double> steps,
                          const FitOptions& options) {
    SearchOutcome best;
    for (const auto& start : starts) {
        auto r = nelder_mead(objective, start, steps, options.optimizer);
        if (r.value < best.value) best = {r.x, r.value};
    }
    return best;
}

void require_usable(const KernelEstimate& estimate) {
    if (estimate.values.empty() || !(estimate.delta > 0.0)) throw InvalidInput("kernel estimate is empty");
    const bool any_positive =
        std::any_of(estimate.values.begin(), estimate.values.end(), [](double v) { return v > 0.0; });
    if (!any_positive) throw InvalidInput("kernel estimate is degenerate (no positive samples)");
}

FitResult finish(const KernelEstimate& estimate, CompositeKernel kernel, Family family,
                 std::optional<Expansion> expansion, const FitOptions& options) {
    FitResult r;
    r.kernel = std::move(kernel);
    r.residue = residue(estimate, r.kernel);
    r.verdict = stationarity_norm(r.kernel, options.stationarity);
    r.family = family;
    r.expansion = expansion;
    return r;
}

}  // namespace

std::string_view expansion_name(Expansion op) { return op == Expansion::Add ? "add" : "multiply"; }

std::string FitResult::label() const {
    std::string prefix;
    if (expansion) prefix = *expansion == Expansion::Add ? "+" : "x";
    return prefix + std::string(family_name(family));
}

BaseKernel rescale(const BaseKernel& kernel, double time_scale, double amplitude) {
    return std::visit(overloaded{
                          [&](const ExpKernel& e) -> BaseKernel {
                              return ExpKernel{e.alpha * amplitude, e.beta * time_scale};
                          },
                          [&](const PwlKernel& p) -> BaseKernel {
                              return PwlKernel{p.k * amplitude * std::pow(time_scale, -p.p), p.c / time_scale, p.p};
                          },
                          [&](const SqrKernel& s) -> BaseKernel { return SqrKernel{s.b * amplitude, s.l / time_scale}; },
                          [&](const SnsKernel& s) -> BaseKernel {
                              return SnsKernel{s.a * amplitude, s.omega * time_scale};
                          },
                      },
                      kernel);
}

CompositeKernel rescale(const CompositeKernel& kernel, double time_scale, double amplitude) {
    return std::visit(overloaded{
                          [&](const Single& s) -> CompositeKernel {
                              return Single{rescale(s.kernel, time_scale, amplitude)};
                          },
                          [&](const Sum& s) -> CompositeKernel {
                              return Sum{rescale(s.left, time_scale, amplitude), rescale(s.right, time_scale, amplitude)};
                          },
                          [&](const Product& p) -> CompositeKernel {
                              return Product{rescale(p.left, time_scale, amplitude), rescale(p.right, time_scale, 1.0)};
                          },
                      },
                      kernel);
}

double residue(const KernelEstimate& estimate, const CompositeKernel& kernel) {
    double total = 0.0;
    for (std::size_t k = 0; k < estimate.values.size(); ++k) {
        total += std::abs(estimate.values[k] - evaluate(kernel, estimate.time(k)));
    }
    return total * estimate.delta;
}

FitResult fit_single(const KernelEstimate& estimate, Family family, const FitOptions& options) {
    require_usable(estimate);
    const double tau = scale_of(estimate);
    const Target target = normalised(estimate, tau);
    const Codec codec(options);

    auto objective = [&](std::span<const double> x) {
        const BaseKernel k = codec.decode(family, x);
        return l1(target, [&](double t) { return evaluate(k, t); });
    };
    std::vector<std::vector<double>> starts;
    for (const auto& k : shape_starts(family, target.values, target.delta, codec)) starts.push_back(codec.encode(k));

    const auto steps = codec.steps(family);
    const auto best = multi_start(objective, starts, steps, options);
    if (!std::isfinite(best.value)) {
        throw FitFailure("every start failed for " + std::string(family_name(family)), std::nullopt);
    }
    const CompositeKernel fitted = Single{codec.decode(family, best.x)};
    return finish(estimate, rescale(fitted, 1.0 / tau, 1.0 / tau), family, std::nullopt, options);
}

FitResult fit_expansion(const KernelEstimate& estimate, const FitResult& fixed, Expansion op, Family family,
                        const FitOptions& options) {
    require_usable(estimate);
    const auto* single = std::get_if<Single>(&fixed.kernel);
    if (!single || fixed.expansion) throw InvalidInput("expansion requires a single-kernel level-one fit");

    const double tau = scale_of(estimate);
    const Target target = normalised(estimate, tau);
    const Codec codec(options);
    const BaseKernel first = rescale(single->kernel, tau, tau);

    if (op == Expansion::Add) {
        Target rest = target;
        for (std::size_t k = 0; k < rest.values.size(); ++k) {
            rest.values[k] -= evaluate(first, static_cast<double>(k) * rest.delta);
        }
        std::vector<double> positive_part(rest.values.size());
        std::transform(rest.values.begin(), rest.values.end(), positive_part.begin(),
                       [](double v) { return std::max(v, 0.0); });

        std::vector<std::vector<double>> starts{codec.encode(zero_addend(family, target.delta, options))};
        auto shapes = shape_starts(family, positive_part, rest.delta, codec);
        for (std::size_t i = 0; i + 1 < shapes.size(); ++i) starts.push_back(codec.encode(shapes[i]));

        auto objective = [&](std::span<const double> x) {
            const BaseKernel k = codec.decode(family, x);
            return l1(rest, [&](double t) { return evaluate(k, t); });
        };
        const auto best = multi_start(objective, starts, codec.steps(family), options);
        if (!std::isfinite(best.value)) {
            throw FitFailure("every start failed for +" + std::string(family_name(family)), fixed);
        }
        const CompositeKernel fitted = Sum{first, codec.decode(family, best.x)};
        return finish(estimate, rescale(fitted, 1.0 / tau, 1.0 / tau), family, op, options);
    }

    const Family left = family_of(first);
    const ProductCodec pc{codec, left, family, layout_of(left, family)};
    std::vector<std::vector<double>> starts{pc.encode(first, neutral_factor(family))};
    auto shapes = shape_starts(family, target.values, target.delta, codec);
    for (std::size_t i = 0; i + 1 < shapes.size(); ++i) {
        starts.push_back(pc.encode(first, with_unit_amplitude(shapes[i])));
    }

    auto objective = [&](std::span<const double> x) {
        const Product p = pc.decode(x);
        return l1(target, [&](double t) { return evaluate(p.left, t) * evaluate(p.right, t); });
    };
    const auto best = multi_start(objective, starts, pc.steps(), options);
    if (!std::isfinite(best.value)) {
        throw FitFailure("every start failed for x" + std::string(family_name(family)), fixed);
    }
    const CompositeKernel fitted = pc.decode(best.x);
    return finish(estimate, rescale(fitted, 1.0 / tau, 1.0 / tau), family, op, options);
}

}  // namespace hawkes
