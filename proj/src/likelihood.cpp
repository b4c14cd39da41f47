#include "hawkes/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hawkes/error.hpp"
#include "hawkes/quadrature.hpp"

namespace hawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kQuadratureTolerance = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// sin(d u) / d, continuous at d = 0.
double sinc_scaled(double d, double u) {
    const double x = d * u;
    if (std::abs(x) < 1e-4) return u * (1.0 - x * x / 6.0);
    return std::sin(x) / d;
}

double quadrature_between(const BaseKernel& x, const BaseKernel& y, double from, double to) {
    const double end = std::min({to, support_end(x), support_end(y)});
    if (!(end > from)) return 0.0;
    auto f = [&](double t) { return evaluate(x, t) * evaluate(y, t); };
    return quadrature::integrate(f, from, end, {}, kQuadratureTolerance);
}

bool needs_quadrature(const BaseKernel& x, const BaseKernel& y) {
    const Family a = std::min(family_of(x), family_of(y));
    const Family b = std::max(family_of(x), family_of(y));
    return a == Family::Pwl && (b == Family::Pwl || b == Family::Sns);
}

double product_integral(const BaseKernel& first, const BaseKernel& second, double s) {
    const BaseKernel& x = family_of(first) <= family_of(second) ? first : second;
    const BaseKernel& y = family_of(first) <= family_of(second) ? second : first;
    if (needs_quadrature(x, y)) return quadrature_between(x, y, 0.0, s);

    return std::visit(
        overloaded{
            [s](const ExpKernel& a, const ExpKernel& b) {
                const double beta = a.beta + b.beta;
                return a.alpha * b.alpha * -std::expm1(-beta * s) / beta;
            },
            [s](const ExpKernel& e, const PwlKernel& p) {
                const double a = 1.0 - p.p;
                const double head = scaled_upper_gamma(a, e.beta * p.c);
                const double tail =
                    std::isinf(s) ? 0.0 : std::exp(-e.beta * s) * scaled_upper_gamma(a, e.beta * (p.c + s));
                return e.alpha * p.k * std::pow(e.beta, p.p - 1.0) * (head - tail);
            },
            [s](const ExpKernel& e, const SqrKernel& q) {
                const double u = std::min(s, q.l);
                return e.alpha * q.b * -std::expm1(-e.beta * u) / e.beta;
            },
            [s](const ExpKernel& e, const SnsKernel& n) {
                const double u = std::min(s, kPi / n.omega);
                const double w = n.omega;
                const double b = e.beta;
                return e.alpha * n.a * (w - std::exp(-b * u) * (b * std::sin(w * u) + w * std::cos(w * u))) /
                       (b * b + w * w);
            },
            [s](const PwlKernel& p, const SqrKernel& q) {
                const double u = std::min(s, q.l);
                return p.k * q.b * (std::pow(p.c, 1.0 - p.p) - std::pow(p.c + u, 1.0 - p.p)) / (p.p - 1.0);
            },
            [s](const SqrKernel& a, const SqrKernel& b) { return a.b * b.b * std::min({s, a.l, b.l}); },
            [s](const SqrKernel& q, const SnsKernel& n) {
                const double u = std::min({s, q.l, kPi / n.omega});
                return q.b * n.a * (1.0 - std::cos(n.omega * u)) / n.omega;
            },
            [s](const SnsKernel& a, const SnsKernel& b) {
                const double u = std::min({s, kPi / a.omega, kPi / b.omega});
                return 0.5 * a.a * b.a *
                       (sinc_scaled(a.omega - b.omega, u) - std::sin((a.omega + b.omega) * u) / (a.omega + b.omega));
            },
            [](const auto&, const auto&) -> double { throw Error("unordered product pair"); },
        },
        x, y);
}

// integral of phi over [a, b], 0 <= a <= b.
double kernel_integral_between(const CompositeKernel& kernel, double a, double b) {
    if (const auto* p = std::get_if<Product>(&kernel); p && needs_quadrature(p->left, p->right)) {
        return quadrature_between(p->left, p->right, a, b);
    }
    return kernel_integral(kernel, b) - kernel_integral(kernel, a);
}

}  // namespace

double kernel_integral(const BaseKernel& kernel, double s) {
    if (s <= 0.0) return 0.0;
    return std::visit(overloaded{
                          [s](const ExpKernel& e) { return e.alpha * -std::expm1(-e.beta * s) / e.beta; },
                          [s](const PwlKernel& p) {
                              return p.k * (std::pow(p.c, 1.0 - p.p) - std::pow(p.c + s, 1.0 - p.p)) / (p.p - 1.0);
                          },
                          [s](const SqrKernel& q) { return q.b * std::min(s, q.l); },
                          [s](const SnsKernel& n) {
                              const double u = std::min(s, kPi / n.omega);
                              return n.a * (1.0 - std::cos(n.omega * u)) / n.omega;
                          },
                      },
                      kernel);
}

double kernel_integral(const CompositeKernel& kernel, double s) {
    if (s <= 0.0) return 0.0;
    return std::visit(overloaded{
                          [s](const Single& k) { return kernel_integral(k.kernel, s); },
                          [s](const Sum& k) { return kernel_integral(k.left, s) + kernel_integral(k.right, s); },
                          [s](const Product& k) { return product_integral(k.left, k.right, s); },
                      },
                      kernel);
}

double kernel_mass(const CompositeKernel& kernel) { return kernel_integral(kernel, kInf); }

double intensity_at(const HawkesModel& model, const EventSequence& history, double t) {
    double rate = model.mu;
    for (double ti : history.times()) {
        if (ti >= t) break;
        rate += evaluate(model.kernel, t - ti);
    }
    return rate;
}

LogLikelihood log_likelihood(const HawkesModel& model, const EventSequence& events, double cutoff) {
    LogLikelihood out;
    out.n_events = events.size();
    out.horizon = events.horizon();
    if (!(model.mu > 0.0) || !std::isfinite(model.mu)) {
        out.diagnostic = "background rate must be positive";
        return out;
    }

    const auto times = events.times();
    double log_sum = 0.0;
    std::size_t first_active = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        while (first_active < i && sup_from(model.kernel, t - times[first_active]) < cutoff) ++first_active;
        double rate = model.mu;
        for (std::size_t j = first_active; j < i; ++j) rate += evaluate(model.kernel, t - times[j]);
        if (!(rate > 0.0)) {
            out.diagnostic = "non-positive intensity at event " + std::to_string(i);
            return out;
        }
        log_sum += std::log(rate);
    }

    double compensator = model.mu * events.horizon();
    for (double t : times) compensator += kernel_integral(model.kernel, events.horizon() - t);

    out.value = log_sum - compensator;
    if (!std::isfinite(out.value)) {
        out.value = -kInf;
        out.diagnostic = "non-finite log-likelihood";
    }
    return out;
}

std::vector<double> compensator_increments(const HawkesModel& model, const EventSequence& events, double cutoff) {
    const auto times = events.times();
    std::vector<double> out;
    out.reserve(times.size());
    std::size_t first_active = 0;
    double previous = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        while (first_active < i && sup_from(model.kernel, previous - times[first_active]) < cutoff) ++first_active;
        double increment = model.mu * (t - previous);
        for (std::size_t j = first_active; j < i; ++j) {
            increment += kernel_integral_between(model.kernel, previous - times[j], t - times[j]);
        }
        out.push_back(increment);
        previous = t;
    }
    return out;
}

}  // namespace hawkes
