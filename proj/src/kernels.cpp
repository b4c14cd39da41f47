#include "hawkes/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hawkes/error.hpp"
#include "hawkes/quadrature.hpp"

namespace hawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

double sns_end(const SnsKernel& s) { return kPi / s.omega; }

std::pair<const BaseKernel&, const BaseKernel&> factors_of(const CompositeKernel& kernel) {
    return std::visit(
        overloaded{
            [](const Sum& s) -> std::pair<const BaseKernel&, const BaseKernel&> { return {s.left, s.right}; },
            [](const Product& p) -> std::pair<const BaseKernel&, const BaseKernel&> { return {p.left, p.right}; },
            [](const Single& s) -> std::pair<const BaseKernel&, const BaseKernel&> { return {s.kernel, s.kernel}; },
        },
        kernel);
}

double relative_gap(double x, double y) { return std::abs(x - y) / std::max(x, y); }

}  // namespace

std::string_view family_name(Family family) {
    switch (family) {
        case Family::Exp: return "EXP";
        case Family::Pwl: return "PWL";
        case Family::Sqr: return "SQR";
        case Family::Sns: return "SNS";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    for (Family f : kAllFamilies) {
        if (family_name(f) == name) return f;
    }
    throw InvalidInput("unknown kernel family '" + std::string(name) + "'");
}

Family family_of(const BaseKernel& kernel) { return static_cast<Family>(kernel.index()); }

std::size_t parameter_count(Family family) {
    switch (family) {
        case Family::Exp: return 2;
        case Family::Pwl: return 3;
        case Family::Sqr: return 2;
        case Family::Sns: return 2;
    }
    return 0;
}

std::vector<double> parameters(const BaseKernel& kernel) {
    return std::visit(overloaded{
                          [](const ExpKernel& e) { return std::vector<double>{e.alpha, e.beta}; },
                          [](const PwlKernel& p) { return std::vector<double>{p.k, p.c, p.p}; },
                          [](const SqrKernel& s) { return std::vector<double>{s.b, s.l}; },
                          [](const SnsKernel& s) { return std::vector<double>{s.a, s.omega}; },
                      },
                      kernel);
}

BaseKernel make_kernel(Family family, std::span<const double> params) {
    if (params.size() != parameter_count(family)) {
        throw InvalidInput("wrong parameter count for " + std::string(family_name(family)));
    }
    switch (family) {
        case Family::Exp: return ExpKernel{params[0], params[1]};
        case Family::Pwl: return PwlKernel{params[0], params[1], params[2]};
        case Family::Sqr: return SqrKernel{params[0], params[1]};
        case Family::Sns: return SnsKernel{params[0], params[1]};
    }
    throw InvalidInput("unknown kernel family");
}

void validate(const BaseKernel& kernel) {
    for (double v : parameters(kernel)) {
        if (!positive_finite(v)) {
            throw InvalidInput("kernel parameters must be finite and strictly positive: " + describe(kernel));
        }
    }
    if (const auto* pwl = std::get_if<PwlKernel>(&kernel); pwl && !(pwl->p > 1.0)) {
        throw InvalidInput("PWL exponent must exceed 1: " + describe(kernel));
    }
}

void validate(const CompositeKernel& kernel) {
    auto [a, b] = factors_of(kernel);
    validate(a);
    validate(b);
}

double support_end(const BaseKernel& kernel) {
    return std::visit(overloaded{
                          [](const ExpKernel&) { return kInf; },
                          [](const PwlKernel&) { return kInf; },
                          [](const SqrKernel& s) { return s.l; },
                          [](const SnsKernel& s) { return sns_end(s); },
                      },
                      kernel);
}

double support_end(const CompositeKernel& kernel) {
    return std::visit(overloaded{
                          [](const Single& s) { return support_end(s.kernel); },
                          [](const Sum& s) { return std::max(support_end(s.left), support_end(s.right)); },
                          [](const Product& p) { return std::min(support_end(p.left), support_end(p.right)); },
                      },
                      kernel);
}

double evaluate(const BaseKernel& kernel, double t) {
    if (t < 0.0) return 0.0;
    return std::visit(overloaded{
                          [t](const ExpKernel& e) { return e.alpha * std::exp(-e.beta * t); },
                          [t](const PwlKernel& p) { return p.k * std::pow(p.c + t, -p.p); },
                          [t](const SqrKernel& s) { return t <= s.l ? s.b : 0.0; },
                          [t](const SnsKernel& s) {
                              return t <= sns_end(s) ? std::max(0.0, s.a * std::sin(s.omega * t)) : 0.0;
                          },
                      },
                      kernel);
}

double evaluate(const CompositeKernel& kernel, double t) {
    return std::visit(overloaded{
                          [t](const Single& s) { return evaluate(s.kernel, t); },
                          [t](const Sum& s) { return evaluate(s.left, t) + evaluate(s.right, t); },
                          [t](const Product& p) { return evaluate(p.left, t) * evaluate(p.right, t); },
                      },
                      kernel);
}

double sup_from(const BaseKernel& kernel, double elapsed) {
    elapsed = std::max(elapsed, 0.0);
    return std::visit(overloaded{
                          [&](const ExpKernel&) { return evaluate(kernel, elapsed); },
                          [&](const PwlKernel&) { return evaluate(kernel, elapsed); },
                          [&](const SqrKernel& s) { return elapsed <= s.l ? s.b : 0.0; },
                          [&](const SnsKernel& s) {
                              if (elapsed <= 0.5 * sns_end(s)) return s.a;
                              return evaluate(kernel, elapsed);
                          },
                      },
                      kernel);
}

double sup_from(const CompositeKernel& kernel, double elapsed) {
    return std::visit(overloaded{
                          [&](const Single& s) { return sup_from(s.kernel, elapsed); },
                          [&](const Sum& s) { return sup_from(s.left, elapsed) + sup_from(s.right, elapsed); },
                          [&](const Product& p) { return sup_from(p.left, elapsed) * sup_from(p.right, elapsed); },
                      },
                      kernel);
}

std::string describe(const BaseKernel& kernel) {
    std::ostringstream os;
    os.precision(6);
    os << family_name(family_of(kernel)) << '(';
    auto params = parameters(kernel);
    for (std::size_t i = 0; i < params.size(); ++i) {
        os << (i ? ", " : "") << params[i];
    }
    os << ')';
    return os.str();
}

std::string describe(const CompositeKernel& kernel) {
    return std::visit(overloaded{
                          [](const Single& s) { return describe(s.kernel); },
                          [](const Sum& s) { return describe(s.left) + " + " + describe(s.right); },
                          [](const Product& p) { return describe(p.left) + " x " + describe(p.right); },
                      },
                      kernel);
}

// ---------------------------------------------------------------------------

double scaled_upper_gamma(double a, double x) {
    if (!(x > 0.0)) throw InvalidInput("incomplete gamma needs x > 0");

    if (x > std::max(1.5, a + 1.0)) {
        // Legendre continued fraction, modified Lentz.
        constexpr double tiny = 1e-300;
        double b = x + 1.0 - a;
        double c = 1.0 / tiny;
        double d = 1.0 / b;
        double h = d;
        for (int i = 1; i < 10000; ++i) {
            const double an = -i * (i - a);
            b += 2.0;
            d = an * d + b;
            if (std::abs(d) < tiny) d = tiny;
            c = b + an / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < 1e-16) break;
        }
        return std::exp(a * std::log(x)) * h;
    }

    if (a > 0.0) return std::exp(x) * boost::math::tgamma(a, x);

    // Downward recurrence G(a) = (G(a + 1) - x^a) / a from a start in [0, 1).
    const bool integral = a == std::round(a);
    const int n = static_cast<int>(integral ? -a : std::ceil(-a));
    const double start = integral ? 0.0 : a + n;
    double g = integral ? std::exp(x) * boost::math::expint(1, x)
                        : std::exp(x) * boost::math::tgamma(start, x);
    double current = start;
    for (int i = 0; i < n; ++i) {
        current -= 1.0;
        g = (g - std::pow(x, current)) / current;
    }
    return g;
}

double base_norm(const BaseKernel& kernel) {
    return std::visit(overloaded{
                          [](const ExpKernel& e) { return e.alpha / e.beta; },
                          [](const PwlKernel& p) { return p.k * std::pow(p.c, 1.0 - p.p) / (p.p - 1.0); },
                          [](const SqrKernel& s) { return s.b * s.l; },
                          [](const SnsKernel& s) { return 2.0 * s.a / s.omega; },
                      },
                      kernel);
}

namespace {

struct ProductNorm {
    double value;
    bool is_bound;
};

ProductNorm product_norm(const BaseKernel& first, const BaseKernel& second, double support_tolerance) {
    // Rows are keyed on the family-ordered pair.
    const BaseKernel& x = family_of(first) <= family_of(second) ? first : second;
    const BaseKernel& y = family_of(first) <= family_of(second) ? second : first;

    return std::visit(
        overloaded{
            [](const ExpKernel& a, const ExpKernel& b) -> ProductNorm {
                return {a.alpha * b.alpha / (a.beta + b.beta), false};
            },
            [](const ExpKernel& e, const PwlKernel& p) -> ProductNorm {
                const double x = e.beta * p.c;
                return {e.alpha * p.k * std::pow(e.beta, p.p - 1.0) * scaled_upper_gamma(1.0 - p.p, x), false};
            },
            [](const ExpKernel& e, const SqrKernel& s) -> ProductNorm {
                return {e.alpha * s.b * -std::expm1(-e.beta * s.l) / e.beta, false};
            },
            [](const ExpKernel& e, const SnsKernel& s) -> ProductNorm {
                const double w = s.omega;
                return {s.a * e.alpha * w * (1.0 + std::exp(-e.beta * kPi / w)) / (w * w + e.beta * e.beta), false};
            },
            [](const PwlKernel& a, const PwlKernel& b) -> ProductNorm {
                const double q = a.p + b.p - 1.0;
                return {a.k * b.k / (q * std::pow(std::min(a.c, b.c), q)), true};
            },
            [](const PwlKernel& p, const SqrKernel& s) -> ProductNorm {
                const double q = p.p - 1.0;
                return {p.k * s.b * (std::pow(p.c, -q) - std::pow(p.c + s.l, -q)) / q, false};
            },
            [](const PwlKernel& p, const SnsKernel& s) -> ProductNorm {
                const double q = 1.0 - p.p;
                return {p.k * s.a * (std::pow(p.c + sns_end(s), q) - std::pow(p.c, q)) / q, true};
            },
            [](const SqrKernel& a, const SqrKernel& b) -> ProductNorm {
                return {a.b * b.b * std::min(a.l, b.l), false};
            },
            [&](const SqrKernel& q, const SnsKernel& s) -> ProductNorm {
                if (relative_gap(q.l, sns_end(s)) > support_tolerance) {
                    throw InvalidInput("SQR x SNS supports do not share an endpoint: L=" + std::to_string(q.l) +
                                       ", pi/omega=" + std::to_string(sns_end(s)));
                }
                return {2.0 * s.a * q.b / s.omega, false};
            },
            [&](const SnsKernel& a, const SnsKernel& b) -> ProductNorm {
                if (relative_gap(sns_end(a), sns_end(b)) > support_tolerance) {
                    throw InvalidInput("SNS x SNS supports do not share an endpoint: " + describe(BaseKernel{a}) +
                                       ", " + describe(BaseKernel{b}));
                }
                // Tolerated mismatch: use the shorter (intersection) support.
                const double w = std::max(a.omega, b.omega);
                return {kPi * a.a * b.a / (2.0 * w), false};
            },
            [](const auto&, const auto&) -> ProductNorm {
                throw Error("unordered product pair");
            },
        },
        x, y);
}

double quadrature_norm(const CompositeKernel& kernel) {
    auto [a, b] = factors_of(kernel);
    std::vector<double> cuts;
    for (double e : {support_end(a), support_end(b)}) {
        if (std::isfinite(e)) cuts.push_back(e);
    }
    const double end = support_end(kernel);
    return quadrature::integrate([&](double t) { return evaluate(kernel, t); }, 0.0, end, cuts, 1e-12);
}

}  // namespace

StationarityVerdict stationarity_norm(const CompositeKernel& kernel, const StationarityOptions& options) {
    validate(kernel);

    StationarityVerdict verdict;
    std::visit(overloaded{
                   [&](const Single& s) { verdict.norm_value = base_norm(s.kernel); },
                   [&](const Sum& s) { verdict.norm_value = base_norm(s.left) + base_norm(s.right); },
                   [&](const Product& p) {
                       auto row = product_norm(p.left, p.right, options.support_tolerance);
                       verdict.norm_value = row.value;
                       verdict.is_bound = row.is_bound;
                   },
               },
               kernel);

    if (verdict.is_bound && options.quadrature_fallback && verdict.norm_value >= 1.0) {
        const double exact = quadrature_norm(kernel);
        if (exact < 1.0) {
            verdict.norm_value = exact;
            verdict.is_bound = false;
        }
    }
    verdict.stationary = verdict.norm_value >= 0.0 && verdict.norm_value < 1.0;
    return verdict;
}

// ---------------------------------------------------------------------------

IntraclassReduction reduce_intraclass_product(std::span<const BaseKernel> factors) {
    if (factors.empty()) throw InvalidInput("intraclass product needs at least one factor");
    const Family family = family_of(factors.front());
    for (const auto& f : factors) {
        if (family_of(f) != family) throw InvalidInput("intraclass product mixes kernel families");
        validate(f);
    }
    if (factors.size() == 1) return {factors.front(), ReductionKind::Exact};

    switch (family) {
        case Family::Exp: {
            ExpKernel out{1.0, 0.0};
            for (const auto& f : factors) {
                out.alpha *= std::get<ExpKernel>(f).alpha;
                out.beta += std::get<ExpKernel>(f).beta;
            }
            return {out, ReductionKind::Exact};
        }
        case Family::Pwl: {
            PwlKernel out{1.0, 0.0, 0.0};
            for (const auto& f : factors) {
                const auto& p = std::get<PwlKernel>(f);
                out.k *= p.k;
                out.c = std::max(out.c, p.c);
                out.p += p.p;
            }
            return {out, ReductionKind::LowerBound};
        }
        case Family::Sqr: {
            SqrKernel out{1.0, kInf};
            for (const auto& f : factors) {
                out.b *= std::get<SqrKernel>(f).b;
                out.l = std::min(out.l, std::get<SqrKernel>(f).l);
            }
            return {out, ReductionKind::Exact};
        }
        case Family::Sns: {
            SnsKernel out{1.0, 0.0};
            for (const auto& f : factors) {
                out.a *= std::get<SnsKernel>(f).a;
                out.omega = std::max(out.omega, std::get<SnsKernel>(f).omega);
            }
            return {out, ReductionKind::NotReducible};
        }
    }
    throw Error("unreachable");
}

double ProductUpperBound::evaluate(double x) const {
    if (x < 0.0 || x > support_end) return 0.0;
    double v = amplitude * std::exp(-beta * x);
    if (c) v *= std::pow(x + *c, -p);
    return v;
}

std::string ProductUpperBound::describe() const {
    std::ostringstream os;
    os.precision(6);
    os << amplitude << " * exp(-" << beta << " x)";
    if (c) os << " / (x + " << *c << ")^" << p;
    os << " on [0, " << support_end << "]";
    return os.str();
}

ProductUpperBound interclass_product_upper_bound(std::span<const BaseKernel> factors) {
    if (factors.empty()) throw InvalidInput("upper bound of an empty product is undefined");
    ProductUpperBound bound;
    bound.support_end = kInf;
    for (const auto& f : factors) {
        validate(f);
        std::visit(overloaded{
                       [&](const ExpKernel& e) {
                           bound.amplitude *= e.alpha;
                           bound.beta += e.beta;
                       },
                       [&](const PwlKernel& p) {
                           bound.amplitude *= p.k;
                           bound.c = bound.c ? std::min(*bound.c, p.c) : p.c;
                           bound.p += p.p;
                       },
                       [&](const SqrKernel& s) {
                           bound.amplitude *= s.b;
                           bound.support_end = std::min(bound.support_end, s.l);
                       },
                       [&](const SnsKernel& s) {
                           bound.amplitude *= s.a;
                           bound.support_end = std::min(bound.support_end, sns_end(s));
                       },
                   },
                   f);
    }
    return bound;
}

}  // namespace hawkes
