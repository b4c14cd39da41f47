#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hawkes/likelihood.hpp"
#include "hawkes/simulate.hpp"
#include "support.hpp"

using namespace hawkes;

TEST_SUITE("likelihood") {

TEST_CASE("poisson reduction") {
    const HawkesModel m{1.0, Single{ExpKernel{1e-300, 1.0}}};
    const auto l = log_likelihood(m, EventSequence({1.0, 2.0, 3.0}, 4.0));
    CHECK(l.finite());
    CHECK(l.value == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(l.n_events == 3);
    CHECK(l.horizon == 4.0);
}

TEST_CASE("kernel integral limits") {
    CHECK(kernel_integral(CompositeKernel{Single{ExpKernel{1.0, 1.0}}}, INFINITY) == doctest::Approx(1.0));
    CHECK(kernel_mass(Single{ExpKernel{1.0, 1.0}}) == doctest::Approx(1.0));
    CHECK(kernel_integral(BaseKernel{SqrKernel{2.0, 1.0}}, 0.25) == doctest::Approx(0.5));
    CHECK(kernel_integral(BaseKernel{SqrKernel{2.0, 1.0}}, 5.0) == doctest::Approx(2.0));
    CHECK(kernel_integral(BaseKernel{SnsKernel{1.0, 1.0}}, 10.0) == doctest::Approx(2.0));
    CHECK(kernel_integral(BaseKernel{PwlKernel{1.0, 1.0, 2.0}}, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("kernel integral matches quadrature for every composition") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i) {
        const auto k = testing::random_composite(rng, 0.7);
        const double s = testing::uniform(rng, 0.0, 8.0);
        INFO(describe(k) << " s=" << s);
        CHECK(kernel_integral(k, s) == doctest::Approx(testing::quadrature_integral(k, s)).epsilon(1e-9));
        CHECK(kernel_mass(k) == doctest::Approx(0.7).epsilon(1e-8));
    }
}

TEST_CASE("log likelihood matches the quadrature oracle") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 40; ++i) {
        const auto [m, events] = testing::random_model_and_sequence(rng, 200);
        INFO(describe(m.kernel));
        const auto l = log_likelihood(m, events);
        REQUIRE(l.finite());
        CHECK(l.value == doctest::Approx(testing::quadrature_log_likelihood(m, events)).epsilon(1e-8));
    }
}

TEST_CASE("cutoff only drops negligible terms") {
    std::mt19937_64 rng(23);
    const auto [m, events] = testing::random_model_and_sequence(rng, 300);
    CHECK(log_likelihood(m, events).value == doctest::Approx(log_likelihood(m, events, 0.0).value).epsilon(1e-10));
}

TEST_CASE("compensator increments") {
    const HawkesModel m{0.5, Single{ExpKernel{1.0, 2.0}}};
    const EventSequence events({0.5, 1.0, 3.0}, 4.0);
    const auto inc = compensator_increments(m, events);
    REQUIRE(inc.size() == 3);
    CHECK(inc[0] == doctest::Approx(0.25));
    CHECK(inc[1] == doctest::Approx(0.25 + 0.5 * (1.0 - std::exp(-1.0))));
    for (double v : inc) CHECK(v > 0.0);

    // Sum of increments plus the tail equals the compensator at T.
    double total = 0.0;
    for (double v : inc) total += v;
    double tail = m.mu * (4.0 - 3.0);
    for (double t : events.times()) tail += kernel_integral(m.kernel, 4.0 - t) - kernel_integral(m.kernel, 3.0 - t);
    const double compensator = m.mu * 4.0 + [&] {
        double acc = 0.0;
        for (double t : events.times()) acc += kernel_integral(m.kernel, 4.0 - t);
        return acc;
    }();
    CHECK(total + tail == doctest::Approx(compensator));
}

TEST_CASE("time rescaling gives unit exponential increments") {
    const HawkesModel m{0.8, Sum{ExpKernel{0.6, 2.0}, SqrKernel{0.1, 3.0}}};
    const auto events = simulate(m, 3000.0, 4);
    auto inc = compensator_increments(m, events);
    std::sort(inc.begin(), inc.end());
    const double n = static_cast<double>(inc.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
        const double cdf = 1.0 - std::exp(-inc[i]);
        ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
    }
    // 1% critical value of the Kolmogorov-Smirnov statistic.
    CHECK(ks < 1.63 / std::sqrt(n));
}

TEST_CASE("non-positive intensity gives the sentinel") {
    // Events at exactly zero see only mu; mu = 0 makes lambda(t_1) = 0.
    const HawkesModel m{0.0, Single{ExpKernel{0.5, 1.0}}};
    const auto l = log_likelihood(m, EventSequence({0.0, 1.0}, 2.0));
    CHECK_FALSE(l.finite());
    CHECK_FALSE(l.diagnostic.empty());
}

}
