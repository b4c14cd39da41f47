#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hawkes/error.hpp"
#include "hawkes/kernels.hpp"
#include "hawkes/quadrature.hpp"
#include "support.hpp"

using namespace hawkes;
using testing::quadrature_mass;

TEST_SUITE("kernels") {

TEST_CASE("pointwise evaluation") {
    CHECK(evaluate(CompositeKernel{Single{ExpKernel{1.0, 1.0}}}, 0.0) == doctest::Approx(1.0));
    CHECK(evaluate(CompositeKernel{Single{SnsKernel{1.0, 1.0}}}, std::numbers::pi + 0.1) == 0.0);
    CHECK(evaluate(CompositeKernel{Product{SqrKernel{2.0, 1.0}, ExpKernel{1.0, 1.0}}}, 0.5) ==
          doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-12));
    CHECK(evaluate(CompositeKernel{Single{SqrKernel{1.0, 1.0}}}, 1.5) == 0.0);
    CHECK(evaluate(CompositeKernel{Single{ExpKernel{1.0, 1.0}}}, -0.1) == 0.0);
    CHECK(evaluate(CompositeKernel{Single{PwlKernel{2.0, 1.0, 2.0}}}, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("sum and product evaluate pointwise") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto a = testing::random_base(rng, kAllFamilies[i % 4]);
        const auto b = testing::random_base(rng, kAllFamilies[(i / 4) % 4]);
        const double t = testing::uniform(rng, 0.0, 4.0);
        const double fa = evaluate(a, t), fb = evaluate(b, t);
        CHECK(evaluate(CompositeKernel{Sum{a, b}}, t) == doctest::Approx(fa + fb).epsilon(1e-14));
        CHECK(evaluate(CompositeKernel{Product{a, b}}, t) == doctest::Approx(fa * fb).epsilon(1e-14));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(BaseKernel{PwlKernel{1.0, 1.0, 1.0}}), InvalidInput);
    CHECK_THROWS_AS(validate(BaseKernel{ExpKernel{-1.0, 1.0}}), InvalidInput);
    CHECK_THROWS_AS(validate(BaseKernel{SqrKernel{1.0, 0.0}}), InvalidInput);
    CHECK_THROWS_AS(validate(BaseKernel{SnsKernel{1.0, NAN}}), InvalidInput);
    CHECK_NOTHROW(validate(BaseKernel{PwlKernel{1.0, 1.0, 1.5}}));
    CHECK(parse_family("SNS") == Family::Sns);
    CHECK_THROWS_AS(parse_family("GAUSS"), InvalidInput);
}

TEST_CASE("single kernel norms") {
    auto v = stationarity_norm(Single{ExpKernel{0.5, 1.0}});
    CHECK(v.norm_value == doctest::Approx(0.5));
    CHECK(v.stationary);
    CHECK_FALSE(v.is_bound);

    v = stationarity_norm(Single{SqrKernel{1.0, 1.0}});
    CHECK(v.norm_value == doctest::Approx(1.0));
    CHECK_FALSE(v.stationary);

    CHECK(stationarity_norm(Single{PwlKernel{1.0, 2.0, 3.0}}).norm_value == doctest::Approx(0.125));
    CHECK(stationarity_norm(Single{SnsKernel{0.25, 2.0}}).norm_value == doctest::Approx(0.25));
}

TEST_CASE("product norms") {
    CHECK(stationarity_norm(Product{ExpKernel{1.0, 1.0}, ExpKernel{1.0, 1.0}}).norm_value == doctest::Approx(0.5));
    CHECK(stationarity_norm(Product{ExpKernel{1.0, 1.0}, SqrKernel{1.0, 1.0}}).norm_value ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    // Argument order does not select a different row.
    CHECK(stationarity_norm(Product{SqrKernel{1.0, 1.0}, ExpKernel{1.0, 1.0}}).norm_value ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(stationarity_norm(Product{PwlKernel{1.0, 1.0, 2.0}, PwlKernel{1.0, 1.0, 2.0}}).is_bound);
    CHECK(stationarity_norm(Product{SnsKernel{1.0, 1.0}, PwlKernel{1.0, 1.0, 2.0}}).is_bound);
    CHECK_FALSE(stationarity_norm(Product{ExpKernel{1.0, 1.0}, PwlKernel{1.0, 1.0, 2.0}}).is_bound);
}

TEST_CASE("single and sum norms match quadrature") {
    std::mt19937_64 rng(11);
    for (Family f : kAllFamilies) {
        for (int i = 0; i < 50; ++i) {
            const CompositeKernel k = Single{testing::random_base(rng, f)};
            CHECK(stationarity_norm(k).norm_value == doctest::Approx(quadrature_mass(k)).epsilon(1e-6));
        }
    }
    for (int i = 0; i < 100; ++i) {
        const auto a = testing::random_base(rng, kAllFamilies[i % 4]);
        const auto b = testing::random_base(rng, kAllFamilies[(i / 4) % 4]);
        const double sum = stationarity_norm(Sum{a, b}).norm_value;
        CHECK(sum == doctest::Approx(stationarity_norm(Single{a}).norm_value + stationarity_norm(Single{b}).norm_value));
        CHECK(sum == doctest::Approx(quadrature_mass(Sum{a, b})).epsilon(1e-6));
    }
}

TEST_CASE("product rows match or dominate quadrature") {
    std::mt19937_64 rng(13);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i; j < 4; ++j) {
            const Family a = kAllFamilies[i], b = kAllFamilies[j];
            for (int n = 0; n < 40; ++n) {
                const CompositeKernel k = testing::random_product(rng, a, b);
                const auto v = stationarity_norm(k);
                const double q = quadrature_mass(k);
                INFO(describe(k));
                if (v.is_bound) {
                    CHECK(v.norm_value >= q - 1e-9);
                } else {
                    CHECK(v.norm_value == doctest::Approx(q).epsilon(1e-6));
                }
            }
        }
    }
}

TEST_CASE("mismatched discontinuous supports are rejected") {
    CHECK_THROWS_AS(stationarity_norm(Product{SqrKernel{1.0, 2.0}, SnsKernel{1.0, 1.0}}), InvalidInput);
    CHECK_THROWS_AS(stationarity_norm(Product{SnsKernel{1.0, 1.0}, SnsKernel{1.0, 2.0}}), InvalidInput);
    // 2% mismatch passes the default 5% tolerance but not a 1% one.
    const Product near{SqrKernel{1.0, std::numbers::pi * 1.02}, SnsKernel{0.1, 1.0}};
    CHECK_NOTHROW(stationarity_norm(near));
    CHECK_THROWS_AS(stationarity_norm(near, {.support_tolerance = 0.01}), InvalidInput);
}

TEST_CASE("quadrature fallback accepts a loose bound") {
    const Product k{PwlKernel{1.0, 2.0, 2.0}, PwlKernel{0.2, 0.1, 2.0}};
    const double exact = quadrature_mass(k);
    REQUIRE(exact < 1.0);
    const auto strict = stationarity_norm(k);
    REQUIRE(strict.norm_value >= 1.0);
    CHECK_FALSE(strict.stationary);
    const auto relaxed = stationarity_norm(k, {.quadrature_fallback = true});
    CHECK(relaxed.stationary);
    CHECK(relaxed.norm_value == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("scaled upper incomplete gamma") {
    for (double a : {-3.0, -2.5, -1.0, -0.7, 0.3, 1.0, 2.5}) {
        for (double x : {0.05, 0.4, 1.0, 2.0, 7.5, 30.0}) {
            const double oracle = quadrature::integrate(
                [&](double s) { return std::exp(-s) * std::pow(x + s, a - 1.0); }, 0.0, INFINITY, {}, 1e-14);
            // e^x Gamma(a, x) = int_0^inf e^{-s} (x + s)^{a - 1} ds
            INFO("a=" << a << " x=" << x);
            CHECK(scaled_upper_gamma(a, x) == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
}

TEST_CASE("intraclass reductions") {
    const BaseKernel exps[] = {ExpKernel{2.0, 1.0}, ExpKernel{3.0, 2.0}};
    auto r = reduce_intraclass_product(exps);
    CHECK(r.kind == ReductionKind::Exact);
    CHECK(std::get<ExpKernel>(r.kernel).alpha == doctest::Approx(6.0));
    CHECK(std::get<ExpKernel>(r.kernel).beta == doctest::Approx(3.0));
    for (double t : {0.0, 0.3, 1.7}) {
        CHECK(evaluate(r.kernel, t) == doctest::Approx(evaluate(exps[0], t) * evaluate(exps[1], t)).epsilon(1e-14));
    }

    const BaseKernel sqrs[] = {SqrKernel{1.0, 5.0}, SqrKernel{2.0, 3.0}};
    r = reduce_intraclass_product(sqrs);
    CHECK(r.kind == ReductionKind::Exact);
    CHECK(std::get<SqrKernel>(r.kernel).b == doctest::Approx(2.0));
    CHECK(std::get<SqrKernel>(r.kernel).l == doctest::Approx(3.0));
    for (double t : {0.0, 2.9, 3.5, 6.0}) {
        CHECK(evaluate(r.kernel, t) == doctest::Approx(evaluate(sqrs[0], t) * evaluate(sqrs[1], t)));
    }

    const BaseKernel one[] = {ExpKernel{1.0, 1.0}};
    r = reduce_intraclass_product(one);
    CHECK(std::get<ExpKernel>(r.kernel).alpha == 1.0);
    CHECK(std::get<ExpKernel>(r.kernel).beta == 1.0);

    const BaseKernel pwls[] = {PwlKernel{2.0, 1.0, 2.0}, PwlKernel{3.0, 0.5, 1.5}};
    r = reduce_intraclass_product(pwls);
    CHECK(r.kind == ReductionKind::LowerBound);
    const auto& p = std::get<PwlKernel>(r.kernel);
    CHECK(p.k == doctest::Approx(6.0));
    CHECK(p.c == doctest::Approx(1.0));
    CHECK(p.p == doctest::Approx(3.5));
    for (double t : {0.0, 0.5, 4.0}) CHECK(evaluate(r.kernel, t) <= evaluate(pwls[0], t) * evaluate(pwls[1], t));

    const BaseKernel snss[] = {SnsKernel{2.0, 1.0}, SnsKernel{3.0, 2.0}};
    r = reduce_intraclass_product(snss);
    CHECK(r.kind == ReductionKind::NotReducible);
    CHECK(std::get<SnsKernel>(r.kernel).a == doctest::Approx(6.0));

    const BaseKernel mixed[] = {ExpKernel{1.0, 1.0}, SqrKernel{1.0, 1.0}};
    CHECK_THROWS_AS(reduce_intraclass_product(mixed), InvalidInput);
}

TEST_CASE("interclass upper bound") {
    const BaseKernel es[] = {ExpKernel{1.0, 1.0}, SqrKernel{1.0, 2.0}};
    auto b = interclass_product_upper_bound(es);
    CHECK(b.support_end == doctest::Approx(2.0));
    CHECK_FALSE(b.c.has_value());
    for (double x : {0.0, 0.5, 1.9}) CHECK(b.evaluate(x) == doctest::Approx(std::exp(-x)));
    CHECK(b.evaluate(2.5) == 0.0);

    const BaseKernel ep[] = {ExpKernel{2.0, 0.5}, PwlKernel{3.0, 1.5, 2.0}};
    b = interclass_product_upper_bound(ep);
    CHECK(std::isinf(b.support_end));
    for (double x : {0.0, 1.0, 10.0}) {
        CHECK(b.evaluate(x) == doctest::Approx(6.0 * std::exp(-0.5 * x) / std::pow(x + 1.5, 2.0)));
    }

    // Dominates the explicit product of a mixed factor list.
    std::mt19937_64 rng(5);
    for (int n = 0; n < 100; ++n) {
        std::vector<BaseKernel> factors;
        for (Family f : kAllFamilies) {
            const int count = static_cast<int>(rng() % 3);
            for (int i = 0; i < count; ++i) factors.push_back(testing::random_base(rng, f));
        }
        if (factors.empty()) continue;
        const auto bound = interclass_product_upper_bound(factors);
        for (int i = 0; i < 20; ++i) {
            const double x = testing::uniform(rng, 0.0, 5.0);
            double product = 1.0;
            for (const auto& f : factors) product *= evaluate(f, x);
            CHECK(bound.evaluate(x) >= product * (1.0 - 1e-12));
        }
    }

    CHECK_THROWS_AS(interclass_product_upper_bound({}), InvalidInput);
}

}
