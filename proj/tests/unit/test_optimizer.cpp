#include <cmath>
#include <limits>

#include "doctest.h"
#include "support.hpp"

#include "dalc/kernels.hpp"
#include "dalc/objective.hpp"
#include "dalc/optimizer.hpp"

using namespace dalc;

TEST_CASE("quadratic converges to its minimizer") {
    const std::vector<double> target{1.5, -2.0, 0.25};
    auto fg = [&](std::span<const double> x, std::span<double> g) {
        double f = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            f += (x[i] - target[i]) * (x[i] - target[i]);
            g[i] = 2 * (x[i] - target[i]);
        }
        return f;
    };
    for (Method m : {Method::QuasiNewton, Method::GradientDescent}) {
        OptimizerConfig cfg;
        cfg.method = m;
        cfg.gradient_tolerance = 1e-10;
        const auto r = minimize(fg, std::vector<double>(3, 0.0), cfg);
        CHECK(r.trace.converged);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::abs(r.point[i] - target[i]) < 1e-8);
    }
}

TEST_CASE("rosenbrock from the classic start") {
    auto f = [](std::span<const double> x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    auto g = [](std::span<const double> x) {
        return std::vector<double>{-400 * x[0] * (x[1] - x[0] * x[0]) - 2 * (1 - x[0]),
                                   200 * (x[1] - x[0] * x[0])};
    };
    OptimizerConfig cfg;
    cfg.gradient_tolerance = 1e-8;
    const auto r = minimize(f, g, {-1.2, 1.0}, cfg);
    CHECK(r.trace.converged);
    CHECK(std::abs(r.point[0] - 1.0) < 1e-4);
    CHECK(std::abs(r.point[1] - 1.0) < 1e-4);
}

TEST_CASE("trace is non-increasing on the dual objective") {
    Rng rng(11);
    const Dataset s = test::random_dense(rng, 15, 3, true, Role::Source);
    const Dataset t = test::random_dense(rng, 15, 3, false, Role::Target, 0.5);
    const GramMatrix K = gram(KernelSpec::rbf(1.0), s, t);
    const DualObjective D(K, s.labels(), 15, 15, {1.0, 1.0});
    OptimizerConfig cfg;
    cfg.max_iterations = 200;
    const auto r = minimize([&](auto a, auto g) { return D.value_and_gradient(a, g); },
                            std::vector<double>(30, 1.0 / 30), cfg);
    const auto& v = r.trace.objective_values;
    REQUIRE(v.size() >= 2);
    for (std::size_t i = 1; i < v.size(); ++i)
        CHECK(v[i] <= v[i - 1]);
    CHECK(v.back() <= v.front());
    CHECK(r.trace.iterations == v.size() - 1);
}

TEST_CASE("iteration cap reports non-convergence") {
    auto fg = [](std::span<const double> x, std::span<double> g) {
        g[0] = 2 * x[0];
        return x[0] * x[0];
    };
    OptimizerConfig cfg;
    cfg.method = Method::GradientDescent;
    cfg.max_iterations = 1;
    cfg.gradient_tolerance = 1e-300;
    const auto r = minimize(fg, {5.0}, cfg);
    CHECK_FALSE(r.trace.converged);
    CHECK(r.trace.iterations <= 1);
}

TEST_CASE("non-finite values raise with the last point") {
    auto bad = [](std::span<const double>, std::span<double> g) {
        g[0] = 0.0;
        return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(minimize(bad, {1.0}, {}), OptimizerError);

    auto blowup = [](std::span<const double> x, std::span<double> g) {
        g[0] = x[0] < 0.5 ? std::numeric_limits<double>::infinity() : 1.0;
        return x[0];
    };
    try {
        minimize(blowup, {1.0}, {});
        FAIL("expected an optimizer error");
    } catch (const OptimizerError& e) {
        REQUIRE(e.last_point().size() == 1);
        CHECK(std::isfinite(e.last_point()[0]));
    }
}

TEST_CASE("method names") {
    CHECK(parse_method("quasi-newton") == Method::QuasiNewton);
    CHECK(parse_method("gradient-descent") == Method::GradientDescent);
    CHECK(method_name(Method::QuasiNewton) == "quasi-newton");
    CHECK_THROWS_AS(parse_method("newton"), std::invalid_argument);
    OptimizerConfig bad;
    bad.backtrack_factor = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
