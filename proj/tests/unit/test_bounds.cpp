#include <cmath>
#include <limits>

#include "doctest.h"
#include "support.hpp"

#include "dalc/bounds.hpp"

using namespace dalc;

TEST_CASE("catoni bound oracles") {
    CHECK(catoni_bound(0.0, 0.0, 10, 1.0, 1.0) == 0.0);
    CHECK(std::abs(catoni_factor(1e-8) - 1.0) < 1e-6);
    // mpmath, 40 digits
    CHECK(std::abs(catoni_bound(0.2, 1.0, 100, 1.0, 0.05, 2) - 0.39542666227904284147) < 1e-12);
    CHECK(std::abs(catoni_bound(0.1, 1.0, 50, 0.5, 0.1, 1) - 0.29494471354521208977) < 1e-12);
    CHECK(catoni_factor(1.0) == doctest::Approx(1.5819767068693264244).epsilon(1e-15));
}

TEST_CASE("looser variant dominates the tight one") {
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const double mean = rng.uniform(0, 0.5), kl = rng.uniform(0, 5), c = rng.uniform(0.01, 1.99);
        const auto m = 1 + rng.below(1000);
        CHECK(catoni_bound_simple(mean, kl, m, c, 0.05) >= catoni_bound(mean, kl, m, c, 0.05) - 1e-15);
    }
    CHECK_THROWS_AS(catoni_bound_simple(0.1, 1.0, 10, 2.0, 0.05), std::invalid_argument);
}

TEST_CASE("ideal adaptation bound") {
    CHECK(da_bound_ideal(0.4, 0.09, 1.2, 2.0, 0.01) == doctest::Approx(0.57).epsilon(1e-14));
    CHECK(da_bound_ideal(0.3, 0.0, 2.0, 2.0, 0.0) == doctest::Approx(0.15));
    // Equal domains: beta = 1, eta = 0, q = inf recovers the Gibbs risk d/2 + e.
    CHECK(da_bound_ideal(0.3, 0.1, 1.0, std::numeric_limits<double>::infinity(), 0.0) ==
          doctest::Approx(0.25));
}

TEST_CASE("generalization bound on a fixed input set") {
    BoundInputs in;
    in.d_hat = 0.2;
    in.e_hat = 0.05;
    in.kl = 3.0;
    in.m_s = 1000;
    in.m_t = 800;
    in.b = 1.5;
    in.c = 0.7;
    in.delta = 0.05;
    in.beta_inf = 1.2;
    in.eta = 0.01;
    const auto r = da_generalization_bound(in);
    // mpmath, 40 digits
    CHECK(std::abs(r.c_prime - 1.3905037045441243087) < 1e-12);
    CHECK(std::abs(r.b_prime - 2.3169904502199628398) < 1e-12);
    CHECK(std::abs(r.target_gibbs_bound - 0.30392381822149198276) < 1e-12);
    CHECK(std::abs(r.target_vote_bound - 0.60784763644298396551) < 1e-12);
}

TEST_CASE("only the complexity term survives with zero estimates") {
    BoundInputs in;
    in.m_s = 100;
    in.m_t = 50;
    in.b = 0.8;
    in.c = 1.3;
    in.delta = 1.0;
    const auto r = da_generalization_bound(in);
    const double expect =
        (catoni_factor(1.3) / (50 * 1.3) + catoni_factor(0.8) / (100 * 0.8)) * std::log(2.0);
    CHECK(r.target_gibbs_bound == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("symmetric constants give b' = c'") {
    BoundInputs in;
    in.b = in.c = 0.9;
    in.m_s = in.m_t = 200;
    const auto r = da_generalization_bound(in);
    CHECK(r.b_prime == r.c_prime);
}

TEST_CASE("bound matches a separately written formula") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        BoundInputs in;
        in.d_hat = rng.uniform();
        in.e_hat = rng.uniform(0, 0.5);
        in.kl = rng.uniform(0, 20);
        in.m_s = 1 + rng.below(5000);
        in.m_t = 1 + rng.below(5000);
        in.b = rng.uniform(0.01, 10);
        in.c = rng.uniform(0.01, 10);
        in.delta = rng.uniform(0.001, 1);
        in.beta_inf = rng.uniform(1, 3);
        in.eta = rng.uniform(0, 0.1);
        const double cp = in.c / (1 - std::exp(-in.c));
        const double bp = in.b / (1 - std::exp(-in.b)) * in.beta_inf;
        const double tail = cp / (in.m_t * in.c) + bp / (in.m_s * in.b);
        const double expect =
            2 * (cp * in.d_hat / 2 + bp * in.e_hat + in.eta + tail * (2 * in.kl + std::log(2 / in.delta)));
        CHECK(da_generalization_bound(in).target_vote_bound == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("bound is monotone in each input") {
    Rng rng(7);
    auto random_inputs = [&] {
        BoundInputs in;
        in.d_hat = rng.uniform(0, 0.9);
        in.e_hat = rng.uniform(0, 0.4);
        in.kl = rng.uniform(0, 10);
        in.m_s = 10 + rng.below(1000);
        in.m_t = 10 + rng.below(1000);
        in.b = rng.uniform(0.1, 5);
        in.c = rng.uniform(0.1, 5);
        in.delta = rng.uniform(0.01, 0.5);
        in.beta_inf = rng.uniform(1, 2);
        in.eta = rng.uniform(0, 0.05);
        return in;
    };
    auto value = [](const BoundInputs& in) { return da_generalization_bound(in).target_vote_bound; };
    for (int i = 0; i < 100; ++i) {
        const BoundInputs base = random_inputs();
        const double v = value(base);
        BoundInputs x = base;
        x.d_hat += 0.05;
        CHECK(value(x) > v);
        x = base;
        x.e_hat += 0.05;
        CHECK(value(x) > v);
        x = base;
        x.kl += 0.5;
        CHECK(value(x) > v);
        x = base;
        x.eta += 0.01;
        CHECK(value(x) > v);
        x = base;
        x.beta_inf += 0.1;
        CHECK(value(x) >= v);
        x = base;
        x.delta /= 2;
        CHECK(value(x) > v);
        x = base;
        x.m_s *= 2;
        CHECK(value(x) < v);
        x = base;
        x.m_t *= 2;
        CHECK(value(x) < v);
    }
}

TEST_CASE("input validation") {
    BoundInputs in;
    in.eta = 1.5;
    CHECK_THROWS_AS(da_generalization_bound(in), std::invalid_argument);
    in = {};
    in.delta = 0.0;
    CHECK_THROWS_AS(da_generalization_bound(in), std::invalid_argument);
    in = {};
    in.q = 2.0;
    CHECK_THROWS_AS(da_generalization_bound(in), std::invalid_argument);
    in = {};
    in.m_t = 0;
    CHECK_THROWS_AS(da_generalization_bound(in), std::invalid_argument);
}

TEST_CASE("optional report fields") {
    BoundInputs in;
    in.d_hat = 0.3;
    in.e_hat = 0.04;
    in.m_s = in.m_t = 100;
    CHECK_FALSE(da_generalization_bound(in).source_gibbs_bound.has_value());
    in.gibbs_hat = 0.19;
    in.q = 2.0;
    in.beta_q = 1.1;
    const auto r = da_generalization_bound(in);
    REQUIRE(r.source_gibbs_bound.has_value());
    CHECK(*r.source_gibbs_bound == doctest::Approx(catoni_bound(0.19, 0.0, 100, 1.0, 0.05)));
    CHECK(r.ideal_plugin == doctest::Approx(0.15 + 1.1 * 0.2));
}

TEST_CASE("sweep finds the minimizing cell") {
    BoundInputs in;
    in.d_hat = 0.2;
    in.e_hat = 0.05;
    in.kl = 2.0;
    in.m_s = in.m_t = 500;
    const std::vector<double> bs{0.1, 0.5, 1, 2, 5}, cs{0.1, 0.5, 1, 2, 5};
    const auto s = sweep_bound(in, bs, cs);
    REQUIRE(s.target_vote_bound.size() == 25);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t bi = 0; bi < 5; ++bi)
        for (std::size_t ci = 0; ci < 5; ++ci) {
            BoundInputs cell = in;
            cell.b = bs[bi];
            cell.c = cs[ci];
            CHECK(s.at(bi, ci) == da_generalization_bound(cell).target_vote_bound);
            best = std::min(best, s.at(bi, ci));
        }
    CHECK(s.best_value == best);
    CHECK(s.at(s.best_b_index, s.best_c_index) == best);
}
