#include <cmath>
#include <limits>

#include "doctest.h"
#include "support.hpp"

#include "dalc/estimators.hpp"
#include "dalc/losses.hpp"
#include "dalc/synthetic.hpp"

using namespace dalc;

namespace {

double norm_margin(const std::vector<double>& w, const std::vector<double>& x) {
    double d = 0.0, n = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        d += w[i] * x[i];
        n += x[i] * x[i];
    }
    return d / std::sqrt(n);
}

}  // namespace

TEST_CASE("estimators at w = 0") {
    Rng rng(1);
    const Dataset s = test::random_dense(rng, 9, 3, true, Role::Source);
    const Dataset t = test::random_dense(rng, 7, 3, false, Role::Target);
    const std::vector<double> w(3, 0.0);
    CHECK(empirical_disagreement(w, t) == 0.5);
    CHECK(empirical_joint_error(w, s) == 0.25);
    CHECK(empirical_gibbs_risk(w, s) == 0.5);
    CHECK(empirical_domain_disagreement(w, s, t) == 0.0);
}

TEST_CASE("estimators match per-point loops") {
    Rng rng(2);
    for (int rep = 0; rep < 5; ++rep) {
        const Dataset s = test::random_dense(rng, 12, 4, true, Role::Source);
        const Dataset t = test::random_dense(rng, 8, 4, false, Role::Target, 0.7);
        const auto w = test::random_vector(rng, 4);
        double dis = 0.0, err = 0.0, gib = 0.0, vote = 0.0, dis_s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i)
            dis += phi_dis(norm_margin(w, t.dense_row(i))) / t.size();
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double m = norm_margin(w, s.dense_row(i));
            err += phi_err(s.label(i) * m) / s.size();
            gib += phi(s.label(i) * m) / s.size();
            vote += (sign_label(m) != s.label(i)) / double(s.size());
            dis_s += phi_dis(m) / s.size();
        }
        CHECK(empirical_disagreement(w, t) == doctest::Approx(dis).epsilon(1e-13));
        CHECK(empirical_joint_error(w, s) == doctest::Approx(err).epsilon(1e-13));
        CHECK(empirical_gibbs_risk(w, s) == doctest::Approx(gib).epsilon(1e-13));
        CHECK(empirical_vote_risk(w, s) == doctest::Approx(vote));
        CHECK(empirical_domain_disagreement(w, s, t) == doctest::Approx(std::abs(dis_s - dis)).epsilon(1e-12));
        CHECK(std::abs(empirical_gibbs_risk(w, s) -
                       (0.5 * empirical_disagreement(w, s) + empirical_joint_error(w, s))) < 1e-10);
    }
}

TEST_CASE("large margins drive the losses to zero") {
    const auto s = Dataset::from_dense({{1.0, 0.0}, {-1.0, 0.0}}, std::vector<int>{1, -1}, Role::Source);
    const std::vector<double> w{20.0, 0.0};
    CHECK(empirical_disagreement(w, s) <= 1e-12);
    CHECK(empirical_joint_error(w, s) <= 1e-12);
    CHECK(empirical_domain_disagreement(w, s, s) == 0.0);
}

TEST_CASE("model and weight-vector estimators agree") {
    Rng rng(3);
    const Dataset s = test::random_dense(rng, 6, 2, true, Role::Source);
    const auto w = test::random_vector(rng, 2);
    const auto m = DalcModel::primal(w, {}, {}, 6, 6);
    const auto e = estimate(m, s);
    CHECK(e.disagreement == doctest::Approx(empirical_disagreement(w, s)));
    CHECK(e.joint_error == doctest::Approx(empirical_joint_error(w, s)));
    CHECK(e.gibbs_risk == doctest::Approx(empirical_gibbs_risk(w, s)));
    CHECK(e.vote_risk == doctest::Approx(empirical_vote_risk(w, s)));
    CHECK(e.sample_size == 6);
    CHECK_THROWS_AS(empirical_joint_error(w, s.without_labels()), std::invalid_argument);
    CHECK_THROWS_AS(empirical_disagreement(w, Dataset{}), std::invalid_argument);
}

TEST_CASE("zero-one error") {
    const std::vector<int> p{1, 1, -1, -1}, y{1, -1, -1, 1};
    CHECK(zero_one_error(p, y) == 0.5);
    CHECK_THROWS_AS(zero_one_error(p, std::vector<int>{1}), std::invalid_argument);
}

TEST_CASE("beta_q of identical domains is one") {
    const DiscreteShift same({0.3, 0.7}, {0.3, 0.7});
    for (double q : {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()}) {
        const auto e = beta_q_monte_carlo([&](auto x, int y) { return same.density_ratio(x, y); },
                                          [&](Rng& r) { return same.sample_source(r); }, q, 1000, 1);
        CHECK(e.beta_q == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("two-atom closed forms") {
    const DiscreteShift two({0.5, 0.5}, {0.25, 0.75});
    CHECK(two.beta(2.0) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK(two.beta(std::numeric_limits<double>::infinity()) == 1.5);
    CHECK(two.beta(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(two.beta(4.0) == doctest::Approx(1.265219767217621435).epsilon(1e-14));
}

TEST_CASE("two-atom Monte Carlo") {
    const DiscreteShift two({0.5, 0.5}, {0.25, 0.75});
    auto ratio = [&](std::span<const double> x, int y) { return two.density_ratio(x, y); };
    auto sample = [&](Rng& r) { return two.sample_source(r); };
    const auto b2 = beta_q_monte_carlo(ratio, sample, 2.0, 100000, 7);
    CHECK(std::abs(b2.beta_q - std::sqrt(1.25)) < 1e-2);
    CHECK_FALSE(b2.lower_bound);
    const auto binf = beta_q_monte_carlo(ratio, sample, std::numeric_limits<double>::infinity(), 1000, 7);
    CHECK(binf.beta_q == 1.5);
    CHECK(binf.lower_bound);
    CHECK(binf.mc_samples == 1000);
    CHECK_THROWS_AS(beta_q_monte_carlo(ratio, sample, 0.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(beta_q_monte_carlo(ratio, sample, 2.0, 0, 1), std::invalid_argument);
}

TEST_CASE("gaussian shift divergence") {
    const GaussianShift g({0.3, 0.0});
    CHECK(g.beta(2.0) == doctest::Approx(std::exp(0.09 / 2)));
    CHECK(std::isinf(g.beta(std::numeric_limits<double>::infinity())));
    const auto e = beta_q_monte_carlo([&](auto x, int y) { return g.density_ratio(x, y); },
                                      [&](Rng& r) { return g.sample_source(r); }, 2.0, 100000, 3);
    CHECK(std::abs(e.beta_q - g.beta(2.0)) < 1e-2);
}

TEST_CASE("eta resolution") {
    CHECK(resolve_eta(std::nullopt, std::nullopt) == 0.0);
    CHECK(resolve_eta(std::nullopt, 0.2) == 0.2);
    CHECK(resolve_eta(0.1, 0.2) == 0.1);
    CHECK(resolve_eta(0.3, std::nullopt) == 0.3);
    CHECK_THROWS_AS(resolve_eta(0.3, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(resolve_eta(1.5, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(resolve_eta(-0.1, std::nullopt), std::invalid_argument);
}
