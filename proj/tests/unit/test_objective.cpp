#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "dalc/kernels.hpp"
#include "dalc/losses.hpp"
#include "dalc/objective.hpp"

using namespace dalc;

namespace {

// Term-by-term recomputation straight from the loss functions.
double naive_primal(const std::vector<double>& w, const Dataset& s, const Dataset& t,
                    const DalcHyperparams& hp) {
    auto margin = [&](const Dataset& d, std::size_t i) {
        const auto x = d.dense_row(i);
        double dot = 0.0, nn = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            dot += w[k] * x[k];
            nn += x[k] * x[k];
        }
        return dot / std::sqrt(nn);
    };
    double v = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        v += hp.C * phi_dis(margin(t, i));
    for (std::size_t i = 0; i < s.size(); ++i)
        v += hp.B * phi_err(s.label(i) * margin(s, i));
    for (double x : w)
        v += x * x;
    return v;
}

std::vector<double> dual_to_primal(const std::vector<double>& alpha, const Dataset& s,
                                   const Dataset& t) {
    std::vector<double> w(s.dim(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i)
        axpy(alpha[i], s.point(i), w);
    for (std::size_t i = 0; i < t.size(); ++i)
        axpy(alpha[s.size() + i], t.point(i), w);
    return w;
}

}  // namespace

TEST_CASE("primal objective at w = 0") {
    Rng rng(1);
    const Dataset s = test::random_dense(rng, 7, 4, true, Role::Source);
    const Dataset t = test::random_dense(rng, 5, 4, false, Role::Target);
    const std::vector<double> w(4, 0.0);
    CHECK(primal_objective(w, s, t, {2.0, 3.0}) == doctest::Approx(3.0 * 5 * 0.5 + 2.0 * 7 * 0.25));
}

TEST_CASE("single source point at margin zero, no target weight") {
    const auto s = Dataset::from_dense({{0.0, 1.0}}, std::vector<int>{1}, Role::Source);
    const auto t = Dataset::from_dense({{1.0, 0.0}}, std::nullopt, Role::Target);
    const std::vector<double> w{1.0, 0.0};
    CHECK(primal_objective(w, s, t, {1.0, 0.0}) == doctest::Approx(0.25 + 1.0));
}

TEST_CASE("primal objective matches the term-by-term oracle") {
    Rng rng(2);
    for (int rep = 0; rep < 5; ++rep) {
        const Dataset s = test::random_dense(rng, 10, 5, true, Role::Source);
        const Dataset t = test::random_dense(rng, 10, 5, false, Role::Target, 0.5);
        const auto w = test::random_vector(rng, 5);
        const DalcHyperparams hp{0.7, 1.9};
        CHECK(primal_objective(w, s, t, hp) == doctest::Approx(naive_primal(w, s, t, hp)).epsilon(1e-13));
    }
}

TEST_CASE("symmetric target pair gives zero gradient at w = 0") {
    const auto s = Dataset::from_dense({{1.0, 0.5}}, std::vector<int>{1}, Role::Source);
    const auto t = Dataset::from_dense({{1.0, 2.0}, {-1.0, -2.0}}, std::nullopt, Role::Target);
    const std::vector<double> w(2, 0.0);
    const auto g = primal_gradient(w, s, t, {1e-300, 1.0});
    CHECK(std::abs(g[0]) < 1e-15);
    CHECK(std::abs(g[1]) < 1e-15);
}

TEST_CASE("single source point gradient by hand") {
    const std::vector<double> x{3.0, 4.0};
    const auto s = Dataset::from_dense({x}, std::vector<int>{-1}, Role::Source);
    const auto t = Dataset::from_dense({{1.0, 1.0}}, std::nullopt, Role::Target);
    const std::vector<double> w{0.2, -0.1};
    const double B = 1.5;
    const double m = -1.0 * (0.2 * 3 - 0.1 * 4) / 5.0;
    const double coef = B * -1.0 * d_phi_err(m) / 5.0;
    const auto g = primal_gradient(w, s, t, {B, 0.0});
    CHECK(g[0] == doctest::Approx(coef * 3.0 + 2 * 0.2).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(coef * 4.0 - 2 * 0.1).epsilon(1e-14));
}

TEST_CASE("primal and dual gradients match finite differences") {
    Rng rng(3);
    for (int rep = 0; rep < 6; ++rep) {
        const std::size_t d = 2 + rng.below(10), ms = 1 + rng.below(12), mt = 1 + rng.below(12);
        const Dataset s = test::random_dense(rng, ms, d, true, Role::Source);
        const Dataset t = test::random_dense(rng, mt, d, false, Role::Target, 0.3);
        const DalcHyperparams hp{rng.uniform(0.1, 3.0), rng.uniform(0.0, 3.0)};
        const PrimalObjective P(s, t, hp);
        const auto w = test::random_vector(rng, d, 0.5);
        const auto fd = test::numeric_gradient([&](auto v) { return P.value(v); }, w);
        CHECK(test::relative_error(P.gradient(w), fd) < 1e-6);

        for (const auto& k : {KernelSpec::linear(), KernelSpec::rbf(0.4)}) {
            const GramMatrix K = gram(k, s, t);
            const DualObjective D(K, s.labels(), ms, mt, hp);
            const auto a = test::random_vector(rng, ms + mt, 0.2);
            const auto fda = test::numeric_gradient([&](auto v) { return D.value(v); }, a);
            CHECK(test::relative_error(D.gradient(a), fda) < 1e-6);
            std::vector<double> g(ms + mt);
            CHECK(D.value_and_gradient(a, g) == D.value(a));
            CHECK(g == D.gradient(a));
        }
    }
}

TEST_CASE("dual objective at alpha = 0 and alpha = e1") {
    Rng rng(4);
    const Dataset s = test::random_dense(rng, 3, 2, true, Role::Source);
    const Dataset t = test::random_dense(rng, 2, 2, false, Role::Target);
    const GramMatrix K = gram(KernelSpec::rbf(1.0), s, t);
    const DalcHyperparams hp{1.3, 0.6};
    std::vector<double> a(5, 0.0);
    CHECK(dual_objective(a, K, s.labels(), 3, 2, hp) == doctest::Approx(0.6 * 2 * 0.5 + 1.3 * 3 * 0.25));
    // Only the quadratic term when both loss weights vanish.
    a[0] = 1.0;
    CHECK(dual_objective(a, K, s.labels(), 3, 2, {1e-300, 0.0}) == doctest::Approx(K(0, 0)));
}

TEST_CASE("dual gradient of the quadratic term is 2 K alpha") {
    Rng rng(8);
    const Dataset s = test::random_dense(rng, 4, 3, true, Role::Source);
    const Dataset t = test::random_dense(rng, 4, 3, false, Role::Target);
    const GramMatrix K = gram(KernelSpec::rbf(0.5), s, t);
    const auto a = test::random_vector(rng, 8);
    const auto g = dual_gradient(a, K, s.labels(), 4, 4, {1e-300, 0.0});
    std::vector<double> Ka(8);
    K.multiply(a, Ka);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(g[i] == doctest::Approx(2 * Ka[i]).epsilon(1e-12));
}

TEST_CASE("linear dual equals primal at w = X' alpha") {
    Rng rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        const Dataset s = test::random_dense(rng, 6, 4, true, Role::Source);
        const Dataset t = test::random_dense(rng, 5, 4, false, Role::Target, 0.4);
        const DalcHyperparams hp{1.1, 0.8};
        const GramMatrix K = gram(KernelSpec::linear(), s, t);
        const auto a = test::random_vector(rng, 11, 0.3);
        const auto w = dual_to_primal(a, s, t);
        CHECK(dual_objective(a, K, s.labels(), 6, 5, hp) ==
              doctest::Approx(primal_objective(w, s, t, hp)).epsilon(1e-12));

        // Chain rule: the dual gradient at alpha = 0 is X applied to the primal gradient at 0.
        const std::vector<double> zero_a(11, 0.0), zero_w(4, 0.0);
        const auto gd = dual_gradient(zero_a, K, s.labels(), 6, 5, hp);
        const auto gp = primal_gradient(zero_w, s, t, hp);
        for (std::size_t i = 0; i < 11; ++i) {
            const SparseVector& x = i < 6 ? s.point(i) : t.point(i - 6);
            CHECK(gd[i] == doctest::Approx(dot(gp, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("objective argument checks") {
    Rng rng(6);
    const Dataset s = test::random_dense(rng, 3, 2, true, Role::Source);
    const Dataset t = test::random_dense(rng, 3, 2, false, Role::Target);
    const std::vector<double> w(3, 0.0);
    CHECK_THROWS_AS(primal_objective(w, s, t, {}), std::invalid_argument);
    CHECK_THROWS_AS(PrimalObjective(s, t, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PrimalObjective(s, t, {1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PrimalObjective(s.without_labels(), t, {}), std::invalid_argument);
}
