#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "support.hpp"

#include "dalc/validation.hpp"

using namespace dalc;

TEST_CASE("log space endpoints and ratios") {
    const auto v = log_space(0.01, 1e6, 20);
    REQUIRE(v.size() == 20);
    CHECK(v.front() == 0.01);
    CHECK(v.back() == 1e6);
    for (std::size_t i = 1; i < v.size(); ++i)
        CHECK(v[i] / v[i - 1] == doctest::Approx(v[1] / v[0]));
    const auto g = GridSpec::standard();
    CHECK(g.c_values.size() == 20);
    CHECK(g.b_values.front() == 1.0);
    CHECK(g.b_values.back() == 1e8);
    CHECK_THROWS_AS((GridSpec{{}, {1.0}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{{-1.0}, {1.0}}.validate()), std::invalid_argument);
}

TEST_CASE("folds partition the sample") {
    const auto folds = make_folds(23, 5, 3);
    REQUIRE(folds.size() == 5);
    std::multiset<std::size_t> seen;
    for (const auto& f : folds) {
        CHECK(f.size() >= 4);
        CHECK(f.size() <= 5);
        seen.insert(f.begin(), f.end());
    }
    CHECK(seen.size() == 23);
    for (std::size_t i = 0; i < 23; ++i)
        CHECK(seen.count(i) == 1);
    CHECK(make_folds(23, 5, 3) == folds);
    CHECK_THROWS_AS(make_folds(3, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_folds(10, 1, 0), std::invalid_argument);
}

TEST_CASE("constant forward model gives the held-out negative rate") {
    // 4 points, 2 folds; the learner ignores its data and always says +1.
    const auto s = Dataset::from_dense({{1, 0}, {0, 1}, {1, 1}, {2, 1}}, std::vector<int>{1, -1, 1, -1},
                                       Role::Source);
    const auto t = Dataset::from_dense({{1, 2}}, std::nullopt, Role::Target);
    const Learner constant = [](const Dataset&, const Dataset&) -> Predictor {
        return [](const SparseVector&) { return 1; };
    };
    const auto folds = make_folds(4, 2, 9);
    double expect = 0.0;
    std::size_t used = 0;
    for (const auto& f : folds) {
        std::vector<int> rest;
        for (std::size_t i = 0; i < 4; ++i)
            if (std::find(f.begin(), f.end(), i) == f.end())
                rest.push_back(s.label(i));
        if (std::all_of(rest.begin(), rest.end(), [&](int y) { return y == rest[0]; }))
            continue;
        double neg = 0.0;
        for (std::size_t i : f)
            neg += s.label(i) < 0;
        expect += neg / f.size();
        ++used;
    }
    const auto r = reverse_validation(s, t, constant, 2, 9);
    CHECK(r.fold_risks.size() == used);
    CHECK(r.folds_skipped == 2 - used);
    if (used)
        CHECK(r.risk == doctest::Approx(expect / used));
}

TEST_CASE("all folds degenerate is an error") {
    const auto s = Dataset::from_dense({{1, 0}, {0, 1}, {1, 1}}, std::vector<int>{1, 1, 1}, Role::Source);
    const auto t = Dataset::from_dense({{1, 2}}, std::nullopt, Role::Target);
    CHECK_THROWS_AS(reverse_validation_risk(s, t, KernelSpec::linear(), {}, 3, 0), std::runtime_error);
}

TEST_CASE("leave-one-out on six points") {
    const auto s = Dataset::from_dense({{1, 0.1}, {1, 0.3}, {1, 0.2}, {-1, 0.1}, {-1, 0.2}, {-1, 0.4}},
                                       std::vector<int>{1, 1, 1, -1, -1, -1}, Role::Source);
    const auto t = Dataset::from_dense({{1, -0.1}, {-1, 0.3}}, std::nullopt, Role::Target);
    const auto r = reverse_validation(s, t, dalc_learner(KernelSpec::linear(), {}), 6, 0);
    CHECK(r.fold_risks.size() == 6);
    for (double f : r.fold_risks)
        CHECK((f == 0.0 || f == 1.0));
}

TEST_CASE("identical separable domains give near-zero reverse risk") {
    Rng rng(12);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
        const int y = i % 2 ? 1 : -1;
        rows.push_back({rng.uniform(-1, 1), y * rng.uniform(0.5, 1.5)});
        labels.push_back(y);
    }
    const auto s = Dataset::from_dense(rows, labels, Role::Source);
    const auto t = Dataset::from_dense(rows, std::nullopt, Role::Target);
    CHECK(reverse_validation_risk(s, t, KernelSpec::linear(), {10.0, 1.0}, 5, 1) <= 0.05);
}

TEST_CASE("cell selection and tie-breaking") {
    const GridSpec g{{0.1, 1.0, 10.0}, {1.0, 10.0}};
    // risk[ci * nb + bi]
    CHECK(select_cell(g, {0.3, 0.3, 0.1, 0.3, 0.3, 0.3}) == std::pair<std::size_t, std::size_t>{1, 0});
    // Ties: smallest B first, then smallest C.
    CHECK(select_cell(g, {0.5, 0.2, 0.2, 0.5, 0.2, 0.2}) == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK(select_cell(g, {0.2, 0.2, 0.2, 0.2, 0.2, 0.2}) == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK_THROWS_AS(select_cell(g, {0.1}), std::invalid_argument);
}

TEST_CASE("grid search picks a dominant cell and is thread-count independent") {
    const GridSpec g = GridSpec::log_spaced(0.01, 100, 3, 1, 1000, 4);
    auto fake = [](const DalcHyperparams& hp) {
        ReverseValidationResult r;
        r.risk = (hp.B == 10.0 && std::abs(hp.C - 1.0) < 1e-12) ? 0.0 : 1.0;
        r.fold_risks = {r.risk};
        return r;
    };
    const auto one = grid_search(g, fake, 1);
    const auto four = grid_search(g, fake, 4);
    CHECK(one.risk == four.risk);
    CHECK(one.selected().B == 10.0);
    CHECK(one.selected().C == doctest::Approx(1.0));

    const GridSpec single{{1.0}, {1.0}};
    CHECK(grid_search(single, fake, 1).selected() == DalcHyperparams{1.0, 1.0});
}

TEST_CASE("grid search on data is deterministic") {
    Rng rng(4);
    const Dataset s = test::random_dense(rng, 20, 2, true, Role::Source);
    const Dataset t = test::random_dense(rng, 20, 2, false, Role::Target, 0.3);
    OptimizerConfig opt;
    opt.max_iterations = 50;
    const GridSpec g = GridSpec::log_spaced(0.1, 10, 2, 1, 10, 2);
    const auto a = grid_search(s, t, KernelSpec::linear(), g, 4, 7, opt, {}, 1);
    const auto b = grid_search(s, t, KernelSpec::linear(), g, 4, 7, opt, {}, 2);
    CHECK(a.risk == b.risk);
    CHECK(a.folds == 4);
    CHECK(a.seed == 7);
    CHECK(a.selected() == b.selected());
}
