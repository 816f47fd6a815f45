#include "dalc/validation.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "dalc/estimators.hpp"
#include "dalc/model.hpp"
#include "dalc/rng.hpp"

namespace dalc {

std::vector<double> log_space(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || n == 0)
        throw std::invalid_argument("log_space: need 0 < lo <= hi and n >= 1");
    if (n == 1)
        return {lo};
    std::vector<double> out(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

GridSpec GridSpec::standard() { return log_spaced(0.01, 1e6, 20, 1.0, 1e8, 20); }

GridSpec GridSpec::log_spaced(double c_lo, double c_hi, std::size_t nc, double b_lo, double b_hi,
                              std::size_t nb) {
    return {log_space(c_lo, c_hi, nc), log_space(b_lo, b_hi, nb)};
}

void GridSpec::validate() const {
    if (c_values.empty() || b_values.empty())
        throw std::invalid_argument("grid: C and B lists must be nonempty");
    for (double v : c_values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("grid: C values must be positive");
    for (double v : b_values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("grid: B values must be positive");
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k,
                                                 std::uint64_t seed) {
    if (k < 2)
        throw std::invalid_argument("folds: need at least 2 folds");
    if (n < k)
        throw std::invalid_argument("folds: source has " + std::to_string(n) +
                                    " points, fewer than " + std::to_string(k) + " folds");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i)
        folds[i % k].push_back(order[i]);
    for (auto& f : folds)
        std::sort(f.begin(), f.end());
    return folds;
}

ReverseValidationResult reverse_validation(const Dataset& source, const Dataset& target,
                                           const Learner& learner, std::size_t folds,
                                           std::uint64_t seed) {
    if (!source.labeled())
        throw std::invalid_argument("reverse validation: source must be labeled");
    if (target.empty())
        throw std::invalid_argument("reverse validation: target must be nonempty");
    const auto partition = make_folds(source.size(), folds, seed);
    const Dataset unlabeled_target = target.without_labels().with_role(Role::Target);

    ReverseValidationResult result;
    std::vector<char> held(source.size());
    for (const auto& fold : partition) {
        std::fill(held.begin(), held.end(), 0);
        for (std::size_t i : fold)
            held[i] = 1;
        std::vector<std::size_t> train_rows;
        for (std::size_t i = 0; i < source.size(); ++i)
            if (!held[i])
                train_rows.push_back(i);
        const Dataset train = source.subset(train_rows);
        const Dataset test = source.subset(fold);
        const auto& y = train.labels();
        if (std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); })) {
            ++result.folds_skipped;
            continue;
        }

        const Predictor forward = learner(train, unlabeled_target);
        std::vector<int> self_labels(unlabeled_target.size());
        for (std::size_t i = 0; i < unlabeled_target.size(); ++i)
            self_labels[i] = forward(unlabeled_target.point(i));

        const Dataset reverse_source =
            unlabeled_target.with_labels(std::move(self_labels)).with_role(Role::Source);
        const Dataset reverse_target = train.without_labels().with_role(Role::Target);
        const Predictor reverse = learner(reverse_source, reverse_target);

        std::size_t wrong = 0;
        for (std::size_t i = 0; i < test.size(); ++i)
            if (reverse(test.point(i)) != test.label(i))
                ++wrong;
        result.fold_risks.push_back(static_cast<double>(wrong) / static_cast<double>(test.size()));
    }
    if (result.fold_risks.empty())
        throw std::runtime_error("reverse validation: every fold has a single-class training part");
    result.risk = std::accumulate(result.fold_risks.begin(), result.fold_risks.end(), 0.0) /
                  static_cast<double>(result.fold_risks.size());
    return result;
}

Learner dalc_learner(const KernelSpec& kernel, const DalcHyperparams& hp,
                     const OptimizerConfig& opt, const TrainOptions& options) {
    return [kernel, hp, opt, options](const Dataset& labeled,
                                      const Dataset& unlabeled) -> Predictor {
        auto model = std::make_shared<const DalcModel>(
            train(labeled, unlabeled, kernel, hp, opt, options));
        return [model](const SparseVector& x) { return model->predict(x); };
    };
}

double reverse_validation_risk(const Dataset& source, const Dataset& target,
                               const KernelSpec& kernel, const DalcHyperparams& hp,
                               std::size_t folds, std::uint64_t seed,
                               const OptimizerConfig& opt, const TrainOptions& options) {
    return reverse_validation(source, target, dalc_learner(kernel, hp, opt, options), folds, seed)
        .risk;
}

std::pair<std::size_t, std::size_t> select_cell(const GridSpec& grid,
                                                const std::vector<double>& risk) {
    const std::size_t nc = grid.c_values.size(), nb = grid.b_values.size();
    if (risk.size() != nc * nb)
        throw std::invalid_argument("select_cell: risk matrix does not match the grid");
    // Visit cells in order of increasing B, then C, so the first strict
    // minimum found wins ties.
    std::vector<std::size_t> b_order(nb), c_order(nc);
    std::iota(b_order.begin(), b_order.end(), 0);
    std::iota(c_order.begin(), c_order.end(), 0);
    std::stable_sort(b_order.begin(), b_order.end(),
                     [&](std::size_t a, std::size_t b) { return grid.b_values[a] < grid.b_values[b]; });
    std::stable_sort(c_order.begin(), c_order.end(),
                     [&](std::size_t a, std::size_t b) { return grid.c_values[a] < grid.c_values[b]; });
    std::pair<std::size_t, std::size_t> best{c_order.front(), b_order.front()};
    double best_risk = risk[best.first * nb + best.second];
    for (std::size_t bi : b_order) {
        for (std::size_t ci : c_order) {
            const double r = risk[ci * nb + bi];
            if (r < best_risk) {
                best_risk = r;
                best = {ci, bi};
            }
        }
    }
    return best;
}

ReverseValidationReport grid_search(
    const GridSpec& grid,
    const std::function<ReverseValidationResult(const DalcHyperparams&)>& cell_risk,
    std::size_t threads) {
    grid.validate();
    const std::size_t nc = grid.c_values.size(), nb = grid.b_values.size();
    const std::size_t cells = nc * nb;
    std::vector<ReverseValidationResult> results(cells);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t cell = next++; cell < cells; cell = next++) {
            const std::size_t ci = cell / nb, bi = cell % nb;
            try {
                results[cell] = cell_risk({grid.b_values[bi], grid.c_values[ci]});
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    threads = std::clamp<std::size_t>(threads, 1, cells);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    ReverseValidationReport report;
    report.grid = grid;
    report.risk.resize(cells);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        report.risk[cell] = results[cell].risk;
        report.folds_skipped += results[cell].folds_skipped;
    }
    std::tie(report.selected_c_index, report.selected_b_index) = select_cell(grid, report.risk);
    return report;
}

ReverseValidationReport grid_search(const Dataset& source, const Dataset& target,
                                    const KernelSpec& kernel, const GridSpec& grid,
                                    std::size_t folds, std::uint64_t seed,
                                    const OptimizerConfig& opt, const TrainOptions& options,
                                    std::size_t threads) {
    auto report = grid_search(
        grid,
        [&](const DalcHyperparams& hp) {
            return reverse_validation(source, target, dalc_learner(kernel, hp, opt, options),
                                      folds, seed);
        },
        threads);
    report.folds = folds;
    report.seed = seed;
    return report;
}

}  // namespace dalc
